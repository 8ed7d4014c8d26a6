import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from locnet import catalog
from locnet.inner_fn import SpecError
from locnet.radius import classify_1d
from locnet.witness import (
    MollifierSpec,
    WitnessError,
    detect_transition,
    ingham_mollifier,
    radius_estimate,
    span_dimension,
    witness_pair,
)

SMALL = {"N": 64, "n": 2048, "dx": 1 / 128}


def test_single_sinc_mollifier():
    m = MollifierSpec.build(0.5, 0.6, factor_count=1)
    p = np.array([0.0, 1.0, math.pi / 0.5])
    vals, _ = ingham_mollifier(m, p)
    assert vals[0] == 1 and abs(vals[1] - math.sin(0.5) / 0.5) < 1e-15 and abs(vals[2]) < 1e-15


def test_mollifier_decay_fit():
    m = MollifierSpec.build(0.1, 0.6, factor_count=40)
    assert sum(m.widths) <= 0.1 + 1e-15
    _, fit = ingham_mollifier(m, np.zeros(1))
    assert fit["delta"] >= 0.55 and fit["achieved"]


def test_mollifier_truncates_at_cell():
    m = MollifierSpec.build(0.2, 0.6, cell=1 / 256)
    assert m.widths[-1] >= 1 / 256 and sum(m.widths) <= 0.2
    with pytest.raises(ValueError):
        MollifierSpec(0.1, 0.6, 2, (0.05, 0.07))
    with pytest.raises(ValueError):
        MollifierSpec(0.1, 0.6, 2, (0.08, 0.05))


def test_decay_fit_failure_is_reported():
    # one sinc factor decays algebraically: the stretched-exponential fit falls short
    m = MollifierSpec.build(0.5, 0.6, factor_count=1)
    _, fit = ingham_mollifier(m, np.zeros(1))
    assert not fit["achieved"] and fit["delta"] < 0.55
    with pytest.raises(WitnessError):
        ingham_mollifier(m, np.zeros(1), window=(1e-12, 1e-11))


@pytest.mark.parametrize("name,radius", [("single_zero_at_i", 0.2), ("translation_x1", 0.7),
                                         ("translation_x2", 1.2), ("identity", 0.2)])
def test_witness_pairs(name, radius):
    w = witness_pair(catalog.get(name), 0.2, 0.6)
    assert w.certified and w.ratio_residual < 1e-8
    assert w.radius == pytest.approx(radius)
    assert w.radius >= classify_1d(catalog.get(name)).value


def test_identity_witness_is_trivial_pair():
    w = witness_pair(catalog.get("identity"), 0.2, 0.6)
    assert np.array_equal(w.psi_plus.samples, w.psi_minus.samples)


def test_zero_at_i_member_of_quarter_interval():
    w = witness_pair(catalog.get("single_zero_at_i"), 0.2, 0.6)
    from locnet.paley_wiener import membership_1d
    assert all(membership_1d(g, (-0.25, 0.25)).member for g in (w.psi_plus, w.psi_minus))
    assert w.sign == -1  # one purely imaginary zero


def test_witness_preconditions():
    with pytest.raises(SpecError):
        witness_pair(catalog.get("atom_at_0"), 0.2, 0.6)
    with pytest.raises(SpecError):
        witness_pair(catalog.get("sin_ratio_nu_0.5"), 0.2, 0.6)


def test_detect_transition_rules():
    r = np.arange(1, 9) * 0.1
    s = np.array([1, 1, 1, 1e-5, 1, 1, 1e-7, 1e-8])
    est, thr, plateau = detect_transition(r, s)
    # an isolated dip is not a transition; threshold scales with the plateau median
    assert est == pytest.approx(0.7) and plateau == 1.0 and thr == pytest.approx(1e-3)
    est, thr, _ = detect_transition(r, np.full(8, 1e-16))
    assert est == pytest.approx(0.1) and thr == 1e-10
    est, _, _ = detect_transition(r, np.ones(8))
    assert est is None


def test_identity_scan_collapses_everywhere():
    res = radius_estimate(catalog.get("identity"), np.linspace(0.1, 1.0, 4), **SMALL)
    assert np.all(res.sigma_min < 1e-10) and res.estimated_radius == pytest.approx(0.1)


def test_sin_ratio_scan_small_grid():
    r = np.arange(1, 13) * 0.1
    res = radius_estimate(catalog.get("sin_ratio_nu_0.5"), r, **SMALL)
    assert abs(res.estimated_radius - 0.5) <= 0.1 + 1e-12
    assert np.all(res.sigma_min[:4] > 0.9)
    assert np.all(res.sigma_min[6:] < 1e-3 * res.plateau)
    # larger intervals only relax the constraint
    assert np.all(np.diff(res.sigma_min) <= 1e-10)


@pytest.mark.parametrize("name", ["translation_x1", "translation_x2", "single_zero_at_i", "double_zero_i_2i"])
def test_scan_agrees_with_exact_classification(name):
    r = np.arange(1, 13) * 0.1
    res = radius_estimate(catalog.get(name), r, **SMALL)
    target = classify_1d(catalog.get(name)).value
    expected = max(target, r[0])
    assert abs(res.estimated_radius - expected) <= 0.1 + 1e-12


def test_scan_input_errors():
    with pytest.raises(ValueError):
        radius_estimate(catalog.get("identity"), [0.5, 0.3], **SMALL)
    with pytest.raises(ValueError):
        radius_estimate(catalog.get("identity"), [1.0, 9.0], **SMALL)


def test_nyquist_cap_recorded():
    res = radius_estimate(catalog.get("identity"), [0.1, 0.2], N=256, n=2048, dx=1 / 128)
    assert res.calibration["nyquist_capped"] and max(res.basis_sizes) < 256


def test_span_dimension_examples():
    w = witness_pair(catalog.get("identity"), 0.2, 0.6)
    out = span_dimension(catalog.get("identity"), 1.0, w, generators=64, n=512)
    assert out["rank"] == 64 and not out["degenerate"]
    assert span_dimension(catalog.get("identity"), 1.0, None)["rank"] == 0


def test_span_rank_monotone_in_r():
    w = witness_pair(catalog.get("identity"), 0.2, 0.6)
    ranks = [span_dimension(catalog.get("identity"), r, w, generators=96, n=256, dx=4.0 / 256)["rank"]
             for r in (0.4, 0.7, 1.0)]
    assert ranks == sorted(ranks)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.3, 0.9))
def test_mollifier_invariants(a, delta):
    m = MollifierSpec.build(a, delta, cell=1 / 256)
    w = np.array(m.widths)
    assert w.sum() <= a * (1 + 1e-12) and np.all(np.diff(w) < 0)
    assert m.values(np.zeros(1))[0] == 1
