import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from locnet import catalog
from locnet.inner_fn import (
    Atom,
    Generator,
    InnerFunctionSpec,
    SpecError,
    ZeroSet,
    canonical_product_eval,
    convergence_exponent,
    evaluate,
    gamma_transform,
    is_gamma_invariant,
    momentum_zero_transform,
    product,
    same_spec,
    spec_from_mapping,
    spec_to_mapping,
    symmetry_check,
    validate_and_generate,
)

# values from an independent 30-digit mpmath product, frozen
P0 = 0.7 + 0.3j
ORACLE = {
    "double_zero_i_2i": -0.197104853814164581 + 0.473318307355322075j,
    "sin_ratio_nu_0.5": -0.428835479706283995 - 0.546882174570272339j,
    "atom_at_0": 0.212187082615822367 - 0.557123692016199210j,
    "atom_at_1": -0.016985659623500081 + 0.023712280798464965j,
    "translation_x2": 0.093279945777308469 + 0.540826278603383419j,
}
GAMMA_AT_1_PLUS_I = -0.008016965157214256 + 0.000316867214544970j
PAIR_1_PLUS_I = 0.051076983464991958 + 0.487709140866493315j


def spec(zeros=(), x=0.0, atoms=(), gens=()):
    return validate_and_generate(InnerFunctionSpec(1, x, ZeroSet(tuple(zeros), tuple(gens)), tuple(atoms)))


@pytest.mark.parametrize("name", sorted(ORACLE))
def test_catalog_values_match_oracle(name):
    val = evaluate(catalog.get(name), np.array([P0]))[0]
    assert abs(val - ORACLE[name]) < 1e-13


def test_gamma_example_matches_oracle():
    val = evaluate(catalog.get("gamma_example"), np.array([1 + 1j]))[0]
    assert abs(val - GAMMA_AT_1_PLUS_I) < 1e-13


def test_off_axis_zero_is_paired():
    val = evaluate(spec([1 + 1j]), np.array([P0]))[0]
    assert abs(val - PAIR_1_PLUS_I) < 1e-13


def test_sin_ratio_zeros_folded():
    s = spec(gens=[Generator.sin_ratio(1.0, 1.0, 5)])
    expected = [1j + math.pi * n for n in range(5)]
    assert np.allclose(s.zeros, expected)


def test_identity_and_validation_errors():
    assert evaluate(spec(), np.array([2 + 1j]))[0] == 1
    with pytest.raises(SpecError, match="lower half-plane zero"):
        spec([-1j])
    with pytest.raises(SpecError):
        spec(x=-1.0)
    with pytest.raises(SpecError):
        spec(atoms=[Atom(0.0, -1.0)])
    with pytest.raises(SpecError):
        spec(gens=[Generator.sin_ratio(0.0, 1.0)])


def test_evaluate_examples():
    assert abs(evaluate(spec([1j]), np.array([1j]))[0]) == 0
    assert abs(evaluate(spec(x=2.0), np.array([1j]))[0] - math.exp(-2)) < 1e-15
    s = spec(gens=[Generator.sin_ratio(1.0, 1.0)])
    assert abs(evaluate(s, np.array([0j]))[0] + 1) < 1e-14
    assert abs(evaluate(s, np.array([0j]), method="blaschke")[0] + 1) < 1e-14


def test_evaluate_pole_and_atom_errors():
    with pytest.raises(SpecError):
        evaluate(spec([1j]), np.array([-1j]))
    with pytest.raises(SpecError):
        evaluate(spec(atoms=[Atom(1.0, 1.0)]), np.array([1.0 + 0j]))


def test_sin_ratio_truncation_converges():
    grid = np.linspace(-3, 3, 41) + 0.5j
    closed = evaluate(spec(gens=[Generator.sin_ratio(0.5, 1.0, 256)]), grid)
    res = []
    for k in (4, 16, 64, 256):
        s = validate_and_generate(InnerFunctionSpec(
            zero_set=ZeroSet((), (Generator.sin_ratio(0.5, 1.0, 256),)), truncation_order=k))
        res.append(np.max(np.abs(evaluate(s, grid, method="blaschke") - closed)))
    assert all(a > b for a, b in zip(res, res[1:]))


def test_symmetry_check_examples():
    grid = np.geomspace(0.1, 10, 100)
    for s in (spec([1j]), spec(x=1.0)):
        r = symmetry_check(s, grid)
        assert r["passed"] and r["modulus_residual"] < 1e-12 and r["reflection_residual"] < 1e-12
    bad = symmetry_check(lambda p: 1 / (p + 1j), grid)
    assert not bad["passed"]


@pytest.mark.parametrize("name", catalog.names())
def test_catalog_is_symmetric_inner(name):
    grid = np.concatenate([np.geomspace(0.05, 20, 200)])
    r = symmetry_check(catalog.get(name), grid, tol=1e-10)
    assert r["passed"], r


def test_gamma_transform_examples():
    g = gamma_transform(spec(x=1.5))
    assert g.translation == 0 and g.atoms == (Atom(0.0, 1.5),)
    assert np.allclose(gamma_transform(spec([2j])).zeros, [0.5j])
    assert np.allclose(gamma_transform(spec([1j])).zeros, [1j])


@pytest.mark.parametrize("name", catalog.names())
def test_gamma_pointwise_and_involution(name):
    s = catalog.get(name)
    g = gamma_transform(s)
    p = np.array([0.3 + 0.4j, 1.7 + 0.2j, -2.0 + 1.0j, 0.1 + 3j])
    assert np.max(np.abs(evaluate(g, p) - np.conj(evaluate(s, 1 / np.conj(p))))) < 1e-10
    assert same_spec(gamma_transform(g), s)


def test_product_examples():
    assert product(spec(x=1.0), spec(x=2.0)).translation == 3.0
    s = catalog.get("sin_ratio_nu_0.5")
    assert same_spec(product(s, spec()), s)
    pz = product(spec([1j]), spec([2j]))
    assert sorted(np.imag(pz.zeros)) == [1.0, 2.0]


def test_convergence_exponent_examples():
    est, _ = convergence_exponent(ZeroSet(tuple(1j * n for n in range(1, 201))))
    assert abs(est - 1) < 0.05
    est, _ = convergence_exponent(ZeroSet(tuple(1j * n * n for n in range(1, 201))))
    assert abs(est - 0.5) < 0.05
    assert convergence_exponent(catalog.get("gamma_example").zero_set)[0] == math.inf
    with pytest.raises(SpecError):
        convergence_exponent(ZeroSet((1j, 2j)))


def test_canonical_product_examples():
    zs = ZeroSet((1j,))
    p = np.array([0.3 - 0.2j, 1.0 + 0j, 1j])
    assert np.allclose(canonical_product_eval(zs, p), 1 + 1j * p)
    q1 = canonical_product_eval(zs, np.array([1.0 + 0j]))[0]
    qm = canonical_product_eval(zs, np.array([1.0 + 0j]), "-")[0]
    assert abs(q1 / qm - 1j) < 1e-15
    assert abs(evaluate(spec([1j]), np.array([1.0 + 0j]))[0] + 1j) < 1e-15
    assert np.all(canonical_product_eval(ZeroSet(), p) == 1)


def test_canonical_product_warns_for_exponent_one():
    zs = catalog.get("sin_ratio_nu_0.5").zero_set
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        canonical_product_eval(zs, np.array([1.0 + 0j]))
    assert w


def test_momentum_zero_transform_examples():
    assert np.allclose(momentum_zero_transform(ZeroSet((1j,)), 2.0).zeros, [2j])
    t = momentum_zero_transform(catalog.get("gamma_example").zero_set, 2.0)
    assert abs(t.zeros[0] - 2j * math.sin(1)) < 1e-12
    est, _ = convergence_exponent(t)
    assert abs(est - 0.5) < 0.1
    with pytest.raises(SpecError):
        momentum_zero_transform(ZeroSet((0j,)), 1.0)


def test_gamma_invariant_set_has_infinite_exponent():
    assert is_gamma_invariant(catalog.get("gamma_example"))
    assert convergence_exponent(catalog.get("gamma_example").zero_set)[0] == math.inf


def test_mapping_roundtrip():
    for name in catalog.names():
        s = catalog.get(name)
        assert same_spec(spec_from_mapping(spec_to_mapping(s)), s)


# -- properties ----------------------------------------------------------

upper = st.builds(complex, st.floats(-5, 5), st.floats(0.05, 5))
zero_lists = st.lists(upper, max_size=6)
translations = st.floats(0, 3)
atom_lists = st.lists(st.builds(Atom, st.floats(0, 3), st.floats(0.1, 2)), max_size=2)


def _finite(z, x, atoms):
    return spec(z, x, atoms)


@settings(max_examples=60, deadline=None)
@given(zero_lists, translations, st.lists(upper, min_size=1, max_size=8))
def test_inner_bound_in_upper_half_plane(z, x, pts):
    s = _finite(z, x, ())
    vals = evaluate(s, np.array(pts))
    assert np.all(np.abs(vals) <= 1 + 1e-10)


@settings(max_examples=60, deadline=None)
@given(zero_lists, translations, atom_lists, st.lists(st.floats(0.05, 20), min_size=1, max_size=8))
def test_unimodular_and_symmetric_on_real_axis(z, x, atoms, pts):
    s = _finite(z, x, atoms)
    p = np.array(pts)
    p = p[np.min(np.abs(p[:, None] - np.array([a.location for a in s.atoms] or [-1.0])), axis=1) > 1e-3]
    if not len(p):
        return
    vals = evaluate(s, p.astype(complex))
    assert np.max(np.abs(np.abs(vals) - 1)) < 1e-10
    assert np.max(np.abs(evaluate(s, (-p).astype(complex)) - np.conj(vals))) < 1e-10


@settings(max_examples=40, deadline=None)
@given(zero_lists, translations, atom_lists, zero_lists, translations, st.lists(upper, min_size=1, max_size=5))
def test_gamma_is_multiplicative_involution(z1, x1, atoms, z2, x2, pts):
    a, b = _finite(z1, x1, atoms), _finite(z2, x2, ())
    assert same_spec(gamma_transform(gamma_transform(a)), a)
    p = np.array(pts)
    lhs = evaluate(gamma_transform(product(a, b)), p)
    rhs = evaluate(product(gamma_transform(a), gamma_transform(b)), p)
    assert np.max(np.abs(lhs - rhs)) < 1e-10


@settings(max_examples=40, deadline=None)
@given(zero_lists, translations, zero_lists, translations, st.lists(upper, min_size=1, max_size=5))
def test_product_is_pointwise(z1, x1, z2, x2, pts):
    a, b = _finite(z1, x1, ()), _finite(z2, x2, ())
    p = np.array(pts)
    assert np.max(np.abs(evaluate(product(a, b), p) - evaluate(a, p) * evaluate(b, p))) < 1e-12


@settings(max_examples=40, deadline=None)
@given(zero_lists, st.lists(st.builds(complex, st.floats(-4, 4), st.floats(-4, 4)), min_size=1, max_size=5))
def test_canonical_product_symmetry(z, pts):
    zs = spec(z).zero_set
    p = np.array(pts)
    for side in "+-":
        assert np.allclose(np.conj(canonical_product_eval(zs, -np.conj(p), side)),
                           canonical_product_eval(zs, p, side), rtol=1e-12, atol=1e-12)
