"""Certificates that deformed interval subspaces are nontrivial.

Mollifiers, explicit witness pairs, an SVD feasibility scan for the
minimal radius, and a rank proxy for the span generated by a witness.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import zeta

from .fourier import bump_derivative_ft
from .inner_fn import SpecError, canonical_product_eval, evaluate, validate_and_generate
from .paley_wiener import DEFAULT_DX, DEFAULT_N, Tolerances, line_grid, membership_1d
from .radius import exponent_of
from .reps import GridDescriptor, GridFunction

RATIO_TOL = 1e-8
DECAY_FIT_TOL = 0.05
DECAY_WINDOW = (10.0, 1e4)
THRESHOLD_FACTOR = 1e-3
COLLAPSE_FLOOR = 1e-10  # sigma below this counts as collapsed regardless of plateau
RANK_TOL = 1e-8


class WitnessError(ValueError):
    pass


@dataclass(frozen=True)
class MollifierSpec:
    half_width: float
    decay_exponent: float
    factor_count: int
    widths: tuple

    def __post_init__(self):
        w = np.asarray(self.widths, dtype=float)
        if len(w) != self.factor_count or len(w) == 0:
            raise ValueError("need factor_count positive widths")
        if np.any(w <= 0) or np.any(np.diff(w) >= 0):
            raise ValueError("widths must be positive and strictly decreasing")
        if w.sum() > self.half_width * (1 + 1e-12):
            raise ValueError("widths exceed the half width")

    @classmethod
    def build(cls, half_width, decay_exponent, cell=DEFAULT_DX, factor_count=None):
        """Widths a_k proportional to k^(-1/delta), summing to at most half_width.

        Without factor_count the product stops before a width drops below cell.
        """
        if not 0 < decay_exponent < 1:
            raise ValueError("decay exponent must lie in (0, 1)")
        s = 1.0 / decay_exponent
        if factor_count is None:
            # normalized over the infinite sequence, so any truncation fits
            lead = half_width / zeta(s)
            factor_count = max(1, int(math.floor((lead / cell) ** decay_exponent)))
            k = np.arange(1, factor_count + 1)
            widths = lead * k ** -s
        else:
            k = np.arange(1, factor_count + 1)
            widths = k ** -s
            widths = half_width * widths / widths.sum()
        return cls(float(half_width), float(decay_exponent), int(factor_count), tuple(widths.tolist()))

    def values(self, p):
        p = np.asarray(p, dtype=float)
        out = np.ones_like(p)
        for a in self.widths:
            out = out * np.sinc(a * p / np.pi)
        return out

    def envelope(self, p):
        """Monotone majorant of |M| built from min(|sinc|-bound, 1/|x|)."""
        p = np.abs(np.asarray(p, dtype=float))
        out = np.ones_like(p)
        for a in self.widths:
            x = a * p
            out = out * np.where(x <= math.pi / 2, np.sinc(x / np.pi), 1.0 / np.maximum(x, 1e-300))
        return out


def ingham_mollifier(spec, p_grid, window=DECAY_WINDOW):
    """Mollifier values on p_grid plus a fit of its stretched-exponential decay.

    Fits log(-log E) = log tau + delta log p on the envelope E over window.
    """
    M = spec.values(p_grid)
    p = np.geomspace(window[0], window[1], 200)
    env = spec.envelope(p)
    y = -np.log(env)
    ok = y > 0
    if ok.sum() < 10:
        raise WitnessError("mollifier decay fit failed: envelope does not decay in the window")
    slope, icpt = np.polyfit(np.log(p[ok]), np.log(y[ok]), 1)
    fit = {"tau": float(math.exp(icpt)), "delta": float(slope), "window": [float(window[0]), float(window[1])],
           "requested_delta": spec.decay_exponent,
           "achieved": bool(slope >= spec.decay_exponent - DECAY_FIT_TOL)}
    return M, fit


@dataclass(frozen=True)
class WitnessPair:
    psi_plus: GridFunction
    psi_minus: GridFunction
    x_used: float
    mollifier: MollifierSpec
    ratio_residual: float
    sign: int
    radius: float
    membership_reports: tuple
    decay_fit: dict

    @property
    def certified(self):
        return self.ratio_residual < RATIO_TOL and all(r.member for r in self.membership_reports)

    def as_dict(self):
        return {"x_used": self.x_used, "radius": self.radius, "sign": self.sign,
                "ratio_residual": self.ratio_residual, "certified": self.certified,
                "mollifier": {"half_width": self.mollifier.half_width,
                              "decay_exponent": self.mollifier.decay_exponent,
                              "factor_count": self.mollifier.factor_count},
                "decay_fit": self.decay_fit,
                "membership": [r.as_dict() for r in self.membership_reports]}


def witness_pair(spec, a, delta, tol=Tolerances(), n=DEFAULT_N, dx=DEFAULT_DX, lightray=None):
    """psi_pm(p) = ip e^{+-ipx/2} Q_pm(p) M(p); their ratio is +-phi."""
    spec = validate_and_generate(spec)
    if spec.atoms:
        raise SpecError("witness pairs need a spec without singular part")
    rho, _ = exponent_of(spec)
    if not rho < delta < 1:
        raise SpecError(f"need convergence exponent {rho:.3g} < delta = {delta} < 1")
    moll = MollifierSpec.build(a, delta, cell=dx)
    _, fit = ingham_mollifier(moll, np.zeros(1))
    x = spec.translation
    zs = spec.zero_set

    def make(side):
        s = 1 if side == "+" else -1
        return lambda p: (1j * p * np.exp(0.5j * s * p * x)
                          * canonical_product_eval(zs, np.asarray(p, dtype=complex), side) * moll.values(p))

    fplus, fminus = make("+"), make("-")
    lg = lightray or GridDescriptor.lightray(12.0, 2048)
    plus = GridFunction.from_function(lg, fplus)
    minus = GridFunction.from_function(lg, fminus)

    p = line_grid(n, dx).points
    num, den = fplus(p), fminus(p)
    keep = np.abs(den) > 1e-250
    ratio = num[keep] / den[keep]
    phi = evaluate(spec, p[keep].astype(complex))
    res = {s: float(np.max(np.abs(ratio - s * phi))) for s in (1, -1)}
    sign = min(res, key=res.get)
    if res[sign] >= RATIO_TOL:
        raise WitnessError(f"ratio residual {res[sign]:.2e} above {RATIO_TOL}; "
                           "retry with a smaller decay exponent or a finer x grid")
    radius = x / 2 + a
    reports = tuple(membership_1d(g, (-radius, radius), tol, n, dx) for g in (plus, minus))
    if not all(r.member for r in reports):
        leak = max(r.support_leakage for r in reports)
        raise WitnessError(f"witness not a member of I_{radius:g}: leakage {leak:.2e}")
    return WitnessPair(plus, minus, float(x), moll, res[sign], int(sign), radius, reports, fit)


@dataclass(frozen=True)
class FeasibilityResult:
    r_grid: np.ndarray
    sigma_min: np.ndarray
    estimated_radius: float
    threshold: float
    plateau: float
    basis_sizes: tuple
    calibration: dict

    def as_dict(self):
        return {"r_grid": [float(r) for r in self.r_grid],
                "sigma_min": [float(s) for s in self.sigma_min],
                "estimated_radius": None if self.estimated_radius is None else float(self.estimated_radius),
                "threshold": float(self.threshold), "plateau": float(self.plateau),
                "basis_sizes": list(self.basis_sizes), "calibration": self.calibration}

    def csv_rows(self):
        return [("r", "sigma_min")] + [(f"{r:.10g}", f"{s:.10e}") for r, s in zip(self.r_grid, self.sigma_min)]


def _multiplier_fft_order(spec, n, dx):
    p = 2 * math.pi * np.fft.fftfreq(n, dx)
    # psi_2 vanishes at p = 0, so the value there never matters
    vals = np.ones(n, dtype=complex)
    vals[1:] = evaluate(spec, p[1:].astype(complex))
    # the Nyquist bin stands for both +-p_max; keep the symmetric (real) part
    vals[n // 2] = vals[n // 2].real
    return vals


def _sigma(mult, x, dx, r, N):
    """Smallest singular value of f -> outside part of the transform of phi * psi_2.

    f is a real sine series vanishing at +-r; psi_2 = -ip f^ is the
    transform of f'. Columns are orthonormalized so sigma^2 is the smallest
    fraction of the mass of phi psi_2 that leaks outside [-r, r].
    """
    cells = int(math.ceil(2 * r / dx)) - 1
    n_eff = max(1, min(N, cells))
    inside = np.abs(x) <= r
    k = np.arange(1, n_eff + 1)
    F = np.zeros((len(x), n_eff))
    F[inside] = np.sin(np.outer(x[inside] + r, k) * (math.pi / (2 * r)))
    U = (F - np.roll(F, 1, axis=0)) / dx
    Q, _ = np.linalg.qr(U)
    G = np.fft.ifft(mult[:, None] * np.fft.fft(Q, axis=0), axis=0)
    out = np.abs(x) > r + dx
    A = np.vstack([G[out].real, G[out].imag])
    return float(np.linalg.svd(A, compute_uv=False)[-1]), n_eff


def detect_transition(r_grid, sigma, factor=THRESHOLD_FACTOR, floor=COLLAPSE_FLOOR):
    """First r where sigma stays below threshold for two consecutive points.

    threshold = factor * median of the plateau (values above the floor),
    never below the absolute floor. All-collapsed scans return r_grid[0].
    """
    sigma = np.asarray(sigma)
    live = sigma[sigma > floor]
    plateau = float(np.median(live)) if len(live) else 0.0
    thr = max(factor * plateau, floor)
    below = sigma <= thr
    for i in range(len(sigma)):
        if below[i] and (i + 1 == len(sigma) or below[i + 1]):
            return float(r_grid[i]), thr, plateau
    return None, thr, plateau


def radius_estimate(spec, r_grid, N=256, n=DEFAULT_N, dx=DEFAULT_DX):
    spec = validate_and_generate(spec)
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(np.diff(r_grid) <= 0) or r_grid[0] <= 0:
        raise ValueError("r_grid must be positive and increasing")
    x = (np.arange(n) - n // 2) * dx
    if r_grid[-1] + 2 * dx >= x[-1]:
        raise ValueError("r_grid exceeds the x window")
    mult = _multiplier_fft_order(spec, n, dx)
    # the fft runs in natural order; x must be too
    x_nat = np.fft.ifftshift(x)
    sig, sizes = [], []
    for r in r_grid:
        s, ne = _sigma(mult, x_nat, dx, r, N)
        sig.append(s)
        sizes.append(ne)
    sig = np.asarray(sig)
    est, thr, plateau = detect_transition(r_grid, sig)
    calib = {"threshold_factor": THRESHOLD_FACTOR, "collapse_floor": COLLAPSE_FLOOR,
             "n": n, "dx": dx, "N": N, "nyquist_capped": bool(min(sizes) < N)}
    return FeasibilityResult(r_grid, sig, est, thr, plateau, tuple(sizes), calib)


def span_dimension(spec, r, witness, generators=64, n=512, dx=None, seed=0):
    """Numerical rank of {psi_plus * g'^ : g bumps in I_{r - r'}} on an n-point grid."""
    if witness is None:
        return {"rank": 0, "ratio": 0.0, "degenerate": True}
    room = r - witness.radius
    if room <= 0:
        raise ValueError("span needs r above the witness radius")
    dx = dx or 4.0 * r / n
    p = line_grid(n, dx).points
    base = witness.psi_plus.func(np.abs(p))
    base = np.where(p > 0, base, np.conj(base))
    if not np.any(base):
        return {"rank": 0, "ratio": 0.0, "degenerate": True}
    rng = np.random.default_rng(seed)
    centers = rng.uniform(-room / 2, room / 2, generators)
    widths = rng.uniform(0.1, 0.5, generators) * room / 2
    cols = np.column_stack([base * bump_derivative_ft(p, c, w, 3) for c, w in zip(centers, widths)])
    s = np.linalg.svd(cols, compute_uv=False)
    rank = int(np.sum(s > RANK_TOL * s[0]))
    return {"rank": rank, "ratio": rank / n, "degenerate": False}
