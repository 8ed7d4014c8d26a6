"""The irreducible standard pair in rapidity, lightray and momentum pictures.

Rapidity: functions of theta with measure d theta.
Lightray: functions of p = e^theta > 0 with measure dp/p.
Momentum: functions of p1 = m sinh(theta) with measure dp1/omega,
omega = sqrt(p1^2 + m^2).

Grids are symmetric (lightray: under p -> 1/p) so Z is an index reversal.
A GridFunction may carry the exact function it samples; operators then
compose it and every resampling is exact.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .fourier import momentum_nodes
from .inner_fn import evaluate

SHIFT_TOL = 1e-9
LOST_MASS_TOL = 1e-12


@dataclass(frozen=True)
class GridDescriptor:
    picture: str  # rapidity | lightray | momentum | line
    n: int
    step: float  # theta step, or p1 step for momentum
    mass: float = None

    @classmethod
    def rapidity(cls, theta_max, n):
        return cls("rapidity", n, 2 * theta_max / (n - 1))

    @classmethod
    def lightray(cls, theta_max, n):
        return cls("lightray", n, 2 * theta_max / (n - 1))

    @classmethod
    def momentum(cls, p_max, n, mass):
        if not mass > 0:
            raise ValueError("momentum grids need a positive mass")
        return cls("momentum", n, 2 * p_max / (n - 1), float(mass))

    @classmethod
    def line(cls, n, dp):
        """Uniform grid on the whole real p axis, symmetric about 0, 0 excluded for even n."""
        return cls("line", n, float(dp))

    @property
    def points(self):
        u = (np.arange(self.n) - (self.n - 1) / 2) * self.step
        return np.exp(u) if self.picture == "lightray" else u

    @property
    def layout(self):
        if self.picture == "lightray":
            u = self.points
            return {"kind": "geometric", "min": float(u[0]), "ratio": math.exp(self.step), "n": self.n}
        u = self.points
        return {"kind": "uniform", "min": float(u[0]), "max": float(u[-1]), "n": self.n}

    @property
    def weights(self):
        if self.picture == "momentum":
            return self.step / self.omega
        return np.full(self.n, self.step)

    @property
    def omega(self):
        return np.sqrt(self.points ** 2 + self.mass ** 2)

    def theta(self, u=None):
        if self.picture == "line":
            raise ValueError("line grids carry no rapidity coordinate")
        u = self.points if u is None else u
        if self.picture == "rapidity":
            return u
        if self.picture == "lightray":
            return np.log(u)
        return np.arcsinh(u / self.mass)

    def from_theta(self, theta):
        if self.picture == "rapidity":
            return theta
        if self.picture == "lightray":
            return np.exp(theta)
        return self.mass * np.sinh(theta)


def symmetric_momentum_grid(n, dp, mass):
    """Momentum grid with nodes matching fourier.momentum_nodes(n, dp)."""
    g = GridDescriptor("momentum", n, dp, float(mass))
    assert np.allclose(g.points, momentum_nodes(n, dp))
    return g


@dataclass(frozen=True)
class GridFunction:
    grid: GridDescriptor
    samples: np.ndarray
    func: object = None
    flags: tuple = ()

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.shape != (self.grid.n,):
            raise ValueError("sample count must equal grid size")
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_function(cls, grid, func):
        return cls(grid, func(grid.points), func)

    def norm(self):
        return math.sqrt(float(np.sum(self.grid.weights * np.abs(self.samples) ** 2)))

    def inner(self, other):
        """<self, other>, antilinear in the first slot."""
        return complex(np.sum(self.grid.weights * np.conj(self.samples) * other.samples))


@dataclass(frozen=True)
class OperatorTag:
    kind: str
    params: tuple = field(default_factory=tuple)

    @classmethod
    def T(cls, a):
        return cls("T", (float(a),))

    @classmethod
    def Tprime(cls, a):
        return cls("Tprime", (float(a),))

    @classmethod
    def Delta(cls, t):
        return cls("Delta", (float(t),))

    @classmethod
    def J(cls):
        return cls("J")

    @classmethod
    def Z(cls):
        return cls("Z")

    @classmethod
    def Gamma(cls):
        return cls("Gamma")

    @classmethod
    def Tm(cls, x_plus, x_minus, mass=None):
        return cls("Tm", (float(x_plus), float(x_minus), mass))

    @classmethod
    def Endo(cls, spec):
        return cls("Endo", (spec,))


def _multiplier(op, grid):
    pic = grid.picture
    if pic == "rapidity":
        energy = lambda u: np.exp(u)
        inverse = lambda u: np.exp(-u)
    elif pic == "lightray":
        energy = lambda u: u
        inverse = lambda u: 1.0 / u
    else:
        m = grid.mass
        energy = lambda u: (np.sqrt(u * u + m * m) + u) / m
        inverse = lambda u: (np.sqrt(u * u + m * m) - u) / m
    if op.kind == "T":
        a = op.params[0]
        return lambda u: np.exp(1j * a * energy(u))
    if op.kind == "Tprime":
        a = op.params[0]
        return lambda u: np.exp(1j * a * inverse(u))
    if op.kind == "Tm":
        if pic == "rapidity":
            raise ValueError("Tm needs the lightray or momentum picture")
        xp, xm, m = op.params
        m = grid.mass if m is None else m
        if m is None:
            raise ValueError("Tm in the lightray picture needs a mass")
        return lambda u: np.exp(0.5j * m * (xp * energy(u) + xm * inverse(u)))
    if op.kind == "Endo":
        spec = op.params[0]
        return lambda u: evaluate(spec, energy(u).astype(complex))
    raise ValueError(op.kind)


def _reflect(grid):
    if grid.picture == "lightray":
        return lambda u: 1.0 / u
    return lambda u: -u


def _boost(grid, t):
    """Coordinate map u -> point whose value Delta(t) pulls back."""
    s = 2 * math.pi * t
    if grid.picture == "rapidity":
        return lambda u: u - s
    if grid.picture == "lightray":
        return lambda u: math.exp(-s) * u
    m = grid.mass
    return lambda u: math.cosh(s) * u - math.sinh(s) * np.sqrt(u * u + m * m)


def _shift_samples(samples, k):
    out = np.zeros_like(samples)
    if k >= 0:
        out[k:] = samples[:len(samples) - k]
    else:
        out[:k] = samples[-k:]
    return out


def _fourier_shift(samples, s):
    # band-limited shift by s grid steps (periodic)
    n = len(samples)
    freq = np.fft.fftfreq(n)
    return np.fft.ifft(np.fft.fft(samples) * np.exp(-2j * np.pi * freq * s))


def apply_operator(op, psi):
    grid, f, u = psi.grid, psi.func, psi.grid.points
    kind = op.kind
    if kind in ("T", "Tprime", "Tm", "Endo"):
        mult = _multiplier(op, grid)
        new = mult(u) * psi.samples
        func = None if f is None else (lambda v, f=f: mult(v) * f(v))
        return GridFunction(grid, new, func, psi.flags)
    if kind == "J":
        func = None if f is None else (lambda v, f=f: np.conj(f(v)))
        return GridFunction(grid, np.conj(psi.samples), func, psi.flags)
    if kind == "Z":
        r = _reflect(grid)
        func = None if f is None else (lambda v, f=f: f(r(v)))
        return GridFunction(grid, psi.samples[::-1].copy(), func, psi.flags)
    if kind == "Gamma":
        return apply_operator(OperatorTag.Z(), apply_operator(OperatorTag.J(), psi))
    if kind == "Delta":
        return _apply_delta(op.params[0], psi)
    raise ValueError(f"unknown operator {kind!r}")


def _apply_delta(t, psi):
    grid, f = psi.grid, psi.func
    back = _boost(grid, t)
    if f is not None:
        func = lambda v, f=f: f(back(v))
        return GridFunction(grid, func(grid.points), func, psi.flags)
    if grid.picture in ("rapidity", "lightray"):
        s = 2 * math.pi * t / grid.step
        k = round(s)
        if abs(s - k) < SHIFT_TOL:
            new = _shift_samples(psi.samples, k)
            lost = np.sum(np.abs(psi.samples) ** 2) - np.sum(np.abs(new) ** 2)
            if lost > LOST_MASS_TOL * np.sum(np.abs(psi.samples) ** 2):
                raise ValueError("Delta moves mass beyond the grid support")
            return GridFunction(grid, new, None, psi.flags)
        new = _fourier_shift(psi.samples, s)
    else:
        theta = grid.theta()
        spline = CubicSpline(theta, psi.samples)
        target = grid.theta(back(grid.points))
        inside = (target >= theta[0]) & (target <= theta[-1])
        new = np.where(inside, spline(np.clip(target, theta[0], theta[-1])), 0)
    return GridFunction(grid, new, None, psi.flags + ("interpolated:Delta",))


def change_picture(psi, target):
    """Resample psi in another picture via theta = log p = asinh(p1/m)."""
    src = psi.grid
    theta_t = target.theta()
    coords = src.from_theta(theta_t)
    if psi.func is not None:
        f = psi.func
        func = lambda v, f=f: f(src.from_theta(target.theta(v)))
        return GridFunction(target, f(coords), func, psi.flags)
    theta_s = src.theta()
    w = np.abs(psi.samples) ** 2 * src.weights
    outside = (theta_s < theta_t[0] - 1e-12) | (theta_s > theta_t[-1] + 1e-12)
    if np.sum(w[outside]) > LOST_MASS_TOL * max(np.sum(w), 1e-300):
        raise ValueError("target grid does not cover the image of the source grid")
    if len(theta_s) == len(theta_t) and np.allclose(theta_s, theta_t, rtol=0, atol=1e-12):
        return GridFunction(target, psi.samples.copy(), None, psi.flags)
    spline = CubicSpline(theta_s, psi.samples)
    inside = (theta_t >= theta_s[0]) & (theta_t <= theta_s[-1])
    new = np.where(inside, spline(np.clip(theta_t, theta_s[0], theta_s[-1])), 0)
    return GridFunction(target, new, None, psi.flags + ("interpolated:change_picture",))


def _residual(a, b, ref):
    d = GridFunction(a.grid, a.samples - b.samples)
    scale = ref.norm()
    return d.norm() / scale if scale > 0 else d.norm()


def borchers_check(psi, t, x):
    """Relative residuals of Delta(t)T(x)Delta(-t) = T(e^{-2 pi t} x) and JT(x)J = T(-x)."""
    lhs = apply_operator(OperatorTag.Delta(t),
                         apply_operator(OperatorTag.T(x), apply_operator(OperatorTag.Delta(-t), psi)))
    rhs = apply_operator(OperatorTag.T(math.exp(-2 * math.pi * t) * x), psi)
    jl = apply_operator(OperatorTag.J(), apply_operator(OperatorTag.T(x), apply_operator(OperatorTag.J(), psi)))
    jr = apply_operator(OperatorTag.T(-x), psi)
    return {"modular": _residual(lhs, rhs, psi), "conjugation": _residual(jl, jr, psi),
            "interpolated": any(fl.startswith("interpolated") for fl in lhs.flags)}


def strip_check(spec, t_grid, p0=(0.5, 1.0, 2.0), n_lambda=21):
    """Bound |phi| <= 1 on the rotated rays and the boundary identity at lambda = 1/2."""
    t = np.asarray(t_grid, dtype=float)
    lam = np.linspace(0.0, 0.5, n_lambda)
    max_mod, boundary = 0.0, 0.0
    for q in p0:
        radii = q * np.exp(2 * math.pi * t)
        z = radii[:, None] * np.exp(2j * math.pi * lam[None, :])
        vals = evaluate(spec, z.ravel())
        max_mod = max(max_mod, float(np.max(np.abs(vals))))
        top = evaluate(spec, (-radii).astype(complex))
        bottom = evaluate(spec, radii.astype(complex))
        boundary = max(boundary, float(np.max(np.abs(top - np.conj(bottom)))))
    return {"max_modulus": max_mod, "boundary_residual": boundary,
            "passed": max_mod <= 1 + 1e-8 and boundary < 1e-10}


def two_dim_endomorphism(masses, per_mass, psis):
    """Apply phi_m(m p / 2) blockwise over a finite mass list."""
    masses = list(masses)
    if not (len(masses) == len(per_mass) == len(psis)):
        raise ValueError("length mismatch between masses, specs and vectors")
    if any(m <= 0 for m in masses) or any(b <= a for a, b in zip(masses, masses[1:])):
        raise ValueError("masses must be positive and strictly increasing")
    out = []
    for m, spec, psi in zip(masses, per_mass, psis):
        if psi.grid.picture != "lightray":
            raise ValueError("blocks must be lightray grid functions")
        mult = lambda v, m=m, spec=spec: evaluate(spec, (0.5 * m * v).astype(complex))
        func = None if psi.func is None else (lambda v, f=psi.func, mult=mult: mult(v) * f(v))
        out.append(GridFunction(psi.grid, mult(psi.grid.points) * psi.samples, func, psi.flags))
    return out


def tensor_square_mass_spectrum(m0, grid, bins=64):
    """Masses m0 sqrt(2 + p/q + q/p) over grid x grid."""
    g = np.asarray(grid, dtype=float)
    if np.any(g <= 0):
        raise ValueError("grid must be strictly positive")
    p, q = np.meshgrid(g, g, indexing="ij")
    # 2 + (sqrt p - sqrt q)^2 / sqrt(pq) never rounds below 2
    mass = m0 * (2.0 + (np.sqrt(p) - np.sqrt(q)) ** 2 / np.sqrt(p * q))
    i, j = np.unravel_index(np.argmin(mass), mass.shape)
    counts, edges = np.histogram(mass, bins=bins)
    return {
        "min": float(mass[i, j]),
        "argmin": [float(g[i]), float(g[j])],
        "max": float(mass.max()),
        "below_threshold": int(np.sum(mass < 2 * m0)),
        "histogram": {"edges": edges.tolist(), "counts": counts.tolist()},
        "empty_bins": int(np.sum(counts == 0)),
    }
