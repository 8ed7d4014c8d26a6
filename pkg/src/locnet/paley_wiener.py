"""Support analysis of skew-symmetric momentum functions and membership tests.

A lightray vector psi (p > 0) is extended to the whole axis by
psi_s(-p) = conj psi_s(p); its inverse transform is then real, and its
support decides membership in interval subspaces.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .fourier import inverse_ft, position_nodes
from .inner_fn import evaluate
from .reps import GridDescriptor, GridFunction, OperatorTag, apply_operator

DEFAULT_N = 8192
DEFAULT_DX = 1.0 / 256
EDGE_FRACTION = 1.0 / 16  # outer part of the x window watched for aliasing


@dataclass(frozen=True)
class Tolerances:
    support: float = 1e-6
    reality: float = 1e-8
    slack_cells: int = 1
    aliasing: float = 1e-8

    def as_dict(self):
        return {"support": self.support, "reality": self.reality,
                "slack_cells": self.slack_cells, "aliasing": self.aliasing}


@dataclass(frozen=True)
class SupportProfile:
    x_grid: np.ndarray
    density: np.ndarray  # |g|^2 dx per cell
    dx: float
    reality_residual: float
    aliasing: bool

    @property
    def total(self):
        return float(np.sum(self.density))

    def outside_interval(self, a, b):
        inside = (self.x_grid >= a) & (self.x_grid <= b)
        return float(np.sum(self.density[~inside]))

    def outside_mass(self, r, center=0.0):
        return self.outside_interval(center - r, center + r)

    def cumulative_outside(self, center=0.0):
        """(radii, outside mass) at every cell distance from center."""
        d = np.abs(self.x_grid - center)
        order = np.argsort(d, kind="stable")
        inside = np.cumsum(self.density[order])
        return d[order], np.maximum(self.total - inside, 0.0)

    def support_radius(self, eps, center=0.0):
        """Least r with outside_mass(r) <= eps * total; inf if aliased."""
        if self.aliasing:
            return math.inf
        total = self.total
        if total == 0:
            return 0.0
        radii, outside = self.cumulative_outside(center)
        k = int(np.argmax(outside <= eps * total))
        return float(radii[k])

    def support_interval(self, eps):
        """Interval leaving eps/2 of the mass on each side."""
        total = self.total
        c = np.cumsum(self.density)
        lo = int(np.searchsorted(c, 0.5 * eps * total, side="right"))
        hi = int(np.searchsorted(c, (1 - 0.5 * eps) * total, side="left"))
        hi = min(hi, len(c) - 1)
        return float(self.x_grid[lo]), float(self.x_grid[hi])


@dataclass(frozen=True)
class MembershipReport:
    member: bool
    support_leakage: object  # float, or pair in 2d
    reality_residual: float
    type_estimate: object
    tolerances: Tolerances
    interval: tuple = None
    aliasing: bool = False
    degenerate: bool = False
    cutoff: tuple = None
    flags: tuple = field(default_factory=tuple)

    def as_dict(self):
        def num(v):
            if isinstance(v, (tuple, list)):
                return [num(u) for u in v]
            return None if v is None else float(v)
        return {"member": bool(self.member), "degenerate": bool(self.degenerate),
                "support_leakage": num(self.support_leakage),
                "reality_residual": float(self.reality_residual),
                "type_estimate": num(self.type_estimate),
                "interval": num(self.interval), "aliasing": bool(self.aliasing),
                "cutoff": num(self.cutoff), "flags": list(self.flags),
                "tolerances": self.tolerances.as_dict()}


def line_grid(n=DEFAULT_N, dx=DEFAULT_DX):
    return GridDescriptor.line(n, 2 * math.pi / (n * dx))


def skew_extend(psi, n=DEFAULT_N, dx=DEFAULT_DX):
    """Skew-symmetric extension onto a uniform symmetric p grid.

    Exact when psi carries its function; otherwise cubic interpolation in
    log p, with zero outside the lightray range (the declared cutoff).
    """
    return _skew(psi, n, dx)[0]


def _skew(psi, n, dx):
    if psi.grid.picture != "lightray":
        raise ValueError("skew_extend expects a lightray grid function")
    grid = line_grid(n, dx)
    p = grid.points
    pos = np.abs(p)
    if psi.func is not None:
        vals = psi.func(pos)
        flags = psi.flags
        cutoff = (0.0, float(pos.max()))
    else:
        u = psi.grid.points
        spline = CubicSpline(np.log(u), psi.samples)
        lp = np.log(pos)
        inside = (lp >= math.log(u[0])) & (lp <= math.log(u[-1]))
        vals = np.where(inside, spline(np.clip(lp, math.log(u[0]), math.log(u[-1]))), 0)
        flags = psi.flags + ("interpolated:skew_extend",)
        cutoff = (float(u[0]), float(min(u[-1], pos.max())))
    vals = np.asarray(vals, dtype=complex)
    out = np.where(p > 0, vals, np.conj(vals))
    return GridFunction(grid, out, None, flags), cutoff


def support_profile(psi_s, tol=Tolerances()):
    grid = psi_s.grid
    if grid.picture not in ("line", "momentum"):
        raise ValueError("support_profile needs a uniform symmetric grid")
    n = grid.n
    if n & (n - 1):
        raise ValueError("grid size must be a power of two")
    g = inverse_ft(psi_s.samples, grid.step)
    x = position_nodes(n, grid.step)
    dx = x[1] - x[0]
    density = np.abs(g) ** 2 * dx
    norm = np.linalg.norm(g)
    reality = float(np.linalg.norm(g.imag) / norm) if norm > 0 else 0.0
    half = n * dx / 2
    edge = np.abs(x) >= half * (1 - EDGE_FRACTION)
    total = density.sum()
    aliasing = bool(total > 0 and density[edge].sum() > tol.aliasing * total)
    return SupportProfile(x, density, float(dx), reality, aliasing)


def _degenerate(tol, interval, pair=False):
    z = (0.0, 0.0) if pair else 0.0
    return MembershipReport(True, z, 0.0, z, tol, interval, degenerate=True, flags=("degenerate:zero vector",))


def membership_1d(psi, interval, tol=Tolerances(), n=DEFAULT_N, dx=DEFAULT_DX):
    """Is psi in the interval subspace? Endpoints may be +-inf (half-lines)."""
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise ValueError("interval must have a < b")
    if psi.norm() == 0:
        return _degenerate(tol, (a, b))
    ext, cutoff = _skew(psi, n, dx)
    prof = support_profile(ext, tol)
    slack = tol.slack_cells * prof.dx
    leak = prof.outside_interval(a - slack, b + slack) / prof.total
    member = leak <= tol.support and prof.reality_residual <= tol.reality and not prof.aliasing
    return MembershipReport(bool(member), leak, prof.reality_residual, prof.support_radius(tol.support),
                            tol, (a, b), prof.aliasing, cutoff=cutoff, flags=ext.flags)


def deformed_membership(psi, spec, interval, tol=Tolerances(), n=DEFAULT_N, dx=DEFAULT_DX):
    """psi lies in the deformed interval subspace iff psi and psi/phi are members."""
    first = membership_1d(psi, interval, tol, n, dx)
    phi = lambda v: evaluate(spec, np.asarray(v, dtype=complex))
    func = None if psi.func is None else (lambda v, f=psi.func: f(v) / phi(v))
    quotient = GridFunction(psi.grid, psi.samples / phi(psi.grid.points), func, psi.flags)
    second = membership_1d(quotient, interval, tol, n, dx)
    return {"member": first.member and second.member, "psi": first, "quotient": second}


def cauchy_decompose(psi, m):
    """psi_plus = (1 + Gamma) psi / 2, psi_minus = (1 - Gamma) psi / (2 i omega)."""
    grid = psi.grid
    if grid.picture != "momentum":
        raise ValueError("cauchy_decompose expects the momentum picture")
    if not m > 0:
        raise ValueError("mass must be positive")
    omega = np.sqrt(grid.points ** 2 + m * m)
    gamma = np.conj(psi.samples[::-1])
    plus = 0.5 * (psi.samples + gamma)
    minus = (psi.samples - gamma) / (2j * omega)
    return GridFunction(grid, plus, None, psi.flags), GridFunction(grid, minus, None, psi.flags)


def membership_2d(psi, r, m, tol=Tolerances(), center=(0.0, 0.0)):
    """Membership in the double cone of radius r around center = (x_plus, x_minus)."""
    if not r > 0:
        raise ValueError("radius must be positive")
    interval = (-float(r), float(r))
    if psi.norm() == 0:
        return _degenerate(tol, interval, pair=True)
    if center[0] or center[1]:
        psi = apply_operator(OperatorTag.Tm(-center[0], -center[1], m), psi)
    plus, minus = cauchy_decompose(psi, m)
    leaks, types, real = [], [], 0.0
    aliasing = False
    for part in (plus, minus):
        if part.norm() == 0:
            leaks.append(0.0)
            types.append(0.0)
            continue
        prof = support_profile(part, tol)
        slack = tol.slack_cells * prof.dx
        leaks.append(prof.outside_interval(-r - slack, r + slack) / prof.total)
        types.append(prof.support_radius(tol.support))
        real = max(real, prof.reality_residual)
        aliasing = aliasing or prof.aliasing
    member = max(leaks) <= tol.support and real <= tol.reality and not aliasing
    return MembershipReport(bool(member), tuple(leaks), real, tuple(types), tol, interval, aliasing,
                            flags=psi.flags)


def exp_type_estimate(evaluable, R_window, n=64, log_magnitude=False):
    """Exponential type from growth along the imaginary axis.

    Fits log|psi(+-iR)| = tau R + k log R + c on both rays and returns the
    larger tau; the log R term absorbs polynomial factors.
    """
    lo, hi = float(R_window[0]), float(R_window[1])
    if not 0 < lo < hi:
        raise ValueError("window must satisfy 0 < R_lo < R_hi")
    R = np.linspace(lo, hi, n)
    design = np.column_stack([R, np.log(R), np.ones_like(R)])
    taus = []
    for sgn in (1, -1):
        v = np.asarray(evaluable(sgn * 1j * R))
        y = v.real if log_magnitude else np.log(np.abs(v))
        if not np.all(np.isfinite(y)):
            raise ValueError("evaluator returned non-finite values")
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        taus.append(coef[0])
    return float(max(taus))
