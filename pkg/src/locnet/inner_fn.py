"""Symmetric inner functions on the upper half-plane.

A function is stored through its factorization data

    phi(p) = sign * exp(i p x) * B(p) * S(p)

with Blaschke zeros kept in the closed right quadrant (a zero with positive
real part stands for the pair p, -conj(p)) and the singular factor S built
from point masses on [0, inf) (a mass at t > 0 stands for the pair t, -t).
"""
import math
import warnings
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial import cKDTree

# fewer zeros than this and no generator: treat the list as a finite product
FIT_MIN_ZEROS = 8
# a cluster of this many zeros inside a small disc signals a finite limit point
CLUSTER_SIZE = 8
CLUSTER_RADIUS = 1e-2
IMAG_TOL = 1e-15


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    """Zero family produced on demand.

    kind is 'sin_ratio' (params nu, q, count) or 'gamma_example'
    (params beta, count, m). reflected marks the image under the
    involution gamma for families that are not gamma invariant.
    """
    kind: str
    params: tuple
    reflected: bool = False

    def __getitem__(self, name):
        return dict(self.params)[name]

    @classmethod
    def sin_ratio(cls, nu, q, count=64):
        return cls("sin_ratio", (("count", int(count)), ("nu", float(nu)), ("q", float(q))))

    @classmethod
    def gamma_example(cls, beta, count=400, m=2.0):
        return cls("gamma_example", (("beta", float(beta)), ("count", int(count)), ("m", float(m))))

    def materialize(self):
        n = np.arange(self["count"])
        if self.kind == "sin_ratio":
            z = (1j * self["q"] + np.pi * n) / self["nu"]
        elif self.kind == "gamma_example":
            k = n + 1.0
            small = k ** (-self["beta"]) * np.exp(1j / k)
            # interleave p_k with 1/conj(p_k) so every prefix stays gamma closed
            z = np.empty(2 * len(k), dtype=complex)
            z[0::2] = small
            z[1::2] = 1.0 / np.conj(small)
        else:
            raise SpecError(f"unknown generator kind {self.kind!r}")
        if self.reflected:
            z = 1.0 / np.conj(z)
        return z

    @property
    def exponent(self):
        if self.kind == "sin_ratio" and not self.reflected:
            return 1.0
        # reflected sin_ratio accumulates at 0, gamma_example at 0 and infinity
        return math.inf

    @property
    def imaginary_zero_count(self):
        return 1 if self.kind == "sin_ratio" else 0

    def closed_form(self, p):
        """Closed form of the Blaschke product of the family, or None."""
        if self.kind != "sin_ratio":
            return None
        if self.reflected:
            # conj of the unreflected value at 1/conj(p); the sign absorbs the
            # single purely imaginary zero
            w = 1.0 / np.conj(p)
            return -np.conj(_sin_ratio(w, self["nu"], self["q"]))
        return _sin_ratio(p, self["nu"], self["q"])


def _sin_ratio(p, nu, q):
    # sin(nu p - iq) / sin(nu p + iq) = -(z - a)/(1 - a z), z = exp(2i nu p)
    p = np.asarray(p, dtype=complex)
    a = math.exp(-2.0 * q)
    with np.errstate(over="ignore", invalid="ignore"):
        z = np.exp(2j * nu * p)
        w = np.exp(-2j * nu * p)
        small = np.abs(z) <= 1.0
        out = np.where(small, -(z - a) / (1.0 - a * z), -(1.0 - a * w) / (w - a))
    return out


@dataclass(frozen=True)
class ZeroSet:
    explicit: tuple = ()
    generators: tuple = ()

    @cached_property
    def zeros(self):
        parts = [np.asarray(self.explicit, dtype=complex).reshape(-1)]
        parts += [g.materialize() for g in self.generators]
        z = np.concatenate(parts)
        z.setflags(write=False)
        return z

    def __len__(self):
        return len(self.zeros)


@dataclass(frozen=True)
class Atom:
    location: float
    mass: float


@dataclass(frozen=True)
class InnerFunctionSpec:
    sign: int = 1
    translation: float = 0.0
    zero_set: ZeroSet = field(default_factory=ZeroSet)
    atoms: tuple = ()
    truncation_order: int = None

    @property
    def zeros(self):
        z = self.zero_set.zeros
        n = len(z) if self.truncation_order is None else self.truncation_order
        return z[:n]

    @property
    def generators(self):
        return self.zero_set.generators

    def atom_mass_at_zero(self):
        return sum(a.mass for a in self.atoms if a.location == 0.0)

    def blaschke_partial_sums(self):
        """Cumulative sum of Im p / (1 + |p|^2) over zeros, mirrors counted."""
        z = self.zeros
        weight = np.where(np.abs(z.real) > IMAG_TOL * np.abs(z), 2.0, 1.0)
        return np.cumsum(weight * z.imag / (1.0 + np.abs(z) ** 2))


def fold(z):
    """Move zeros into the re >= 0 half using the pairing p <-> -conj(p)."""
    z = np.asarray(z, dtype=complex)
    return np.where(z.real < 0, -np.conj(z), z)


def _merge_atoms(atoms):
    merged = {}
    for a in atoms:
        t = abs(float(a.location))
        merged[t] = merged.get(t, 0.0) + float(a.mass)
    return tuple(Atom(t, m) for t, m in sorted(merged.items()))


def validate_and_generate(spec):
    """Check a raw spec and return its normalized form.

    Generator zeros are materialized, explicit zeros folded into re >= 0,
    atoms folded to t >= 0 and merged, truncation_order defaulted.
    """
    if spec.sign not in (1, -1):
        raise SpecError(f"sign must be +1 or -1, got {spec.sign}")
    x = float(spec.translation)
    if not math.isfinite(x) or x < 0:
        raise SpecError(f"negative translation {x}")
    for a in spec.atoms:
        if not (math.isfinite(a.mass) and a.mass > 0):
            raise SpecError(f"atom mass must be positive, got {a.mass}")
        if not math.isfinite(a.location):
            raise SpecError("atom location must be finite")
    for g in spec.generators:
        if g.kind == "sin_ratio":
            if g["nu"] <= 0 or g["q"] <= 0:
                raise SpecError("sin_ratio needs nu > 0 and q > 0")
        elif g.kind == "gamma_example":
            if g["beta"] <= 1 or g["m"] <= 0:
                raise SpecError("gamma_example needs beta > 1 and m > 0")
        else:
            raise SpecError(f"unknown generator kind {g.kind!r}")
        if g["count"] < 1:
            raise SpecError("generator count must be positive")
    explicit = np.asarray(spec.zero_set.explicit, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(explicit)):
        raise SpecError("zeros must be finite")
    if np.any(explicit.imag <= 0):
        raise SpecError("lower half-plane zero")
    zs = ZeroSet(tuple(complex(z) for z in fold(explicit)), tuple(spec.generators))
    n = len(zs.zeros)
    order = n if spec.truncation_order is None else int(spec.truncation_order)
    if not 0 <= order <= n:
        raise SpecError(f"truncation_order {order} exceeds the {n} available zeros")
    return InnerFunctionSpec(int(spec.sign), x, zs, _merge_atoms(spec.atoms), order)


def _check_poles(z, p):
    if len(z) == 0 or p.size == 0:
        return
    poles = np.concatenate([np.conj(z), -z])
    d = np.abs(p.reshape(-1, 1) - poles.reshape(1, -1)) if p.size * len(poles) < 4_000_000 else None
    if d is None:
        tree = cKDTree(np.column_stack([poles.real, poles.imag]))
        dist, _ = tree.query(np.column_stack([p.real.ravel(), p.imag.ravel()]))
        hit = np.any(dist < 1e-14 * (1 + np.abs(p.ravel())))
    else:
        hit = np.any(d < 1e-14 * (1 + np.abs(p.reshape(-1, 1))))
    if hit:
        raise SpecError("evaluation at a pole")


def blaschke(zeros, p):
    """Paired Blaschke product over the given zero representatives."""
    p = np.asarray(p, dtype=complex)
    out = np.ones_like(p)
    for z in np.asarray(zeros, dtype=complex):
        if abs(z.real) <= IMAG_TOL * abs(z):
            out = out * (p - z) / (p - np.conj(z))
        else:
            out = out * ((p - z) * (p + np.conj(z))) / ((p - np.conj(z)) * (p + z))
    return out


def singular_factor(atoms, p):
    p = np.asarray(p, dtype=complex)
    expo = np.zeros_like(p)
    for a in atoms:
        t = a.location
        if t == 0.0:
            if np.any(p == 0):
                raise SpecError("evaluation at an atom location")
            expo = expo + a.mass / p
        else:
            if np.any(np.abs(p * p - t * t) == 0):
                raise SpecError("evaluation at an atom location")
            expo = expo + a.mass * ((1 + p * t) / (p - t) + (1 - p * t) / (p + t))
    return np.exp(-1j * expo)


def evaluate(spec, p, method="auto"):
    """Value of phi at p (scalar or array).

    method='auto' uses closed forms for generator families that have one,
    method='blaschke' always uses the truncated paired product.
    """
    scalar = np.ndim(p) == 0
    p = np.atleast_1d(np.asarray(p, dtype=complex))
    closed = [g for g in spec.generators if g.kind == "sin_ratio"] if method == "auto" else []
    if closed:
        # zeros not covered by a closed form, in storage order
        skip = set()
        start = len(spec.zero_set.explicit)
        for g in spec.generators:
            n = len(g.materialize())
            if g in closed:
                skip.update(range(start, start + n))
            start += n
        idx = [i for i in range(len(spec.zero_set.zeros)) if i not in skip]
        z = spec.zero_set.zeros[idx]
    else:
        z = spec.zeros
    _check_poles(z, p)
    growth = -(p.imag * spec.translation)
    if np.any(growth > 700):
        raise SpecError("overflow in exp(i p x)")
    val = spec.sign * np.exp(1j * p * spec.translation) * blaschke(z, p)
    for g in closed:
        val = val * g.closed_form(p)
    val = val * singular_factor(spec.atoms, p)
    return val[0] if scalar else val


def symmetry_check(target, grid, tol=1e-10):
    """Unimodularity and reflection residuals on a real grid.

    target is a spec or any callable p -> phi(p).
    """
    f = target if callable(target) else (lambda p: evaluate(target, p))
    grid = np.asarray(grid, dtype=float)
    v = f(grid.astype(complex))
    vm = f((-grid).astype(complex))
    modulus = float(np.max(np.abs(np.abs(v) - 1.0)))
    reflection = float(np.max(np.abs(vm - np.conj(v))))
    return {
        "modulus_residual": modulus,
        "reflection_residual": reflection,
        "tolerance": tol,
        "passed": modulus < tol and reflection < tol,
    }


def gamma_transform(spec):
    """Spec of p -> conj(phi(1/conj p)).

    Zeros go to 1/conj(p), the translation becomes a mass at 0 and a mass at
    0 becomes the translation, masses at t > 0 move to 1/t unchanged. Each
    purely imaginary zero flips the sign.
    """
    explicit = np.asarray(spec.zero_set.explicit, dtype=complex).reshape(-1)
    new_explicit = tuple(complex(z) for z in 1.0 / np.conj(explicit))
    gens = []
    flips = int(np.sum(np.abs(explicit.real) <= IMAG_TOL * np.abs(explicit)))
    for g in spec.generators:
        if g.kind == "gamma_example":
            gens.append(g)
        else:
            gens.append(replace(g, reflected=not g.reflected))
            flips += g.imaginary_zero_count
    atoms = []
    translation = 0.0
    for a in spec.atoms:
        if a.location == 0.0:
            translation += a.mass
        else:
            atoms.append(Atom(1.0 / a.location, a.mass))
    if spec.translation > 0:
        atoms.append(Atom(0.0, spec.translation))
    sign = spec.sign * (-1) ** flips
    return InnerFunctionSpec(sign, translation, ZeroSet(new_explicit, tuple(gens)),
                             _merge_atoms(atoms), spec.truncation_order)


def product(a, b):
    """Spec of the pointwise product phi_a * phi_b."""
    explicit = tuple(a.zero_set.explicit) + tuple(b.zero_set.explicit)
    gens = tuple(a.generators) + tuple(b.generators)
    if len(a.zeros) < len(a.zero_set.zeros) or len(b.zeros) < len(b.zero_set.zeros):
        # a truncated factor: keep exactly the zeros in use
        explicit = tuple(complex(z) for z in np.concatenate([a.zeros, b.zeros]))
        gens = ()
    zs = ZeroSet(explicit, gens)
    return InnerFunctionSpec(a.sign * b.sign, a.translation + b.translation, zs,
                             _merge_atoms(a.atoms + b.atoms), len(zs.zeros))


def same_spec(a, b, tol=1e-9):
    """Structural equality of normalized specs up to tol."""
    if a.sign != b.sign or abs(a.translation - b.translation) > tol:
        return False
    if len(a.atoms) != len(b.atoms):
        return False
    for u, v in zip(a.atoms, b.atoms):
        if abs(u.location - v.location) > tol * max(1.0, u.location) or abs(u.mass - v.mass) > tol:
            return False
    if a.generators != b.generators:
        return False
    return _multiset_close(np.asarray(a.zero_set.explicit, dtype=complex),
                           np.asarray(b.zero_set.explicit, dtype=complex), tol)


def _multiset_close(u, v, tol):
    if len(u) != len(v):
        return False
    if len(u) == 0:
        return True
    # log-polar coordinates keep tiny and huge zeros on the same footing
    cu = np.column_stack([np.log(np.abs(u)), np.angle(u)])
    cv = np.column_stack([np.log(np.abs(v)), np.angle(v)])
    cost = np.linalg.norm(cu[:, None, :] - cv[None, :, :], axis=2)
    rows, cols = linear_sum_assignment(cost)
    return bool(np.all(cost[rows, cols] <= tol))


def is_gamma_invariant(spec, tol=1e-9):
    """Structural gamma invariance: zeros closed under 1/conj, x equal to the mass at 0."""
    if abs(spec.translation - spec.atom_mass_at_zero()) > tol:
        return False
    for a in spec.atoms:
        if a.location > 0 and not any(
                abs(b.location - 1.0 / a.location) <= tol * max(1.0, b.location) and abs(b.mass - a.mass) <= tol
                for b in spec.atoms):
            return False
    if any(g.kind != "gamma_example" for g in spec.generators):
        return False
    z = np.asarray(spec.zero_set.explicit, dtype=complex)
    return _multiset_close(z, 1.0 / np.conj(z), tol)


def _limit_point(z):
    """Heuristic test for a finite accumulation point.

    Finite limit points of a Blaschke sequence sit on the real axis, so look
    for CLUSTER_SIZE bounded zeros within CLUSTER_RADIUS of each other and of
    the axis.
    """
    near = z[(z.imag < CLUSTER_RADIUS) & (np.abs(z) < 1.0 / CLUSTER_RADIUS)]
    if len(near) < CLUSTER_SIZE:
        return False
    pts = np.column_stack([near.real, near.imag])
    dist, _ = cKDTree(pts).query(pts, k=CLUSTER_SIZE)
    return bool(np.min(dist[:, -1]) < CLUSTER_RADIUS)


def convergence_exponent(zero_set):
    """Estimate inf{alpha : sum |p_n|^-alpha < inf}.

    Known generator families return their exact exponent, clustered zeros
    return inf, otherwise the slope of log N(R) against log R is fitted.
    Returns (estimate, report).
    """
    gen_exp = max((g.exponent for g in zero_set.generators), default=None)
    if gen_exp is not None and math.isinf(gen_exp):
        return math.inf, {"method": "generator", "zeros": len(zero_set.zeros)}
    z = np.asarray(zero_set.explicit, dtype=complex)
    # repeated zeros add multiplicity, not growth information
    distinct = len(np.unique(np.round(z, 12)))
    if distinct > 2 * FIT_MIN_ZEROS and _multiset_close(z, 1.0 / np.conj(z), 1e-9):
        # an infinite gamma-closed sequence has exponent 0 or inf, and it
        # cannot be 0 once zeros reach both 0 and infinity
        return math.inf, {"method": "gamma_closed", "zeros": len(z)}
    if len(z) and _limit_point(z):
        return math.inf, {"method": "limit_point", "zeros": len(z), "min_modulus": float(np.min(np.abs(z)))}
    if distinct < FIT_MIN_ZEROS:
        if gen_exp is not None:
            return gen_exp, {"method": "generator", "zeros": len(zero_set.zeros)}
        raise SpecError(f"need at least {FIT_MIN_ZEROS} zeros or a generator, got {len(z)}")
    # mirror partners double the count but leave the slope unchanged
    r = np.sort(np.abs(z))
    n = np.arange(1, len(r) + 1)
    lo = len(r) // 4
    logr, logn = np.log(r[lo:]), np.log(n[lo:])
    if np.ptp(logr) < 1e-12:
        return math.inf, {"method": "limit_point", "zeros": len(z), "min_modulus": float(r[0])}
    slope, intercept = np.polyfit(logr, logn, 1)
    resid = logn - (slope * logr + intercept)
    report = {
        "method": "fit",
        "zeros": len(z),
        "fit_range": [float(r[lo]), float(r[-1])],
        "fit_rms": float(np.sqrt(np.mean(resid ** 2))),
    }
    est = float(slope)
    if gen_exp is not None:
        est = max(est, gen_exp)
    return est, report


def canonical_product_eval(zero_set, p, side="+"):
    """Genus-zero canonical product Q+(p) = prod (1 - p/p_n) or Q-(p) = conj Q+(conj p).

    The product runs over all represented zeros including mirror partners.
    """
    z = np.asarray(zero_set.zeros, dtype=complex)
    if len(np.unique(np.round(z, 12))) >= FIT_MIN_ZEROS or zero_set.generators:
        rho, _ = convergence_exponent(zero_set)
        if rho >= 1:
            warnings.warn(f"canonical product with convergence exponent {rho:.3g} >= 1", stacklevel=2)
    p = np.asarray(p, dtype=complex)
    roots = z if side == "+" else np.conj(z)
    out = np.ones_like(p)
    for w in roots:
        if abs(w.real) <= IMAG_TOL * abs(w):
            out = out * (1 - p / w)
        else:
            # mirror of w is -conj(w)
            out = out * (1 - p / w) * (1 + p / np.conj(w))
    return out


def momentum_zero_transform(zero_set, m):
    """Zeros p - m^2/(4p) of the momentum-picture factor, folded to re >= 0."""
    if m <= 0:
        raise SpecError("mass must be positive")
    z = np.asarray(zero_set.zeros, dtype=complex)
    if np.any(z == 0):
        raise SpecError("zero at origin")
    t = fold(z - m * m / (4.0 * z))
    return ZeroSet(tuple(complex(w) for w in t))


# -- plain-mapping file format --------------------------------------------

def spec_from_mapping(data):
    zeros = [complex(float(z["re"]), float(z["im"])) for z in data.get("zeros", []) or []]
    gens = []
    gdatas = data.get("generators") or ([data["generator"]] if data.get("generator") else [])
    for gdata in gdatas:
        kind = gdata.get("kind", "none")
        params = dict(gdata.get("parameters", {}) or {})
        if kind == "none":
            continue
        if kind == "sin_ratio":
            g = Generator.sin_ratio(params["nu"], params["q"], params.get("count", 64))
        elif kind == "gamma_example":
            g = Generator.gamma_example(params["beta"], params.get("count", 400), params.get("m", 2.0))
        else:
            raise SpecError(f"unknown generator kind {kind!r}")
        gens.append(replace(g, reflected=bool(gdata.get("reflected", False))))
    atoms = tuple(Atom(float(a["location"]), float(a["mass"])) for a in data.get("atoms", []) or [])
    raw = InnerFunctionSpec(
        sign=int(data.get("sign", 1)),
        translation=float(data.get("translation", 0.0)),
        zero_set=ZeroSet(tuple(zeros), tuple(gens)),
        atoms=atoms,
        truncation_order=data.get("truncation_order"),
    )
    return validate_and_generate(raw)


def spec_to_mapping(spec):
    out = {
        "sign": spec.sign,
        "translation": spec.translation,
        "zeros": [{"re": z.real, "im": z.imag} for z in spec.zero_set.explicit],
        "atoms": [{"location": a.location, "mass": a.mass} for a in spec.atoms],
        "truncation_order": spec.truncation_order,
    }
    gens = []
    for g in spec.generators:
        entry = {"kind": g.kind, "parameters": dict(g.params)}
        if g.reflected:
            entry["reflected"] = True
        gens.append(entry)
    if len(gens) == 1:
        out["generator"] = gens[0]
    elif gens:
        out["generators"] = gens
    return out
