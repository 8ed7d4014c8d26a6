"""Classification of minimal localization radii from factorization data."""
import math
from dataclasses import dataclass
from itertools import combinations_with_replacement

from .inner_fn import (
    SpecError,
    convergence_exponent,
    gamma_transform,
    is_gamma_invariant,
    momentum_zero_transform,
    product,
    validate_and_generate,
)

# exponent estimates within this distance of 1 are treated as undecided
EXPONENT_MARGIN = 0.1
EXACT_TOL = 1e-12


@dataclass(frozen=True)
class RadiusClassification:
    kind: str  # exact | lower_bound | infinite | unknown
    value: float = None
    rule: str = ""
    mass: float = None  # None for the one-dimensional radius
    upper: float = None

    @property
    def decided(self):
        return self.kind in ("exact", "infinite")

    @property
    def radius(self):
        """Radius as a number: inf for infinite, None when undecided."""
        if self.kind == "exact":
            return self.value
        if self.kind == "infinite":
            return math.inf
        return None

    def as_dict(self):
        out = {"kind": self.kind, "value": self.value, "rule": self.rule,
               "dimension": 1 if self.mass is None else 2}
        if self.mass is not None:
            out["mass"] = self.mass
        if self.upper is not None:
            out["upper"] = self.upper
        return out


def exponent_of(spec):
    """Convergence exponent of the zeros in use.

    An explicit list without generators is a finite Blaschke product, so its
    exponent is 0 whatever a counting fit over the list would suggest.
    """
    zs = spec.zero_set
    if not zs.generators:
        return 0.0, {"method": "finite", "zeros": len(zs.explicit)}
    return convergence_exponent(zs)


def classify_1d(spec):
    spec = validate_and_generate(spec)
    half_x = spec.translation / 2
    if spec.atoms:
        return RadiusClassification("infinite", rule="nonzero singular measure")
    rho, _ = exponent_of(spec)
    if rho > 1 + EXPONENT_MARGIN:
        return RadiusClassification("infinite", rule=f"convergence exponent {rho:.3g} > 1")
    if rho < 1 - EXPONENT_MARGIN:
        return RadiusClassification("exact", half_x, rule=f"convergence exponent {rho:.3g} < 1: radius x/2")
    sin = [g for g in spec.generators if g.kind == "sin_ratio" and not g.reflected]
    if len(sin) == 1 and len(spec.generators) == 1 and not spec.zero_set.explicit:
        nu = sin[0]["nu"]
        if spec.translation == 0:
            return RadiusClassification("exact", nu, rule="sine ratio family: radius nu")
        # sub-additivity bounds from below by both factors
        return RadiusClassification("unknown", max(nu, half_x), rule="sine ratio times translation")
    if any(g.kind == "gamma_example" for g in spec.generators) and is_gamma_invariant(spec):
        return RadiusClassification("infinite", rule="gamma invariant with infinitely many zeros")
    return RadiusClassification("unknown", half_x, rule="exponent near 1: lower bound x/2 only")


def _x_of_gamma(spec):
    return spec.atom_mass_at_zero()


def classify_2d(spec, m):
    if not m > 0:
        raise SpecError("mass must be positive")
    spec = validate_and_generate(spec)
    if any(a.location != 0.0 for a in spec.atoms):
        return RadiusClassification("infinite", rule="singular measure not concentrated at 0", mass=m)
    lower = 0.5 * max(spec.translation, _x_of_gamma(spec))
    gammas = [g for g in spec.generators if g.kind == "gamma_example"]
    if gammas and not spec.atoms and spec.translation == 0 and is_gamma_invariant(spec):
        rho, _ = convergence_exponent(momentum_zero_transform(spec.zero_set, m))
        if rho < 1 - EXPONENT_MARGIN:
            return RadiusClassification(
                "exact", 0.0, rule=f"momentum-picture zeros have exponent {rho:.3g} < 1", mass=m)
    r1 = classify_1d(spec)
    r2 = classify_1d(gamma_transform(spec))
    uppers = [r.value for r in (r1, r2) if r.kind == "exact"]
    if not uppers:
        return RadiusClassification("unknown", lower, rule="no finite one-dimensional radius", mass=m)
    upper = min(uppers)
    if abs(upper - lower) <= EXACT_TOL * max(1.0, upper):
        return RadiusClassification("exact", lower, rule="lower bound max(x, x_gamma)/2 meets upper bound", mass=m)
    return RadiusClassification("lower_bound", lower, rule="max(x, x_gamma)/2 below min of 1d radii",
                                mass=m, upper=upper)


def relations_suite(catalog, m=1.0):
    """Check sub-additivity over pairs and the 2d <= min(1d) bound.

    catalog maps names to specs. Returns a report with per-check entries.
    """
    names = list(catalog)
    specs = {k: validate_and_generate(v) for k, v in catalog.items()}
    one = {k: classify_1d(s) for k, s in specs.items()}
    checks, violations = [], []
    for a, b in combinations_with_replacement(names, 2):
        ra, rb = one[a].radius, one[b].radius
        if not (one[a].decided and one[b].decided):
            continue
        rp = classify_1d(product(specs[a], specs[b]))
        entry = {"pair": [a, b], "r1": ra, "r2": rb, "product": rp.as_dict()}
        lo, hi = max(ra, rb), ra + rb
        if rp.decided:
            r = rp.radius
            entry["status"] = "ok" if lo - EXACT_TOL <= r <= hi + EXACT_TOL else "violation"
        elif rp.value is not None and rp.value > hi + EXACT_TOL:
            entry["status"] = "violation"
        else:
            entry["status"] = "undecided"
        checks.append(entry)
        if entry["status"] == "violation":
            violations.append(entry)
    for k, s in specs.items():
        two = classify_2d(s, m)
        decided = [r for r in (one[k], classify_1d(gamma_transform(s))) if r.decided]
        cap = min(r.radius for r in decided) if decided else None
        entry = {"spec": k, "two_dim": two.as_dict(), "min_one_dim": cap}
        if two.decided and cap is not None:
            entry["status"] = "ok" if two.radius <= cap + EXACT_TOL else "violation"
        else:
            entry["status"] = "undecided"
        checks.append(entry)
        if entry["status"] == "violation":
            violations.append(entry)
    return {"checks": checks, "violations": len(violations), "passed": not violations}
