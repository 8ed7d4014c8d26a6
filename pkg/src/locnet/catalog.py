"""Named built-in specs covering every classification branch."""
from .inner_fn import Atom, Generator, InnerFunctionSpec, ZeroSet, validate_and_generate

_ENTRIES = {
    "identity": ("phi = 1", lambda: InnerFunctionSpec()),
    "single_zero_at_i": ("Blaschke factor with a zero at i",
                         lambda: InnerFunctionSpec(zero_set=ZeroSet((1j,)))),
    "double_zero_i_2i": ("Blaschke product with zeros i and 2i",
                         lambda: InnerFunctionSpec(zero_set=ZeroSet((1j, 2j)))),
    "translation_x1": ("exp(ip)", lambda: InnerFunctionSpec(translation=1.0)),
    "translation_x2": ("exp(2ip)", lambda: InnerFunctionSpec(translation=2.0)),
    "atom_at_0": ("exp(-i/p)", lambda: InnerFunctionSpec(atoms=(Atom(0.0, 1.0),))),
    "atom_at_1": ("singular factor with unit atoms at +-1", lambda: InnerFunctionSpec(atoms=(Atom(1.0, 1.0),))),
    "sin_ratio_nu_0.25": ("sin(p/4 - i)/sin(p/4 + i)",
                          lambda: InnerFunctionSpec(zero_set=ZeroSet((), (Generator.sin_ratio(0.25, 1.0),)))),
    "sin_ratio_nu_0.5": ("sin(p/2 - i)/sin(p/2 + i)",
                         lambda: InnerFunctionSpec(zero_set=ZeroSet((), (Generator.sin_ratio(0.5, 1.0),)))),
    "sin_ratio_nu_1": ("sin(p - i)/sin(p + i)",
                       lambda: InnerFunctionSpec(zero_set=ZeroSet((), (Generator.sin_ratio(1.0, 1.0),)))),
    "gamma_example": ("gamma-invariant Blaschke product, zeros k^-2 e^(i/k) and mirrors, 400 terms",
                      lambda: InnerFunctionSpec(zero_set=ZeroSet((), (Generator.gamma_example(2.0, 400, 2.0),)))),
}


def names():
    return list(_ENTRIES)


def describe(name):
    return _ENTRIES[name][0]


def get(name):
    if name not in _ENTRIES:
        raise KeyError(f"unknown catalog entry {name!r}")
    return validate_and_generate(_ENTRIES[name][1]())


def all_specs():
    return {k: get(k) for k in _ENTRIES}
