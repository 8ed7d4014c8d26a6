"""Command line: analyze, catalog, verify."""
import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__, catalog, suites
from .inner_fn import SpecError, spec_from_mapping, spec_to_mapping, validate_and_generate
from .paley_wiener import DEFAULT_DX, Tolerances, skew_extend, support_profile
from .radius import classify_1d, classify_2d
from .witness import radius_estimate, witness_pair

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2
TASK_ORDER = ("validate", "classify-1d", "classify-2d", "estimate", "witness", "verify")


class InvalidInput(Exception):
    pass


def _plain(obj):
    """Recursively convert numpy scalars and tuples for serialization."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def dump(report, path=None):
    data = _plain(report)
    if path is not None and str(path).endswith(".json"):
        text = json.dumps(data, indent=2) + "\n"
    else:
        text = yaml.safe_dump(data, sort_keys=False, default_flow_style=False)
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
    return text


def write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)


def load_spec(source):
    """Catalog name, path to a spec file, or an inline mapping."""
    if isinstance(source, dict):
        data = source
    elif source in catalog.names():
        return catalog.get(source), source
    else:
        path = Path(str(source))
        if not path.is_file():
            raise InvalidInput(f"spec {source!r} is neither a catalog name nor a readable file")
        try:
            data = yaml.safe_load(path.read_text())
        except (OSError, yaml.YAMLError) as exc:
            raise InvalidInput(f"cannot read spec file {source}: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidInput("spec must be a mapping")
    try:
        return spec_from_mapping(data), str(source) if not isinstance(source, dict) else "inline"
    except (SpecError, KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"invalid spec: {exc}") from exc


def _normalize_tasks(raw):
    """Tasks as a list of (name, params) in pipeline order."""
    tasks = []
    for item in raw or []:
        if isinstance(item, str):
            name, params = item, {}
        elif isinstance(item, dict) and len(item) == 1:
            name, params = next(iter(item.items()))
            params = dict(params or {}) if not isinstance(params, str) else {"suite": params}
        else:
            raise InvalidInput(f"bad task entry {item!r}")
        if name not in TASK_ORDER:
            raise InvalidInput(f"unknown task {name!r}")
        tasks.append((name, params))
    if not tasks:
        raise InvalidInput("request needs at least one task")
    tasks.sort(key=lambda t: TASK_ORDER.index(t[0]))
    return tasks


def _check_params(name, p):
    if name == "classify-2d" and not float(p.get("m", 1.0)) > 0:
        raise InvalidInput("mass must be positive")
    if name == "estimate":
        if not 0 < float(p["r_min"]) < float(p["r_max"]):
            raise InvalidInput("need 0 < r_min < r_max")
        if int(p["steps"]) < 2:
            raise InvalidInput("need at least two r steps")
    if name == "witness" and not float(p.get("a", 0.2)) > 0:
        raise InvalidInput("witness half width must be positive")


def run_pipeline(request, seed=0, out=None):
    """Execute a normalized request. Returns (report, exit code)."""
    spec, label = load_spec(request["spec"])
    tasks = _normalize_tasks(request.get("tasks"))
    n = int(request.get("grid_size", 8192))
    if n < 16 or n & (n - 1):
        raise InvalidInput("grid size must be a power of two")
    tol = Tolerances(support=float(request.get("tolerance_support", Tolerances.support)))
    for name, params in tasks:
        _check_params(name, {**_defaults(name), **params})
    report = {
        "version": __version__,
        "spec_source": label,
        "spec": spec_to_mapping(spec),
        "settings": {"seed": seed, "grid_size": n, "dx": DEFAULT_DX, "tolerances": tol.as_dict()},
        "tasks": [],
    }
    failed = False
    sidecars = []
    stem = None if out is None else Path(out).with_suffix("")
    for name, params in tasks:
        p = {**_defaults(name), **params}
        entry = {"task": name, "params": p}
        try:
            entry["result"], extra = _run_task(name, p, spec, tol, n, seed)
            if entry["result"].get("passed") is False:
                failed = True
            if stem is not None:
                for suffix, rows in extra:
                    path = f"{stem}.{suffix}.csv"
                    write_csv(path, rows)
                    sidecars.append(Path(path).name)
        except (SpecError, ValueError) as exc:
            entry["error"] = str(exc)
            failed = True
        report["tasks"].append(entry)
    report["sidecars"] = sidecars
    report["summary"] = {"passed": not failed,
                         "errors": sum("error" in t for t in report["tasks"])}
    return report, EXIT_FAIL if failed else EXIT_OK


def _defaults(name):
    return {
        "classify-2d": {"m": 1.0},
        "estimate": {"r_min": 0.1, "r_max": 1.0, "steps": 10, "N": 256},
        "witness": {"a": 0.2, "delta": 0.6},
        "verify": {"suite": "all"},
    }.get(name, {})


def _run_task(name, p, spec, tol, n, seed):
    if name == "validate":
        validate_and_generate(spec)
        return {"valid": True, "zeros": len(spec.zeros), "atoms": len(spec.atoms)}, []
    if name == "classify-1d":
        return classify_1d(spec).as_dict(), []
    if name == "classify-2d":
        return classify_2d(spec, float(p["m"])).as_dict(), []
    if name == "estimate":
        r = np.linspace(float(p["r_min"]), float(p["r_max"]), int(p["steps"]))
        res = radius_estimate(spec, r, int(p["N"]), n=n)
        return res.as_dict(), [("estimate", res.csv_rows())]
    if name == "witness":
        w = witness_pair(spec, float(p["a"]), float(p["delta"]), tol, n=n)
        prof = support_profile(skew_extend(w.psi_plus, n), tol)
        radii, outside = prof.cumulative_outside()
        order = np.argsort(prof.x_grid)
        cum = {float(d): float(o) for d, o in zip(radii, outside)}
        rows = [("x", "density", "cumulative_outside")]
        rows += [(f"{x:.10g}", f"{prof.density[i]:.10e}", f"{cum[abs(float(x))]:.10e}")
                 for i, x in zip(order, prof.x_grid[order])]
        return w.as_dict(), [("witness_profile", rows)]
    if name == "verify":
        suite = p["suite"]
        if suite not in suites.SUITES + ("all",):
            raise InvalidInput(f"unknown suite {suite!r}")
        return suites.run(suite, seed, tol=tol), []
    raise InvalidInput(name)


def _request_from_args(args):
    if args.request:
        try:
            req = yaml.safe_load(Path(args.request).read_text())
        except (OSError, yaml.YAMLError) as exc:
            raise InvalidInput(f"cannot read request {args.request}: {exc}") from exc
        if not isinstance(req, dict) or "spec" not in req:
            raise InvalidInput("request must be a mapping with a spec entry")
    else:
        if not args.spec:
            raise InvalidInput("give a request file or --spec")
        req = {"spec": args.spec, "tasks": []}
        for t in (args.tasks or "validate,classify-1d").split(","):
            t = t.strip()
            params = {}
            if t == "classify-2d" and args.mass is not None:
                params["m"] = args.mass
            if t == "estimate":
                params = {k: v for k, v in (("r_min", args.r_min), ("r_max", args.r_max),
                                             ("steps", args.r_steps)) if v is not None}
            req["tasks"].append({t: params} if params else t)
    if args.spec and args.request:
        req["spec"] = args.spec
    if args.grid_size is not None:
        req["grid_size"] = args.grid_size
    if args.tolerance_support is not None:
        req["tolerance_support"] = args.tolerance_support
    return req


def _common(parser):
    parser.add_argument("--out", help="report path (.yaml or .json); stdout if omitted")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--grid-size", type=int)
    parser.add_argument("--tolerance-support", type=float)
    parser.add_argument("--mass", type=float)


def build_parser():
    parser = argparse.ArgumentParser(prog="locnet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", help="run a request file or tasks on a spec")
    a.add_argument("request", nargs="?", help="request file (YAML or JSON)")
    a.add_argument("--spec", help="spec file or catalog name")
    a.add_argument("--tasks", help="comma separated: " + ",".join(TASK_ORDER))
    a.add_argument("--r-min", type=float)
    a.add_argument("--r-max", type=float)
    a.add_argument("--r-steps", type=int)
    _common(a)
    c = sub.add_parser("catalog", help="list built-in specs")
    c.add_argument("--out")
    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=True, choices=suites.SUITES + ("all",))
    _common(v)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "catalog":
            dump({"catalog": [{"name": k, "description": catalog.describe(k),
                               "spec": spec_to_mapping(catalog.get(k))} for k in catalog.names()]}, args.out)
            return EXIT_OK
        if args.command == "verify":
            mass = 1.0 if args.mass is None else args.mass
            if not mass > 0:
                raise InvalidInput("mass must be positive")
            tol = Tolerances() if args.tolerance_support is None else Tolerances(support=args.tolerance_support)
            result = suites.run(args.suite, args.seed, mass, tol)
            dump({"version": __version__, "suite": args.suite, "seed": args.seed, "mass": mass,
                  "tolerances": tol.as_dict(), "result": result}, args.out)
            return EXIT_OK if result["passed"] else EXIT_FAIL
        req = _request_from_args(args)
        report, code = run_pipeline(req, args.seed, args.out)
        dump(report, args.out)
        return code
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
