"""Command line interface: ``normesh {gen,verify,fekete,lsq,dim,table}``.

Exit status is 0 on success, 1 when a certification fails or a numerical
step breaks down, 2 on usage errors (unknown kind, bad flag or parameter).
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from typing import Optional, Sequence

import numpy as np

from .certify import certify
from .errors import DeterminingSetError, NormeshError
from .mesh import Mesh, build_mesh, read_json, write_csv, write_json
from .nodes1d import Family
from .polyspace import approx_fekete, ls_projection, numeric_dimension
from .sections import EXAMPLE_PARAMS, catalog_rows, kinds, make_section

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_ANGLE_PARAM = re.compile(r"^(omega\d*|phi\d*|u|center)$")
_DEGREE_MARK = re.compile(r"(°|deg|degree)", re.IGNORECASE)


class UsageError(Exception):
    pass


def _parse_value(text: str):
    if _DEGREE_MARK.search(text):
        raise UsageError(f"angles are accepted in radians only, got {text!r}")
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_params(items: Optional[Sequence[str]]) -> dict:
    """``['omega=1.04', 'V=[0.1,0,-0.2]']`` -> dict; angles must be radians."""
    out = {}
    for item in items or ():
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        key, text = item.split("=", 1)
        key = key.strip()
        value = _parse_value(text.strip())
        if _ANGLE_PARAM.match(key) and isinstance(value, (int, float)) \
                and abs(value) > 2 * math.pi + 1e-12:
            raise UsageError(f"{key}={value} exceeds 2*pi: angles are accepted in radians only")
        out[key] = value
    return out


def _section(args):
    params = dict(EXAMPLE_PARAMS.get(args.kind, {})) if args.example else {}
    params.update(parse_params(args.param))
    return make_section(args.kind, **params)


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def _write_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)


def _mesh_summary(mesh: Mesh) -> dict:
    return {
        "kind": mesh.spec.kind,
        "n": mesh.n,
        "m": mesh.m,
        "grid_shape": list(mesh.grid_shape),
        "c": mesh.c,
        "constant_class": mesh.spec.signature.constant_class,
        "card": len(mesh),
        "raw_count": mesh.raw_count,
        "distinct_count": mesh.distinct_count,
        "cardinality_bound": mesh.spec.signature.cardinality_bound(mesh.n, mesh.m),
    }


def cmd_gen(args) -> int:
    spec = _section(args)
    mesh = build_mesh(spec, args.n, args.m, family=args.family, dedup=args.dedup)
    if args.out:
        write_json(mesh, args.out)
    if args.csv:
        write_csv(mesh.points, args.csv)
    _emit(_mesh_summary(mesh))
    return EXIT_OK


def cmd_verify(args) -> int:
    mesh = read_json(args.mesh)
    report = certify(mesh, trials=args.trials, seed=args.seed, reference_m=args.ref_m,
                     lp=args.lp, probe_m=args.probe_m)
    data = report.to_dict()
    if args.report:
        _write_json(data, args.report)
    _emit({k: data[k] for k in ("n", "m", "c_theoretical", "max_ratio_observed",
                                "reference_inflation", "lp_constant", "pass")})
    return EXIT_OK if report.passed else EXIT_FAIL


def _probe(mesh: Mesh, probe_m):
    m = 4.0 * mesh.m if probe_m is None else probe_m
    return build_mesh(mesh.spec, mesh.n, m, family=mesh.family, dedup=True), m


def cmd_fekete(args) -> int:
    mesh = read_json(args.mesh)
    probe, pm = _probe(mesh, args.probe_m)
    res = approx_fekete(mesh, probe=probe)
    write_csv(res.points, args.out)
    summary = {"count": len(res.indices), "lebesgue_estimate": res.lebesgue,
               "probe_m": pm, "probe_count": res.probe_count, "abs_det": res.abs_det,
               "indices": res.indices.tolist()}
    if args.report:
        _write_json(summary, args.report)
    _emit({k: summary[k] for k in ("count", "lebesgue_estimate", "probe_m")})
    return EXIT_OK


FUNCTIONS = {
    "one": lambda X: np.ones(len(X)),
    "coord1": lambda X: X[:, 0].copy(),
    "runge": lambda X: 1.0 / (1.0 + 25.0 * np.sum(X * X, axis=1)),
}


def cmd_lsq(args) -> int:
    mesh = read_json(args.mesh)
    probe, pm = _probe(mesh, args.probe_m)
    fit = ls_projection(mesh, FUNCTIONS[args.function](mesh.points), probe=probe)
    summary = fit.summary()
    summary.update(function=args.function, probe_m=pm,
                   probe_sup_error=float(np.max(np.abs(
                       fit(probe.points) - FUNCTIONS[args.function](probe.points)))))
    if args.report:
        _write_json(summary, args.report)
    _emit(summary)
    return EXIT_OK


def cmd_dim(args) -> int:
    info = numeric_dimension(_section(args), args.n, probe_m=args.probe_m)
    _emit(info.to_dict())
    return EXIT_OK


def cmd_table(args) -> int:
    rows = catalog_rows()
    w1 = max(len(r[0]) for r in rows)
    w2 = max(len(r[1]) for r in rows)
    print(f"{'c':<{w1}}  {'card bound':<{w2}}  sections")
    for cls, bound, labels in rows:
        print(f"{cls:<{w1}}  {bound:<{w2}}  {', '.join(labels)}")
    return EXIT_OK


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _factor(text):
    v = float(text)
    if not v > 1:
        raise argparse.ArgumentTypeError("must be > 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="normesh", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def section_flags(sp):
        sp.add_argument("--kind", required=True, choices=sorted(kinds() + ["torus_tile",
                        "geographic_rectangle", "entire_circle"]), metavar="KIND")
        sp.add_argument("--param", action="append", metavar="KEY=VALUE",
                        help="section parameter; angles in radians (repeatable)")
        sp.add_argument("--example", action="store_true",
                        help="start from the catalog example parameters of KIND")

    g = sub.add_parser("gen", help="generate a mesh")
    section_flags(g)
    g.add_argument("--n", type=_positive_int, required=True)
    g.add_argument("--m", type=_factor, required=True)
    g.add_argument("--family", choices=[Family.LOBATTO.value, Family.ZEROS.value],
                   default=Family.LOBATTO.value)
    g.add_argument("--dedup", action="store_true")
    g.add_argument("--out")
    g.add_argument("--csv")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="certify the norming inequality of a mesh")
    v.add_argument("--mesh", required=True)
    v.add_argument("--trials", type=_positive_int, default=1000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--ref-m", type=_factor, default=None)
    v.add_argument("--lp", action="store_true")
    v.add_argument("--probe-m", type=_factor, default=None)
    v.add_argument("--report")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("fekete", help="extract approximate Fekete points")
    f.add_argument("--mesh", required=True)
    f.add_argument("--out", required=True)
    f.add_argument("--probe-m", type=_factor, default=None)
    f.add_argument("--report")
    f.set_defaults(func=cmd_fekete)

    ls = sub.add_parser("lsq", help="discrete least-squares demo")
    ls.add_argument("--mesh", required=True)
    ls.add_argument("--function", choices=sorted(FUNCTIONS), default="runge")
    ls.add_argument("--probe-m", type=_factor, default=None)
    ls.add_argument("--report")
    ls.set_defaults(func=cmd_lsq)

    d = sub.add_parser("dim", help="numerical dimension of P_n on a section")
    section_flags(d)
    d.add_argument("--n", type=_positive_int, required=True)
    d.add_argument("--probe-m", type=_factor, default=4.0)
    d.set_defaults(func=cmd_dim)

    t = sub.add_parser("table", help="print the constant / cardinality catalog")
    t.set_defaults(func=cmd_table)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ValueError, KeyError, OSError) as exc:
        print(f"normesh: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DeterminingSetError as exc:
        print(f"normesh: certification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except NormeshError as exc:
        print(f"normesh: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
