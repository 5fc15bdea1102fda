"""Command-line interface.

Every Monte Carlo command emits a JSON report embedding the fully resolved
configuration (seed, samples, shards), so a run can be replayed exactly;
identical commands with the same seed produce byte-identical reports apart
from the wall-time field.

Exit codes: 0 success, 2 input error, 3 convergence failure.
"""

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import algebra, anomaly, diagram_io, invariants
from .curves import CATALOG_NAMES, LinkCurve, catalog, validate_embedding
from .diagrams import degree as diagram_degree
from .diagrams import enumerate_diagrams, is_principal, is_subprincipal, std_oriented
from .errors import ConvergenceError, DiagramError, EmbeddingError
from .integrate import integrate_diagram
from .mc import default_shards, default_workers
from .strata import enumerate_faces
from .support import S1, circles


def _parse_count(text):
    return int(float(text))


def _load_curve(spec):
    if spec in CATALOG_NAMES:
        return catalog(spec)
    return LinkCurve.from_json(Path(spec).read_text())


def _support(name):
    name = name.upper()
    if name == "S1":
        return S1
    if name.startswith("S1X"):
        return circles(int(name[3:]))
    raise DiagramError(f"unknown support {name!r} (use S1 or S1xN)")


def _emit(report, started, table=False):
    report["wall_time_s"] = round(time.time() - started, 3)
    if table:
        _print_table(report)
        return
    json.dump(report, sys.stdout, indent=1, default=_coerce)
    sys.stdout.write("\n")


def _print_table(report, indent=0):
    pad = "  " * indent
    for key, value in report.items():
        if isinstance(value, dict):
            print(f"{pad}{key}:")
            _print_table(value, indent + 1)
        elif isinstance(value, (list, tuple)):
            print(f"{pad}{key}:")
            for item in value:
                if isinstance(item, dict):
                    line = "  ".join(f"{k}={_fmt(v)}" for k, v in item.items())
                    print(f"{pad}  {line}")
                else:
                    print(f"{pad}  {_fmt(item)}")
        else:
            print(f"{pad}{key:24s} {_fmt(value)}")


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _coerce(obj):
    if hasattr(obj, "as_dict"):
        return obj.as_dict()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, frozenset):
        return sorted(obj)
    from fractions import Fraction
    if isinstance(obj, Fraction):
        return str(obj)
    return str(obj)


def _vector_terms(vec):
    return {str(key): float(c) for key, c in sorted(vec.terms.items(),
                                                    key=lambda kv: str(kv[0]))}


def cmd_diagrams_enumerate(args, started):
    support = _support(args.support)
    diagrams = enumerate_diagrams(support, args.degree)
    texts = [diagram_io.serialize_diagram(std_oriented(d)) for d in diagrams]
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        for i, text in enumerate(texts):
            (outdir / f"degree{args.degree}_{i:03d}.diagram").write_text(text)
    report = {
        "command": "diagrams enumerate",
        "support": args.support, "degree": args.degree,
        "count": len(diagrams),
        "diagrams": texts if not args.out else None,
        "out": args.out,
    }
    _emit(report, started)
    return 0


def cmd_diagrams_classify(args, started):
    od = diagram_io.parse_diagram(Path(args.file).read_text())
    d = od.diagram
    faces = []
    for f in enumerate_faces(d):
        faces.append({
            "subset": sorted(f.subset) if f.subset is not None else "scale",
            "type": f.type,
            "degenerate": f.degenerate,
        })
    report = {
        "command": "diagrams classify", "file": args.file,
        "degree": diagram_degree(d),
        "principal": is_principal(d),
        "subprincipal": is_subprincipal(d),
        "faces": faces,
    }
    _emit(report, started)
    return 0


def cmd_algebra_reduce(args, started):
    terms = diagram_io.parse_class_vector(Path(args.file).read_text())
    if not terms:
        raise DiagramError("empty vector file")
    support = terms[0][1].diagram.support
    n = diagram_degree(terms[0][1].diagram)
    vec = algebra.ClassVector.zero(support, n)
    for coeff, od in terms:
        vec = vec + algebra.ClassVector.of(od, coeff)
    red = algebra.reduction(support, n, args.k)
    reduced = red.reduce(vec)
    report = {
        "command": "algebra reduce", "file": args.file, "degree": n,
        "k": args.k, "dimension": red.dimension,
        "coordinates": {str(key): str(reduced.terms.get(key, 0))
                        for key in red.basis},
    }
    _emit(report, started)
    return 0


def cmd_algebra_check_gluings(args, started):
    ihx = algebra.check_ihx_prime(S1, args.n, args.k)
    stu = algebra.check_stu_prime(S1, args.n, args.k)
    report = {
        "command": "algebra check-gluings", "n": args.n, "k": args.k,
        "ihx_prime": "PASS" if ihx else "FAIL",
        "stu_prime": "PASS" if stu else "FAIL",
    }
    _emit(report, started)
    return 0 if (ihx and stu) else 3


def cmd_integrate(args, started):
    od = diagram_io.parse_diagram(Path(args.diagram).read_text())
    curve = _load_curve(args.curve)
    est = integrate_diagram(od, curve, samples=_parse_count(args.samples),
                            seed=args.seed, shards=args.shards,
                            workers=args.workers)
    report = {
        "command": "integrate", "diagram": args.diagram, "curve": args.curve,
        "estimate": est.as_dict(),
        "config": {"samples": _parse_count(args.samples), "seed": args.seed,
                   "shards": args.shards or default_shards(),
                   "workers": args.workers or default_workers()},
    }
    _emit(report, started, table=getattr(args, "table", False))
    return 0


def cmd_invariant(args, started):
    curve = _load_curve(args.curve)
    samples = _parse_count(args.samples)
    common = dict(samples=samples, seed=args.seed, shards=args.shards,
                  workers=args.workers)
    if args.which == "linking":
        res = invariants.linking_number(curve, args.m1, args.m2, **common)
        report = {"command": "invariant linking", "curve": args.curve,
                  "components": [args.m1, args.m2],
                  "estimate": res["estimate"].as_dict(),
                  "integer": res["integer"], "residual": res["residual"],
                  "crossing_oracle": res["oracle"],
                  "warning": res["warning"]}
        code = 3 if res["warning"] else 0
    elif args.which == "selflink":
        est = invariants.self_linking(curve, args.m1, **common)
        report = {"command": "invariant selflink", "curve": args.curve,
                  "component": args.m1, "estimate": est.as_dict()}
        code = 0
    elif args.which == "v2":
        res = invariants.v2(curve, **common)
        report = {"command": "invariant v2", "curve": args.curve,
                  "value": res["value"], "stderr": res["stderr"],
                  "integer": res["integer"], "residual": res["residual"],
                  "z2": _vector_terms(res["z2"]), "warning": res["warning"]}
        code = 3 if res["warning"] else 0
    elif args.which == "z0":
        series, info = invariants.z0_series(curve, args.degree, **common)
        report = {"command": "invariant z0", "curve": args.curve,
                  "degree": args.degree,
                  "coefficients": {str(n): _vector_terms(v)
                                   for n, v in sorted(series.items())},
                  "framings": [e.as_dict() for e in info["framings"]]}
        code = 0
    elif args.which == "lattice":
        res = invariants.lattice_check(curve, args.degree, args.k, **common)
        report = {"command": "invariant lattice", "curve": args.curve,
                  "n": args.degree, "k": args.k,
                  "framings": [e.as_dict() for e in res["framings"]],
                  "coordinates": res["coordinates"]}
        code = 0
    else:
        raise DiagramError(f"unknown invariant {args.which!r}")
    report["config"] = {"samples": samples, "seed": args.seed,
                        "shards": args.shards or default_shards(),
                        "workers": args.workers or default_workers()}
    report["estimate"] = report.get("estimate")
    if report["estimate"] is None:
        report.pop("estimate")
    _emit(report, started, table=getattr(args, "table", False))
    return code


def cmd_anomaly_f(args, started):
    est = anomaly.f_gamma(args.gamma, samples=_parse_count(args.samples),
                          seed=args.seed, shards=args.shards,
                          workers=args.workers)
    report = {"command": "anomaly f", "gamma": args.gamma,
              "estimate": est.as_dict(),
              "config": {"samples": _parse_count(args.samples),
                         "seed": args.seed,
                         "shards": args.shards or default_shards()}}
    _emit(report, started, table=getattr(args, "table", False))
    return 0


def cmd_anomaly_framing(args, started):
    curve = _load_curve(args.curve)
    rows = anomaly.framing_report(curve, samples=_parse_count(args.samples),
                                  seed=args.seed, shards=args.shards,
                                  workers=args.workers)
    report = {"command": "anomaly framing", "curve": args.curve,
              "components": rows,
              "config": {"samples": _parse_count(args.samples),
                         "seed": args.seed,
                         "shards": args.shards or default_shards()}}
    _emit(report, started, table=getattr(args, "table", False))
    return 0


def cmd_curve_validate(args, started):
    curve = _load_curve(args.curve)
    report = {"command": "curve validate", "curve": args.curve,
              "report": validate_embedding(curve)}
    _emit(report, started)
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="cslinks",
        description="Configuration space integrals for links in R^3")
    sub = p.add_subparsers(dest="group", required=True)

    dg = sub.add_parser("diagrams", help="diagram combinatorics")
    dgs = dg.add_subparsers(dest="sub", required=True)
    de = dgs.add_parser("enumerate")
    de.add_argument("--support", default="S1")
    de.add_argument("--degree", type=int, required=True)
    de.add_argument("--out", default=None)
    de.set_defaults(func=cmd_diagrams_enumerate)
    dc = dgs.add_parser("classify")
    dc.add_argument("file")
    dc.set_defaults(func=cmd_diagrams_classify)

    al = sub.add_parser("algebra", help="diagram algebra over rationals")
    als = al.add_subparsers(dest="sub", required=True)
    ar = als.add_parser("reduce")
    ar.add_argument("file")
    ar.add_argument("--k", type=int, default=None)
    ar.set_defaults(func=cmd_algebra_reduce)
    ag = als.add_parser("check-gluings")
    ag.add_argument("--n", type=int, required=True)
    ag.add_argument("--k", type=int, required=True)
    ag.set_defaults(func=cmd_algebra_check_gluings)

    it = sub.add_parser("integrate", help="one configuration space integral")
    it.add_argument("--diagram", required=True)
    it.add_argument("--curve", required=True)
    _mc_args(it)
    it.set_defaults(func=cmd_integrate)

    inv = sub.add_parser("invariant", help="assembled invariants")
    inv.add_argument("which",
                     choices=["linking", "selflink", "v2", "z0", "lattice"])
    inv.add_argument("--curve", required=True)
    inv.add_argument("--m1", type=int, default=0)
    inv.add_argument("--m2", type=int, default=1)
    inv.add_argument("--degree", type=int, default=2)
    inv.add_argument("--k", type=int, default=2)
    _mc_args(inv)
    inv.set_defaults(func=cmd_invariant)

    an = sub.add_parser("anomaly", help="anomaly and framing integrals")
    ans = an.add_subparsers(dest="sub", required=True)
    af = ans.add_parser("f")
    af.add_argument("--gamma", required=True,
                    choices=list(anomaly.LINE_CATALOG))
    _mc_args(af)
    af.set_defaults(func=cmd_anomaly_f)
    afr = ans.add_parser("framing")
    afr.add_argument("--curve", required=True)
    _mc_args(afr)
    afr.set_defaults(func=cmd_anomaly_framing)

    cv = sub.add_parser("curve", help="curve utilities")
    cvs = cv.add_subparsers(dest="sub", required=True)
    cvv = cvs.add_parser("validate")
    cvv.add_argument("--curve", required=True)
    cvv.set_defaults(func=cmd_curve_validate)
    return p


def _mc_args(parser):
    parser.add_argument("--samples", default="1e6",
                        help="sample count; scientific notation accepted")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--shards", type=int, default=None,
                        help="logical shards (default CSLINKS_SHARDS or 16)")
    parser.add_argument("--workers", type=int, default=None,
                        help="worker threads (result-independent)")
    parser.add_argument("--table", action="store_true",
                        help="plain-text table instead of JSON")


def main(argv=None):
    started = time.time()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, started)
    except (DiagramError, EmbeddingError, KeyError, FileNotFoundError,
            ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
