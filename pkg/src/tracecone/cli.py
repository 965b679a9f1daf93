"""Command-line interface.

Exit codes: 0 pass, 1 internal error, 2 invalid input, 3 unbounded or
order exceeded, 4 property failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import AlgebraElement, positivize
from .circumcenter import circumcenter
from .errors import OrderExceeded, TraceconeError
from .fuzz import SUITES, run_fuzz
from .geometry import distance, geodesic
from .instances import (
    Instance,
    InvalidInstance,
    encode_element,
    read_instance,
    write_instance,
    write_report,
)
from .synth import synthesize
from .unitarization import METHODS, certificate_checks, close_group, unitarize_group

EXIT_OK, EXIT_INTERNAL, EXIT_INVALID, EXIT_UNBOUNDED, EXIT_FAILED = 0, 1, 2, 3, 4
REPORT_SCHEMA = 1

log = logging.getLogger("tracecone")


def _report(command, options, checks=(), seed=None, **extra) -> dict:
    rep = {
        "schema": REPORT_SCHEMA,
        "command": command,
        "options": options,
        "seed": seed,
        "checks": list(checks),
    }
    rep.update(extra)
    return rep


def _options(args) -> dict:
    skip = {"func", "verbose"}
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k not in skip}


def _finish(rep: dict, args, started: float) -> None:
    rep["timing"] = {"seconds": time.perf_counter() - started}
    if getattr(args, "out", None):
        write_report(rep, args.out)


def _point(inst: Instance, name: str):
    return positivize(inst.get(name))


def _format_element(x: AlgebraElement) -> str:
    lines = []
    for i, b in enumerate(x.blocks):
        lines.append(f"block {i}:")
        real = np.allclose(b.imag, 0.0, atol=1e-15)
        shown = b.real if real else b
        lines.append(np.array2string(shown, precision=10, suppress_small=True, max_line_width=160))
    return "\n".join(lines)


def cmd_distance(args) -> int:
    started = time.perf_counter()
    inst = read_instance(args.instance)
    a, b = _point(inst, args.a), _point(inst, args.b)
    d = distance(a, b)
    back = distance(b, a)
    print(f"{d:.12f}")
    check = {"name": "symmetry", "status": "PASS" if abs(d - back) <= 1e-9 * (1 + d) else "FAIL",
             "measured": abs(d - back), "tolerance": 1e-9}
    _finish(_report("distance", _options(args), [check], result={"distance": d}), args, started)
    return EXIT_OK


def cmd_geodesic(args) -> int:
    started = time.perf_counter()
    inst = read_instance(args.instance)
    a, b = _point(inst, args.a), _point(inst, args.b)
    x = geodesic(a, b, args.t)
    print(_format_element(x))
    _finish(_report("geodesic", _options(args), result={"point": encode_element(x)}), args, started)
    return EXIT_OK


def cmd_circumcenter(args) -> int:
    started = time.perf_counter()
    inst = read_instance(args.instance)
    names = args.names or [n for n, r in inst.roles.items() if r == "point"]
    if not names:
        raise InvalidInstance("no points to enclose (give --names or points with role 'point')")
    pts = [_point(inst, n) for n in names]
    ball = circumcenter(pts, tol=args.tol, max_iter=args.max_iter)
    print(f"radius {ball.radius:.12f}")
    print(_format_element(ball.center))
    checks = [{"name": "converged", "status": "PASS" if ball.converged else "WARN",
               "measured": ball.iterations, "tolerance": None}]
    _finish(
        _report(
            "circumcenter", _options(args), checks,
            result={"center": encode_element(ball.center), "radius": ball.radius,
                    "iterations": ball.iterations, "radius_history": ball.radius_history},
        ),
        args, started,
    )
    return EXIT_OK if ball.converged else EXIT_FAILED


def cmd_unitarize(args) -> int:
    started = time.perf_counter()
    inst = read_instance(args.instance)
    try:
        table = close_group(inst.generators, max_order=args.max_order, algebra=inst.algebra)
    except OrderExceeded as exc:
        diagnosis = "norm growth detected" if exc.norm_growth else "order cap reached"
        msg = str(exc)
        print(msg if msg.startswith(diagnosis) else f"{diagnosis}: {msg}", file=sys.stderr)
        checks = [{"name": "closure", "status": "FAIL", "measured": len(exc.table), "tolerance": args.max_order}]
        _finish(_report("unitarize", _options(args), checks, diagnosis=diagnosis), args, started)
        return EXIT_UNBOUNDED
    cert = unitarize_group(table, tol=args.tol, max_iter=args.max_iter, method=args.method)
    checks = certificate_checks(cert, table, args.tol)
    ok = all(c["ok"] for c in checks)
    records = [
        {"name": c["name"], "status": "PASS" if c["ok"] else "FAIL", "measured": c["measured"],
         "tolerance": c["tolerance"]}
        for c in checks
    ]
    payload = {
        "method": cert.method,
        "converged": cert.converged,
        "group_order": table.order,
        "uniform_bound": cert.uniform_bound,
        "band": [cert.band.c1, cert.band.c2],
        "center": encode_element(cert.center),
        "unitarizer": encode_element(cert.unitarizer),
        "residual_unitarity": cert.residual_unitarity,
        "residual_fixed_point": cert.residual_fixed_point,
        "orbit_band_ok": cert.orbit_band_ok,
        "unitarizer_band_ok": cert.unitarizer_band_ok,
    }
    print(f"group order {table.order}, M = {cert.uniform_bound:.12g}")
    print(f"residual_unitarity {cert.residual_unitarity:.3e}  residual_fixed_point {cert.residual_fixed_point:.3e}")
    print("unitarizer s:")
    print(_format_element(cert.unitarizer))
    print("certificate " + ("verified" if ok else "REJECTED"))
    _finish(_report("unitarize", _options(args), records, certificate=payload), args, started)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_synth(args) -> int:
    dims = [int(x) for x in args.blocks.split(",")]
    weights = [float(x) for x in args.weights.split(",")] if args.weights else None
    inst, hidden = synthesize(dims, args.group, cond=args.cond, seed=args.seed, weights=weights)
    write_instance(inst, args.out)
    sidecar = {
        "group": hidden["group"],
        "order": hidden["order"],
        "conjugator": encode_element(hidden["conjugator"]),
        "unitary_generators": [encode_element(u) for u in hidden["unitary_generators"]],
    }
    Path(str(args.out) + ".hidden.json").write_text(json.dumps(sidecar, indent=1) + "\n")
    print(f"wrote {args.out} ({hidden['group']}, order {hidden['order']})")
    return EXIT_OK


def cmd_fuzz(args) -> int:
    started = time.perf_counter()
    records = run_fuzz(args.suite, args.trials, args.seed)
    for r in records:
        tol = "info" if r.tolerance is None else f"{r.tolerance:g}"
        print(f"{r.status:4s}  {r.name:48s} {r.measured:.3e}  (tol {tol})")
    ok = all(r.status != "FAIL" for r in records)
    _finish(_report("fuzz", _options(args), [r.to_dict() for r in records], seed=args.seed), args, started)
    return EXIT_OK if ok else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tracecone",
        description="Positive-cone geometry, minimal enclosing balls and unitarization of bounded groups.",
        epilog="exit codes: 0 pass, 1 internal error, 2 invalid input, 3 unbounded or order cap, 4 property failure",
    )
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("distance", help="geodesic distance between two named points")
    s.add_argument("instance", type=Path)
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--out", type=Path, help="write a JSON report here")
    s.set_defaults(func=cmd_distance)

    s = sub.add_parser("geodesic", help="evaluate the geodesic between two named points")
    s.add_argument("instance", type=Path)
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--out", type=Path)
    s.set_defaults(func=cmd_geodesic)

    s = sub.add_parser("circumcenter", help="minimal enclosing ball of the instance points")
    s.add_argument("instance", type=Path)
    s.add_argument("--names", nargs="*", help="points to enclose (default: all with role 'point')")
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--max-iter", type=int, default=None)
    s.add_argument("--out", type=Path)
    s.set_defaults(func=cmd_circumcenter)

    s = sub.add_parser("unitarize", help="unitarize the group generated by the instance generators")
    s.add_argument("instance", type=Path)
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--max-iter", type=int, default=None)
    s.add_argument("--max-order", type=int, default=10000)
    s.add_argument("--method", choices=METHODS, default="circumcenter")
    s.add_argument("--out", type=Path)
    s.set_defaults(func=cmd_unitarize)

    s = sub.add_parser("synth", help="write a random bounded-group instance with hidden ground truth")
    s.add_argument("--blocks", default="2", help="comma-separated block dimensions, e.g. 2,3")
    s.add_argument("--weights", default=None, help="comma-separated trace weights (default: equal)")
    s.add_argument("--group", required=True,
                   help="cyclic-k, dihedral-k, perm-k or random-unitary-order-n")
    s.add_argument("--cond", type=float, default=1.0,
                   help="conjugator singular values are log-uniform in [1/cond, cond]")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", type=Path, required=True)
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("fuzz", help="run the seeded property suites")
    s.add_argument("--suite", choices=SUITES + ("all",), default="all")
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", type=Path)
    s.set_defaults(func=cmd_fuzz)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InvalidInstance as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (TraceconeError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - the exit-code contract reserves 1 for these
        log.exception("internal error: %s", exc)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
