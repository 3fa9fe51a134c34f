"""Command-line front end.

Subcommands: analyze (multiplicity structure), deflate (square systems
with a simple root), certify (interval certificate for a multiple root
of a nearby system), tdeg and branches (local topology), bench (compare
method matrix sizes over a directory of problem files).

Exit codes: 0 success, 2 inconclusive certificate under --strict,
3 problem-file parse error, 4 computation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .certify import certify_multiple_root, rump_test
from .deflation import deflate_direct, deflate_perturbed
from .dualbasis import (Options, integration_dual_basis, macaulay_dual_basis,
                        primal_dual_pair)
from .errors import MrootError, ProblemParseError
from .problem import ProblemFile, parse_problem
from .topology import branch_count_report, topological_degree_report

EXIT_OK = 0
EXIT_INCONCLUSIVE = 2
EXIT_PARSE = 3
EXIT_FAILURE = 4


def _load(path: str) -> ProblemFile:
    return parse_problem(Path(path).read_text(encoding="utf-8"))


def _require(cond, message):
    if not cond:
        raise MrootError(message)


def _poly_strings(system):
    return [p.to_string(system.names) for p in system.polynomials]


def _steps_json(stats):
    return [{"degree": s.degree, "rows": s.rows, "cols": s.cols,
             "new_elements": s.new_elements} for s in stats.steps]


def _box_json(box):
    return [[iv.lo, iv.hi] for iv in box]


def _dual_strings(basis, names):
    return [e.to_string(names) for e in basis.elements]


def _mono_string(alpha, names):
    parts = [f"{names[i]}^{a}" if a > 1 else names[i]
             for i, a in enumerate(alpha) if a]
    return "*".join(parts) if parts else "1"


def _analysis_json(problem: ProblemFile, method: str, opts: Options, seed: int):
    F = problem.system()
    point = problem.point
    if method == "macaulay":
        basis, stats = macaulay_dual_basis(F, point, opts)
        pair = None
    elif method == "integration":
        basis, stats = integration_dual_basis(F, point, opts)
        pair = None
    else:
        pair, stats = primal_dual_pair(F, point, opts)
        basis = pair.dual
    out = {
        "command": "analyze",
        "method": stats.method,
        "point": list(point),
        "tol": opts.tol,
        "seed": seed,
        "multiplicity": basis.multiplicity,
        "nilindex": basis.nilindex,
        "breadth": basis.breadth,
        "hilbert": list(basis.hilbert),
        "dual_basis": _dual_strings(basis, problem.names),
        "steps": _steps_json(stats),
        "final_matrix": list(stats.final),
        "biggest_matrix": list(stats.biggest),
    }
    if pair is not None:
        out["primal_basis"] = [_mono_string(b, problem.names)
                               for b in pair.primal]
    return out


def cmd_analyze(args) -> int:
    problem = _load(args.file)
    _require(problem.point is not None, "analyze needs a point")
    opts = problem.options(tol=args.tol, max_depth=args.max_depth)
    report = _analysis_json(problem, args.method, opts, args.seed)
    _emit(args, report, _render_analyze)
    return EXIT_OK


def _render_analyze(r):
    lines = [f"method: {r['method']}",
             f"multiplicity: {r['multiplicity']}",
             f"nilindex: {r['nilindex']}  breadth: {r['breadth']}",
             f"hilbert function: {r['hilbert']}",
             f"final matrix: {r['final_matrix'][0]}x{r['final_matrix'][1]}"
             f"  biggest: {r['biggest_matrix'][0]}x{r['biggest_matrix'][1]}"]
    if "primal_basis" in r:
        lines.append("primal basis: " + ", ".join(r["primal_basis"]))
    lines.append("dual basis:")
    lines.extend(f"  {e}" for e in r["dual_basis"])
    return "\n".join(lines)


def cmd_deflate(args) -> int:
    problem = _load(args.file)
    _require(problem.point is not None, "deflate needs a point")
    opts = problem.options(tol=args.tol, max_depth=args.max_depth)
    F = problem.system()
    pair, _ = primal_dual_pair(F, problem.point, opts)
    direct = deflate_direct(F, pair.dual, problem.point, opts.tol)
    perturbed = deflate_perturbed(F, pair, tol=opts.tol)
    report = {
        "command": "deflate",
        "point": list(problem.point),
        "multiplicity": pair.multiplicity,
        "direct": {
            "selected_rows": [list(r) for r in direct.selected],
            "equations": _poly_strings(direct.system),
            "residual": direct.residual(),
            "jacobian_determinant": direct.jacobian_determinant(),
        },
        "perturbed": {
            "removed": [list(r) for r in perturbed.removed],
            "variables": list(perturbed.system.names),
            "equations": _poly_strings(perturbed.system),
            "root": list(perturbed.point),
            "jacobian_determinant": perturbed.jacobian_determinant(),
        },
    }
    _emit(args, report, _render_deflate)
    return EXIT_OK


def _render_deflate(r):
    lines = [f"multiplicity: {r['multiplicity']}",
             "direct system (simple root at the point):"]
    lines.extend(f"  {e}" for e in r["direct"]["equations"])
    lines.append(f"  |det J| = {abs(r['direct']['jacobian_determinant']):.6g}")
    lines.append("perturbed square system over "
                 + ", ".join(r["perturbed"]["variables"]) + ":")
    lines.extend(f"  {e}" for e in r["perturbed"]["equations"])
    return "\n".join(lines)


def cmd_certify(args) -> int:
    problem = _load(args.file)
    _require(problem.point is not None, "certify needs a point")
    _require(problem.box is not None, "certify needs a box")
    radius = args.eps_radius
    if radius is None:
        radius = problem.opts.get("eps_radius")
    _require(radius is not None,
             "certify needs an eps radius (opts or --eps-radius)")
    opts = problem.options(tol=args.tol, max_depth=args.max_depth)
    res = certify_multiple_root(problem.system(), problem.point, problem.box,
                                float(radius), opts)
    report = {
        "command": "certify",
        "status": res.status,
        "point": list(res.point),
        "multiplicity": res.multiplicity,
        "eps_radius": float(radius),
        "inclusion": list(res.inclusion),
        "domain": _box_json(res.domain),
        "image": _box_json(res.image) if res.image is not None else None,
        "eps_index": [list(ik) for ik in res.eps_index],
        "eps_box": _box_json(res.eps_box) if res.eps_box is not None else None,
        "reason": res.reason,
    }
    _emit(args, report, _render_certify)
    if args.strict and res.status != "certified":
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _render_certify(r):
    lines = [f"status: {r['status']}",
             f"multiplicity: {r['multiplicity']}"]
    if r["image"]:
        lines.append("operator image (centered at the point):")
        for (lo, hi), ok in zip(r["image"], r["inclusion"]):
            lines.append(f"  [{lo:+.6g}, {hi:+.6g}] "
                         + ("interior" if ok else "NOT interior"))
    if r["reason"]:
        lines.append(f"reason: {r['reason']}")
    return "\n".join(lines)


def cmd_tdeg(args) -> int:
    problem = _load(args.file)
    _require(problem.point is not None, "tdeg needs a point")
    opts = problem.options(tol=args.tol, max_depth=args.max_depth)
    rep = topological_degree_report(problem.system(), problem.point, opts,
                                    seed=args.seed)
    report = {
        "command": "tdeg",
        "degree": rep.degree,
        "signature": list(rep.signature),
        "multiplicity": rep.pair.multiplicity,
        "phi": rep.form.phi.to_string(problem.names),
        "phi_value": rep.form.phi.apply(rep.detj, rep.pair.point),
        "seed": args.seed,
    }
    _emit(args, report, lambda r: f"topological degree: {r['degree']}\n"
          f"signature: {tuple(r['signature'])}  multiplicity: "
          f"{r['multiplicity']}\nphi: {r['phi']}")
    return EXIT_OK


def cmd_branches(args) -> int:
    problem = _load(args.file)
    _require(problem.point is not None, "branches needs a point")
    opts = problem.options(tol=args.tol, max_depth=args.max_depth)
    rep = branch_count_report(problem.system(), problem.point, opts,
                              seed=args.seed)
    report = {
        "command": "branches",
        "branches": rep.count,
        "degree": rep.degree.degree,
        "signature": list(rep.degree.signature),
        "multiplicity": rep.degree.pair.multiplicity,
        "border_polynomial": rep.border.to_string(problem.names),
        "seed": args.seed,
    }
    _emit(args, report, lambda r: f"half-branches at the point: "
          f"{r['branches']}\ndegree: {r['degree']}  multiplicity: "
          f"{r['multiplicity']}\nborder polynomial: {r['border_polynomial']}")
    return EXIT_OK


def cmd_bench(args) -> int:
    directory = Path(args.directory)
    _require(directory.is_dir(), f"{args.directory} is not a directory")
    rows = []
    for path in sorted(directory.glob("*.prob")):
        row = {"name": path.stem}
        try:
            problem = _load(str(path))
            _require(problem.point is not None, "no point in file")
            opts = problem.options(tol=args.tol, max_depth=args.max_depth)
            pair, ist = primal_dual_pair(problem.system(), problem.point, opts)
            _, mst = macaulay_dual_basis(problem.system(), problem.point, opts)
            row.update({
                "multiplicity": pair.multiplicity,
                "improved": list(ist.final),
                "improved_biggest": list(ist.biggest),
                "macaulay": list(mst.final),
            })
        except (MrootError, ProblemParseError) as exc:
            row["error"] = str(exc)
        rows.append(row)
    report = {"command": "bench", "rows": rows}
    _emit(args, report, _render_bench)
    return EXIT_OK


def _render_bench(r):
    lines = [f"{'system':<24}{'mu':>4}  {'improved':>12}  {'macaulay':>12}"]
    for row in r["rows"]:
        if "error" in row:
            lines.append(f"{row['name']:<24}  error: {row['error']}")
        else:
            imp = "x".join(map(str, row["improved"]))
            mac = "x".join(map(str, row["macaulay"]))
            lines.append(f"{row['name']:<24}{row['multiplicity']:>4}  "
                         f"{imp:>12}  {mac:>12}")
    return "\n".join(lines)


def _emit(args, report, renderer):
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=False))
    else:
        print(renderer(report))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mroot",
        description="multiplicity structure, deflation and certification "
                    "of singular roots of polynomial systems")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help="relative kernel/pivot threshold")
    common.add_argument("--max-depth", type=int, default=None,
                        help="dual-space depth limit")
    common.add_argument("--json", action="store_true",
                        help="emit a JSON report")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for randomized fallbacks")
    common.add_argument("--strict", action="store_true",
                        help="nonzero exit on inconclusive certification")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common],
                       help="dual basis, quotient basis and Hilbert function")
    p.add_argument("file")
    p.add_argument("--method", choices=("macaulay", "integration", "improved"),
                   default="improved")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("deflate", parents=[common],
                       help="square deflated systems with a simple root")
    p.add_argument("file")
    p.set_defaults(func=cmd_deflate)

    p = sub.add_parser("certify", parents=[common],
                       help="interval certificate for a multiple root of a "
                            "nearby system")
    p.add_argument("file")
    p.add_argument("--eps-radius", type=float, default=None,
                   help="half-width of the perturbation box")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("tdeg", parents=[common],
                       help="topological degree at an isolated zero")
    p.add_argument("file")
    p.set_defaults(func=cmd_tdeg)

    p = sub.add_parser("branches", parents=[common],
                       help="real half-branches of a curve at a singular point")
    p.add_argument("file")
    p.set_defaults(func=cmd_branches)

    p = sub.add_parser("bench", parents=[common],
                       help="method comparison over a directory of problems")
    p.add_argument("directory")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ProblemParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (MrootError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
