"""Command-line interface: torsionlab {reps,torsion,asymptotics,limits,verify}.

Exit codes: 0 success, 1 verification or oracle failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from .algebra import bits_from_env, precision
from .asymptotics import leading_coefficient_sequence, limit_set
from .groups import Presentation, Word
from .invariants import alexander_torus
from .reps import (
    InvalidParameterError,
    check_index,
    check_twist_parameter,
    graph_manifold_rep,
    graph_manifold_reps,
    index_range,
    klein_restriction,
    metabelian_classes,
    torus_knot_restriction,
)
from .torsion import (
    ENGINE_MAX_DIM,
    AcyclicityError,
    DegenerateDenominatorError,
    TorsionError,
    abelian_knot_torsion,
    fox_oracle_torsion,
    generic_torsion,
    graph_manifold_torsion,
    klein_bottle_complex,
    klein_bottle_torsion,
)
from .verify import run_checks

N_CAP = 10_000
ORACLE_TOL = 1e-9
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class UsageError(Exception):
    """Invalid command-line input; reported with exit code 2."""


# output ---------------------------------------------------------------------


def _fmt_cell(v: Any) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if v is None:
        return "-"
    return str(v)


def render_table(rows: Sequence[dict], columns: Sequence[str]) -> str:
    cells = [[_fmt_cell(r.get(c)) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in cells:
        lines.append("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip())
    return "\n".join(lines)


def render_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: ("" if r.get(c) is None else repr(r[c]) if isinstance(r.get(c), float) else r.get(c)) for c in columns})
    return buf.getvalue().rstrip("\n")


def emit(fmt: str, payload: Any, rows: Sequence[dict], columns: Sequence[str], out) -> None:
    if fmt == "json":
        print(json.dumps(payload, indent=2), file=out)
    elif fmt == "csv":
        print(render_csv(rows, columns), file=out)
    else:
        print(render_table(rows, columns), file=out)


# argument helpers --------------------------------------------------------------


def _check_n(n: int) -> int:
    if abs(n) > N_CAP:
        raise UsageError(f"|n| must be at most {N_CAP}, got {n}")
    try:
        check_twist_parameter(n)
    except InvalidParameterError as exc:
        raise UsageError(str(exc)) from exc
    return n


def _check_j(n: int, j: int | None, label: str = "j") -> None:
    if j is None:
        return
    try:
        check_index(n, j, label)
    except InvalidParameterError as exc:
        raise UsageError(str(exc)) from exc


def _parse_n_list(text: str) -> list[int]:
    try:
        ns = [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"--n expects a comma-separated list of integers, got {text!r}") from exc
    if not ns:
        raise UsageError("--n list is empty")
    return [_check_n(n) for n in ns]


def _load_presentation(path: str | None) -> Presentation | None:
    if path is None:
        return None
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read presentation file: {exc}") from exc
    try:
        return Presentation.from_text(text, name=Path(path).stem)
    except ValueError as exc:
        raise UsageError(f"bad presentation file {path}: {exc}") from exc


def _file_residual(rep, pres: Presentation) -> float | None:
    """Relator residual of ``pres`` under ``rep``, matching generators by name."""
    src = rep.presentation
    if not set(pres.generators) <= set(src.generators):
        return None
    sub = rep.restrict(pres, {g: Word.generator(src.index(g)) for g in pres.generators})
    return sub.relation_report().max_residual


# subcommands -------------------------------------------------------------------


def cmd_reps(args, out) -> int:
    n = _check_n(args.n)
    _check_j(n, args.j, "j")
    _check_j(n, args.k, "k")
    pres = _load_presentation(args.presentation_file)
    meta_rows, graph_rows = [], []
    for rep in metabelian_classes(n):
        k = rep.metadata["k"]
        if args.k is not None and k != args.k:
            continue
        row = {"family": "metabelian", "k": k, "u": float(rep.metadata["u"].real),
               "residual": rep.relation_report().max_residual}
        if pres is not None:
            row["file_residual"] = _file_residual(rep, pres)
        meta_rows.append(row)
    for rep in graph_manifold_reps(n):
        j = rep.metadata["j"]
        if args.j is not None and j != args.j:
            continue
        xi = rep.metadata["xi"]
        row = {"family": "graph-manifold", "j": j, "xi": str(xi), "xi_numer": xi.numer,
               "xi_denom": xi.denom, "p_k": rep.metadata["p_k"],
               "residual": rep.relation_report().max_residual}
        if pres is not None:
            row["file_residual"] = _file_residual(rep, pres)
        graph_rows.append(row)
    payload = {"n": n, "p": abs(4 * n + 1), "metabelian": meta_rows, "graph_manifold": graph_rows}
    columns = ["family", "k", "u", "j", "xi", "p_k", "residual"]
    if pres is not None:
        columns.append("file_residual")
    emit(args.format, payload, meta_rows + graph_rows, columns, out)
    return EXIT_OK


def _delta(a, b) -> float:
    if a.value is not None and b.value is not None:
        return float(abs(a.value - b.value) / max(abs(b.value), 1e-300))
    return float(abs(a.log_magnitude - b.log_magnitude))


def _fox_with_swap(pres, rep, N):
    try:
        return fox_oracle_torsion(pres, rep, N, denominator=1)
    except DegenerateDenominatorError:
        return fox_oracle_torsion(pres, rep, N, denominator=0)


def _run_oracles(n: int, j: int, N: int, result, pres: Presentation | None) -> list[dict]:
    rep = graph_manifold_rep(n, j)
    checks = []
    if N == 0:
        return checks
    if 8 * N <= ENGINE_MAX_DIM:
        kr = klein_restriction(rep)
        eng = generic_torsion(klein_bottle_complex(kr, N))
        closed = klein_bottle_torsion(kr, N)
        d = _delta(eng, closed)
        checks.append({"oracle": "klein-generic-engine", "delta": d, "ok": d <= ORACLE_TOL})
    piece = abelian_knot_torsion(alexander_torus(n), rep.metadata["xi"], N)
    if 8 * N <= ENGINE_MAX_DIM:
        tr = torus_knot_restriction(rep)
        if pres is not None:
            if pres.rank != 2 or len(pres.relators) != 1 or not set(pres.generators) <= {"a", "b"}:
                raise UsageError("presentation file for the Fox oracle needs generators a, b and one relator")
            tr = rep.restrict(pres, {g: Word.generator(rep.presentation.index(g)) for g in pres.generators})
        try:
            fox = _fox_with_swap(tr.presentation, tr, N)
            d = _delta(fox, piece)
            checks.append({"oracle": "fox-presentation-complex", "delta": d, "ok": d <= ORACLE_TOL})
        except (AcyclicityError, DegenerateDenominatorError) as exc:
            checks.append({"oracle": "fox-presentation-complex", "delta": None, "ok": False, "detail": str(exc)})
    d = float(abs(result.log_magnitude - piece.log_magnitude))
    checks.append({"oracle": "gluing-klein-factor", "delta": d, "ok": d == 0.0})
    return checks


def cmd_torsion(args, out) -> int:
    if args.k is not None:
        raise UsageError(
            "torsion is indexed by the eigenvalue index --j; the metabelian index --k "
            "has no fixed correspondence with j"
        )
    if args.j is None or args.N is None:
        raise UsageError("torsion needs --n, --j and --N")
    n = _check_n(args.n)
    _check_j(n, args.j)
    if args.N < 0:
        raise UsageError(f"N must be non-negative, got {args.N}")
    pres = _load_presentation(args.presentation_file)
    result = graph_manifold_torsion(n, args.j, args.N)
    payload = result.to_json()
    status = EXIT_OK
    rows = [{"field": k, "value": v} for k, v in payload.items()]
    if args.oracle:
        checks = _run_oracles(n, args.j, args.N, result, pres)
        payload["oracles"] = checks
        if not all(c["ok"] for c in checks):
            status = EXIT_FAIL
        rows += [{"field": f"delta[{c['oracle']}]", "value": c["delta"]} for c in checks]
    emit(args.format, payload, rows, ["field", "value"], out)
    return status


def cmd_asymptotics(args, out) -> int:
    n = _check_n(args.n)
    _check_j(n, args.j)
    if args.Nmax is None or args.Nmax < 1:
        raise UsageError(f"--Nmax must be at least 1, got {args.Nmax}")
    js = [args.j] if args.j is not None else list(index_range(n))
    reports = [leading_coefficient_sequence(n, j, args.Nmax) for j in js]
    rows = []
    for rep in reports:
        rows += [{"j": rep.j, **r} for r in rep.rows()]
    columns = ["N", "seq", "limit", "abs_error"]
    if args.j is None:
        columns = ["j"] + columns
    payload: Any = reports[0].to_json() if args.j is not None else {"n": n, "reports": [r.to_json() for r in reports]}
    emit(args.format, payload, rows, columns, out)
    return EXIT_OK


def cmd_limits(args, out) -> int:
    n = _check_n(args.n)
    ls = limit_set(n)
    rows = [{**v.to_json(), "minimum": v == ls.minimum} for v in sorted(ls.values)]
    emit(args.format, ls.to_json(), rows, ["exact", "value", "divisor", "minimum"], out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    ns = _parse_n_list(args.n) if args.n is not None else [1, 2, 3, -2, -3]
    results = run_checks(ns, seed=args.seed)
    passed = all(r.passed for r in results)
    payload = {"n": ns, "seed": args.seed, "passed": passed, "results": [r.to_json() for r in results]}
    if args.format == "table":
        keys = []
        for r in results:
            if (r.module, r.check) not in keys:
                keys.append((r.module, r.check))
        status = {(r.module, r.check, r.n): r.passed for r in results}
        columns = ["module", "check"] + [f"n={n}" for n in ns] + ["global"]
        rows = []
        for module, check in keys:
            row = {"module": module, "check": check}
            for n in ns:
                row[f"n={n}"] = _mark(status.get((module, check, n)))
            row["global"] = _mark(status.get((module, check, None)))
            rows.append(row)
        print(render_table(rows, columns), file=out)
        for r in results:
            if not r.passed:
                print(f"FAIL {r.module}/{r.check} n={r.n}: {r.detail}", file=out)
        print(f"{'all checks passed' if passed else 'verification FAILED'}", file=out)
    else:
        rows = [r.to_json() for r in results]
        emit(args.format, payload, rows, ["module", "check", "n", "passed", "detail"], out)
    if not passed:
        for r in results:
            if not r.passed:
                print(f"failed: {r.module}/{r.check} (n={r.n}): {r.detail}", file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAIL


def _mark(v: bool | None) -> str:
    return "-" if v is None else ("PASS" if v else "FAIL")


# parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv", "table"], default="table")
    common.add_argument("--precision-bits", type=int, default=None,
                        help="working precision in bits (>= 53); overrides TORSIONLAB_PRECISION_BITS")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("--presentation-file", default=None,
                        help="text presentation ('gens: a, b' / 'rel: lhs = rhs')")

    parser = argparse.ArgumentParser(prog="torsionlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reps", parents=[common], help="list representation normal forms")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--j", type=int)
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_reps)

    p = sub.add_parser("torsion", parents=[common], help="torsion of the surgered manifold")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--j", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--oracle", action="store_true", help="cross-check against independent oracles")
    p.set_defaults(func=cmd_torsion)

    p = sub.add_parser("asymptotics", parents=[common], help="log|Tor|/(2N) for N = 1..Nmax")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--j", type=int)
    p.add_argument("--Nmax", type=int, required=True)
    p.set_defaults(func=cmd_asymptotics)

    p = sub.add_parser("limits", parents=[common], help="limit set and its minimum")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_limits)

    p = sub.add_parser("verify", parents=[common], help="run all invariant checks")
    p.add_argument("--n", type=str, default=None, help="comma-separated list, default 1,2,3,-2,-3")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_INPUT
    try:
        bits = args.precision_bits
        if bits is None:
            try:
                bits = bits_from_env()
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
        if bits < 53:
            raise UsageError(f"--precision-bits must be at least 53, got {bits}")
        with precision(bits):
            return args.func(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TorsionError as exc:
        print(f"torsion failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
