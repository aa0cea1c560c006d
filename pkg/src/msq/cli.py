"""``msq`` command line: simplify, bench and vqls."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import SUITES, format_table, run_suite, speedup_rows
from .circuit import Circuit, CircuitError, MeasurementSpec, extract
from .expr.serialize import dumps as dump_expr
from .simplify import SimplifyConfig, simplify_report

EXIT_OK, EXIT_USAGE, EXIT_ASSERT, EXIT_IO = 0, 1, 2, 3
SHOW_LIMIT = 200          # print the simplified expression when its leafcount is at most this


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise OSError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _config(args) -> SimplifyConfig:
    try:
        return SimplifyConfig(intensity=args.intensity, budget=args.budget)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# -- simplify --------------------------------------------------------------------------

def cmd_simplify(args) -> int:
    _config(args)
    try:
        circuit = Circuit.from_json(_read_json(args.circuit))
        spec = MeasurementSpec.parse(args.spec)
        e = extract(circuit, spec)
    except CircuitError as exc:
        raise UsageError(f"{args.circuit}: {exc}") from exc
    if spec.kind == "amp0n":
        e = e.real_part() if e.imag_part().is_zero() else e
    levels = range(args.intensity + 1) if args.sweep else [args.intensity]
    rows = []
    for k in levels:
        rep = simplify_report(e, SimplifyConfig(intensity=k, budget=args.budget))
        rows.append(rep)
        flag = " (budget exceeded)" if rep.budget_exceeded else ""
        print(f"intensity={k} leafcount_before={rep.before} leafcount_after={rep.after} "
              f"improvement={float(rep.improvement):.4g} seconds={rep.seconds:.3f}{flag}")
    final = rows[-1]
    if final.after <= SHOW_LIMIT:
        print(final.expr)
    if args.out:
        out = Path(args.out)
        _write(out.with_name(out.name + ".before.json"), dump_expr(e) + "\n")
        _write(out.with_name(out.name + ".after.json"), dump_expr(final.expr) + "\n")
        if args.trace:
            _write(out.with_name(out.name + ".trace.json"), final.trace_json() + "\n")
    return EXIT_OK


# -- bench -----------------------------------------------------------------------------

def cmd_bench(args) -> int:
    report = run_suite(args.suite, _config(args), args.seed)
    for it in report.items:
        tail = f" [{it.status}]" if it.status != "ok" else ""
        ratio = f"{it.improvement:.4g}" if it.improvement is not None else "-"
        print(f"{it.id:32} {it.spec:14} {str(it.leafcount_before):>8} -> "
              f"{str(it.leafcount_after):<8} x{ratio}{tail}")
    if report.comparison:
        print()
        print(format_table(report.comparison))
    if args.out:
        out = Path(args.out)
        _write(out / f"{args.suite}.json", json.dumps(report.to_json(), indent=1) + "\n")
        _write(out / f"{args.suite}.csv", report.to_csv())
    if report.failures:
        for it in report.failures:
            print(f"MISMATCH {it.id} {it.spec}: {it.detail}", file=sys.stderr)
        return EXIT_ASSERT
    return EXIT_OK


# -- vqls ------------------------------------------------------------------------------

def _backends(text: str) -> tuple:
    from .vqls import BACKENDS
    names = tuple(b.strip().lower() for b in text.split(",") if b.strip())
    bad = [b for b in names if b not in BACKENDS]
    if not names or bad:
        raise UsageError(f"backends must be a comma list drawn from {','.join(BACKENDS)}")
    return names


def cmd_vqls(args) -> int:
    from .vqls import DegenerateOperatorError, VqlsProblem, compare_backends
    backends = _backends(args.backends)
    try:
        problem = VqlsProblem.from_json(_read_json(args.problem))
    except (ValueError, CircuitError) as exc:
        raise UsageError(f"{args.problem}: {exc}") from exc
    if args.seeds < 1 or args.iters < 1:
        raise UsageError("--seeds and --iters must be positive")
    seeds = range(args.seed, args.seed + args.seeds)
    try:
        result = compare_backends(problem, seeds, args.iters, backends, _config(args))
    except DegenerateOperatorError as exc:
        print(f"degenerate operator: {exc}", file=sys.stderr)
        return EXIT_ASSERT
    summary = result.to_json()
    for b, stats in summary["backends"].items():
        print(f"{b:7} converged {stats['converged']}/{stats['runs']}  "
              f"mean loop {stats['mean_loop_seconds']:.4f}s  "
              f"median loop {stats['median_loop_seconds']:.4f}s")
    if result.speedup is not None:
        print(f"speedup mean {result.speedup:.2f}x  median {result.median_speedup:.2f}x")
        if summary["diverging_seeds"]:
            print(f"seeds with S0/S1 divergence above 1e-6: {summary['diverging_seeds']}")
        rows = speedup_rows(result)
        print()
        print(format_table(rows))
        summary["comparison"] = rows
    if args.out:
        out = Path(args.out)
        for b, recs in result.records.items():
            for r in recs:
                _write(out / f"{b}_seed{r.seed}.csv", r.to_csv())
        _write(out / "runs.json", json.dumps(
            {b: [r.to_json() for r in recs] for b, recs in result.records.items()}) + "\n")
        _write(out / "summary.json", json.dumps(summary, indent=1) + "\n")
    return EXIT_OK


# -- entry point ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="msq", description="Measurement-expression simplification toolkit.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, intensity=3):
        sp.add_argument("--intensity", type=int, default=intensity)
        sp.add_argument("--budget", type=float, default=10.0, help="seconds per expression")
        sp.add_argument("--out", help="output path or directory")

    s = sub.add_parser("simplify", help="extract and simplify one measurement expression")
    s.add_argument("circuit", help="circuit JSON file")
    s.add_argument("--spec", default="prob_zero:1",
                   help="prob_zero:K, amp0n or pauli:STRING (default prob_zero:1)")
    s.add_argument("--sweep", action="store_true", help="report every intensity from 0 up")
    s.add_argument("--trace", action="store_true", help="also write the rewrite trace")
    common(s)
    s.set_defaults(func=cmd_simplify)

    b = sub.add_parser("bench", help="run a benchmark suite")
    b.add_argument("suite", choices=SUITES)
    b.add_argument("--seed", type=int, default=0)
    common(b)
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("vqls", help="run the linear solver on several backends")
    v.add_argument("problem", help="problem JSON file")
    v.add_argument("--backends", default="s0,s1")
    v.add_argument("--seed", type=int, default=0, help="first seed")
    v.add_argument("--seeds", type=int, default=30, help="number of consecutive seeds")
    v.add_argument("--iters", type=int, default=300)
    common(v)
    v.set_defaults(func=cmd_vqls)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"msq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"msq: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
