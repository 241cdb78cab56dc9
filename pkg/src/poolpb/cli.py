"""Command-line entry point: ``poolpb <command> ...``.

Exit status is 0 on success, 1 for usage errors, 2 for bad input and 3 when
a solver's precondition does not hold for the given instance.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from poolpb import oracle, solvers
from poolpb.core import (
    as_rational,
    fmt_rational,
    make_report,
    outcome_problems,
    payment_excess,
    prefix_fill,
    to_mask,
    validate_instance,
    wp_payments,
)
from poolpb.errors import InputError, PreconditionError
from poolpb.experiment import load_spec, run_experiment, summarize_pabulib
from poolpb.genio.instance_io import instance_from_dict, outcome_from_dict, parse_json, report_to_dict, save_instance
from poolpb.genio.pabulib import pabulib_to_instance, parse_pabulib
from poolpb.genio.synthetic import FAMILIES, SyntheticConfig, gen_synthetic

log = logging.getLogger("poolpb")

SOLVE_ALGORITHMS = (
    "oracle-uwo",
    "oracle-uwowp",
    "uwo-fptas",
    "greedy",
    "symmetric",
    "laminar-fptas",
    "maxpe",
    "identical-costs",
)
# outcomes of these may charge agents more than they gain
NO_PARTICIPATION = {"oracle-uwo", "uwo-fptas", "identical-costs"}
# complementary valuations have zero singleton values, so skip the coverage test
NO_COVERAGE_CHECK = {"laminar-fptas", "maxpe"}

EXIT_USAGE, EXIT_INPUT, EXIT_PRECONDITION = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write(path, text: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def solve(I, algorithm: str, eps=None):
    if algorithm == "oracle-uwo":
        r = oracle.brute_uwo(I)
        return make_report(I, r.best, prefix_fill(I.budgets, I.cost_of(r.best)), algorithm, ties=r.tie_count)
    if algorithm == "oracle-uwowp":
        r = oracle.brute_uwo_wp(I)
        return make_report(I, r.best, wp_payments(I, r.best), algorithm, ties=r.tie_count)
    if algorithm == "maxpe":
        if I.valuation_kinds() == {"single_minded"}:
            W, _ = solvers.maxpe_single_minded(I)
        else:
            W = oracle.brute_maxpe(I).best
        return make_report(I, W, wp_payments(I, W), algorithm)
    if algorithm == "greedy":
        return solvers.greedy_uwowp(I)
    if algorithm == "symmetric":
        return solvers.symmetric_uwowp(I)
    if algorithm == "identical-costs":
        return solvers.uwo_identical_costs(I)
    if algorithm == "uwo-fptas":
        return solvers.uwo_additive_fptas(I, *([] if eps is None else [eps]))
    if algorithm == "laminar-fptas":
        return solvers.uwowp_laminar_fptas(I, *([] if eps is None else [eps]))
    raise InputError(f"unknown algorithm {algorithm!r}")


def _note(x):
    if isinstance(x, frozenset):
        return sorted(x)
    if isinstance(x, int) and not isinstance(x, bool):
        return x
    return fmt_rational(as_rational(x))


def cmd_solve(args) -> int:
    eps = None
    if args.epsilon is not None:
        try:
            eps = as_rational(args.epsilon)
        except (TypeError, ValueError) as exc:
            raise InputError(f"--epsilon: {exc}") from None
    raw = instance_from_dict(parse_json(_read(args.input)))
    I = validate_instance(raw, check_coverage=args.algorithm not in NO_COVERAGE_CHECK)
    report = solve(I, args.algorithm, eps)
    doc = report_to_dict(I, report)
    doc["notes"] = {k: _note(v) for k, v in report.notes.items()}
    if I.m != raw.m:
        doc["notes"]["dropped_projects"] = raw.m - I.m
    _write(args.output, json.dumps(doc, indent=1) + "\n")
    print(f"{args.algorithm}: funded {sorted(report.funded)} welfare {fmt_rational(report.welfare)}", file=sys.stderr)
    return 0


def cmd_gen(args) -> int:
    I = gen_synthetic(SyntheticConfig(args.family, args.n, args.m, args.seed))
    _write(args.output, save_instance(I))
    return 0


def cmd_experiment(args) -> int:
    res = run_experiment(load_spec(args.spec))
    _write(args.out_csv, res.trials_csv())
    if args.summary_csv:
        _write(args.summary_csv, res.summary_csv())
    else:
        sys.stderr.write(res.summary_csv())
    return 0


def cmd_convert(args) -> int:
    E = parse_pabulib(_read(args.input))
    _write(args.output, save_instance(pabulib_to_instance(E)))
    return 0


def cmd_pabulib_bench(args) -> int:
    if not Path(args.dir).is_dir():
        raise InputError(f"{args.dir} is not a directory")
    out = summarize_pabulib(args.dir, args.algorithm)
    _write(args.out_csv, out.csv())
    s = out.summary
    for name, reason in out.skipped:
        print(f"skipped {name}: {reason}", file=sys.stderr)
    print(f"elections: {s.count}  skipped: {len(out.skipped)}", file=sys.stderr)
    if s.count:
        print(
            f"ratio > 0.98: {float(out.fraction_above('49/50')):.1%}  ratio > 0.75: {float(out.fraction_above('3/4')):.1%}  "
            f"median: {float(s.median):.4f}  p10: {float(s.p10):.4f}",
            file=sys.stderr,
        )
    return 0


def cmd_check(args) -> int:
    doc = parse_json(_read(args.input))
    if isinstance(doc, dict) and "instance" in doc:
        I, o = outcome_from_dict(doc)
        validate_instance(I, check_coverage=False)
        require_wp = doc.get("algorithm") not in NO_PARTICIPATION
        problems = outcome_problems(I, o, require_wp=require_wp)
        if not problems:
            pe = payment_excess(I, to_mask(o.funded, I.m))
            print(f"outcome ok: funded {sorted(o.funded)}, payment excess {fmt_rational(pe)}")
            return 0
        for p in problems:
            print(f"invalid outcome: {p}", file=sys.stderr)
        return EXIT_INPUT
    I = validate_instance(instance_from_dict(doc), drop_uncoverable=False, check_coverage=False)
    print(f"instance ok: {I.n} agents, {I.m} projects, valuations {sorted(I.valuation_kinds())}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="poolpb", description="Participatory budgeting with pooled private budgets.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress and warnings")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve an instance document")
    s.add_argument("--input", required=True)
    s.add_argument("--algorithm", required=True, choices=SOLVE_ALGORITHMS)
    s.add_argument("--epsilon", help="approximation parameter as p/q (FPTAS only)")
    s.add_argument("--output", default="-")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("gen", help="generate a synthetic instance")
    s.add_argument("--family", required=True, choices=FAMILIES)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--output", default="-")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("experiment", help="run a synthetic welfare-ratio sweep")
    s.add_argument("--spec", required=True)
    s.add_argument("--out-csv", required=True)
    s.add_argument("--summary-csv", help="per-cell median/p10 table (default: stderr)")
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("convert-pabulib", help="convert a Pabulib approval election")
    s.add_argument("--input", required=True)
    s.add_argument("--output", default="-")
    s.set_defaults(func=cmd_convert)

    s = sub.add_parser("pabulib-bench", help="welfare ratios over a directory of .pb files")
    s.add_argument("--dir", required=True)
    s.add_argument("--out-csv", required=True)
    s.add_argument("--algorithm", default="greedy", choices=("greedy",))
    s.set_defaults(func=cmd_pabulib_bench)

    s = sub.add_parser("check", help="validate an instance or a solve report")
    s.add_argument("--input", required=True)
    s.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"poolpb: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (InputError, OSError) as exc:
        print(f"poolpb: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
