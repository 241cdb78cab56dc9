"""Welfare-ratio experiments: synthetic sweeps and Pabulib benchmarks.

The ratio of a run is ``SW(algorithm) / SW(best WP-fundable set)``, with
``1`` when both are zero and ``0`` when only the optimum is positive.
Percentiles use the nearest-rank rule.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from pathlib import Path

from poolpb import oracle, solvers
from poolpb.core import Instance, as_rational, validate_instance
from poolpb.errors import InputError, OracleCapExceeded, PoolPBError, SchemaError
from poolpb.genio.instance_io import parse_json
from poolpb.genio.pabulib import pabulib_to_instance, parse_pabulib
from poolpb.genio.synthetic import FAMILIES, SyntheticConfig, gen_synthetic

log = logging.getLogger(__name__)

TRIAL_COLUMNS = ["family", "n", "m", "trial", "seed", "alg_sw", "opt_sw", "ratio", "alg_ms", "opt_ms"]
SUMMARY_COLUMNS = ["cell", "family", "n", "m", "trials", "median", "p10", "mean", "min"]
PABULIB_COLUMNS = ["election", "n", "m", "alg_sw", "opt_sw", "ratio"]
PABULIB_MAX_PROJECTS = 20
ALGORITHMS = ("greedy", "uwo-fptas", "laminar-fptas", "symmetric", "identical-costs")


def run_algorithm(name: str, I: Instance, eps=None):
    """Dispatch by command-line algorithm name; returns a SolveReport."""
    if name == "greedy":
        return solvers.greedy_uwowp(I)
    if name == "uwo-fptas":
        return solvers.uwo_additive_fptas(I, Fraction(1, 10) if eps is None else eps)
    if name == "laminar-fptas":
        return solvers.uwowp_laminar_fptas(I, Fraction(1, 10) if eps is None else eps)
    if name == "symmetric":
        return solvers.symmetric_uwowp(I)
    if name == "identical-costs":
        return solvers.uwo_identical_costs(I)
    raise InputError(f"unknown algorithm {name!r}")


def welfare_ratio(alg_sw: Fraction, opt_sw: Fraction) -> Fraction:
    if opt_sw == 0:
        return Fraction(1) if alg_sw == 0 else Fraction(0)
    return alg_sw / opt_sw


def fraction_above(ratios, threshold) -> Fraction:
    if not ratios:
        return Fraction(0)
    return Fraction(sum(1 for r in ratios if r > threshold), len(ratios))


def nearest_rank(sorted_values, q: Fraction):
    k = len(sorted_values)
    return sorted_values[max(1, ceil(q * k)) - 1]


@dataclass(frozen=True)
class RatioSummary:
    count: int
    median: Fraction = None
    p10: Fraction = None
    mean: Fraction = None
    min: Fraction = None

    @classmethod
    def of(cls, ratios) -> "RatioSummary":
        xs = sorted(ratios)
        if not xs:
            return cls(0)
        return cls(len(xs), nearest_rank(xs, Fraction(1, 2)), nearest_rank(xs, Fraction(1, 10)), sum(xs, Fraction(0)) / len(xs), xs[0])


@dataclass(frozen=True)
class ExperimentSpec:
    families: tuple
    n_list: tuple
    m: int
    trials: int
    base_seed: int
    algorithm: str = "greedy"
    oracle: bool = True
    record_timings: bool = False

    def __post_init__(self):
        bad = [f for f in self.families if f not in FAMILIES]
        if bad or not self.families:
            raise SchemaError("families", f"expected a non-empty subset of {list(FAMILIES)}")
        if not self.n_list or any(n < 1 for n in self.n_list):
            raise SchemaError("n_list", "agent counts must be at least 1")
        if self.m < 1:
            raise SchemaError("m", "must be at least 1")
        if self.trials < 1:
            raise SchemaError("trials", "must be at least 1")
        if self.algorithm not in ALGORITHMS:
            raise SchemaError("algorithm", f"expected one of {list(ALGORITHMS)}")
        if self.oracle and self.m > oracle.MAX_PROJECTS:
            raise OracleCapExceeded(f"m = {self.m} exceeds the brute-force cap of {oracle.MAX_PROJECTS}")

    @classmethod
    def from_dict(cls, doc) -> "ExperimentSpec":
        if not isinstance(doc, dict):
            raise SchemaError("", "expected an object")

        def get(key, kind, default=None):
            if key not in doc:
                if default is None:
                    raise SchemaError(key)
                return default
            x = doc[key]
            if kind is int and (isinstance(x, bool) or not isinstance(x, int)):
                raise SchemaError(key, "expected an integer")
            if kind is bool and not isinstance(x, bool):
                raise SchemaError(key, "expected true or false")
            if kind is list and not isinstance(x, list):
                raise SchemaError(key, "expected a list")
            return x

        n_list = get("n_list", list)
        if any(isinstance(n, bool) or not isinstance(n, int) for n in n_list):
            raise SchemaError("n_list", "expected integers")
        return cls(
            families=tuple(get("families", list)),
            n_list=tuple(n_list),
            m=get("m", int),
            trials=get("trials", int),
            base_seed=get("base_seed", int),
            algorithm=doc.get("algorithm", "greedy"),
            oracle=get("oracle", bool, True),
            record_timings=get("record_timings", bool, False),
        )

    def cells(self):
        k = 0
        for family in self.families:
            for n in self.n_list:
                yield k, family, n
                k += 1


def trial_seed(base: int, cell: int, trial: int) -> int:
    return (base ^ (cell << 32) ^ trial) % (1 << 64)


@dataclass
class ExperimentResult:
    rows: list = field(default_factory=list)
    cells: list = field(default_factory=list)  # (cell, family, n, m, RatioSummary)

    def trials_csv(self) -> str:
        return _csv(TRIAL_COLUMNS, self.rows)

    def summary_csv(self) -> str:
        out = []
        for cell, family, n, m, s in self.cells:
            out.append([cell, family, n, m, s.count] + [_dec(getattr(s, k)) for k in ("median", "p10", "mean", "min")])
        return _csv(SUMMARY_COLUMNS, out)


def _dec(x, places=6) -> str:
    if x is None:
        return ""
    return f"{float(x):.{places}f}"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    res = ExperimentResult()
    for cell, family, n in spec.cells():
        ratios = []
        for t in range(spec.trials):
            seed = trial_seed(spec.base_seed, cell, t)
            I = gen_synthetic(SyntheticConfig(family, n, spec.m, seed))
            t0 = time.perf_counter()
            alg = run_algorithm(spec.algorithm, I)
            alg_ms = (time.perf_counter() - t0) * 1000
            opt_sw = ratio = opt_ms = None
            if spec.oracle:
                t0 = time.perf_counter()
                opt_sw = oracle.brute_uwo_wp(I).objective
                opt_ms = (time.perf_counter() - t0) * 1000
                ratio = welfare_ratio(alg.welfare, opt_sw)
                ratios.append(ratio)
            timings = [f"{alg_ms:.3f}", "" if opt_ms is None else f"{opt_ms:.3f}"] if spec.record_timings else ["", ""]
            res.rows.append([family, n, spec.m, t, seed, _dec(alg.welfare, 9), _dec(opt_sw, 9), _dec(ratio)] + timings)
        res.cells.append((cell, family, n, spec.m, RatioSummary.of(ratios)))
    return res


def load_spec(path) -> ExperimentSpec:
    return ExperimentSpec.from_dict(parse_json(Path(path).read_text()))


# --------------------------------------------------------------------------
# Pabulib
# --------------------------------------------------------------------------


@dataclass
class PabulibSummary:
    rows: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    skipped: list = field(default_factory=list)  # (file name, reason)

    @property
    def summary(self) -> RatioSummary:
        return RatioSummary.of(self.ratios)

    def fraction_above(self, threshold) -> Fraction:
        return fraction_above(self.ratios, as_rational(threshold))

    def csv(self) -> str:
        return _csv(PABULIB_COLUMNS, self.rows)


def summarize_pabulib(directory, algorithm: str = "greedy") -> PabulibSummary:
    out = PabulibSummary()
    for path in sorted(Path(directory).glob("*.pb")):
        try:
            E = parse_pabulib(path.read_text(encoding="utf-8"))
            if len(E.projects) > PABULIB_MAX_PROJECTS:
                raise InputError(f"{len(E.projects)} projects (limit {PABULIB_MAX_PROJECTS})")
            I = validate_instance(pabulib_to_instance(E))
            alg = run_algorithm(algorithm, I)
            opt = oracle.brute_uwo_wp(I).objective
        except (PoolPBError, OSError, UnicodeDecodeError) as exc:
            log.warning("skipping %s: %s: %s", path.name, type(exc).__name__, exc)
            out.skipped.append((path.name, f"{type(exc).__name__}: {exc}"))
            continue
        r = welfare_ratio(alg.welfare, opt)
        out.ratios.append(r)
        out.rows.append([path.name, I.n, I.m, _dec(alg.welfare, 9), _dec(opt, 9), _dec(r)])
    return out


def spec_to_json(spec: ExperimentSpec) -> str:
    return json.dumps(
        {
            "families": list(spec.families),
            "n_list": list(spec.n_list),
            "m": spec.m,
            "trials": spec.trials,
            "base_seed": spec.base_seed,
            "algorithm": spec.algorithm,
            "oracle": spec.oracle,
            "record_timings": spec.record_timings,
        },
        indent=1,
    )
