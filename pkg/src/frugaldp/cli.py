"""Command-line front end: CSV ingestion, parameter validation, release, JSON report.

Usage:
    frugaldp --mode approx --epsilon 1 --delta 0.25 --input data.csv --seed 7
    frugaldp --mode pure --epsilon 0.5 --s 8 --input data.csv --output out.json

The input is a CSV with a header row naming d binary predicates and one
row of 0/1 cells per dataset member. The output is a single JSON object
with the released values, every derived parameter (enclosure endpoints
included), the exact randomness accounting, and wall time. Epsilon and
delta are parsed as decimal strings into exact rationals; no float touches
the parameter path.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .approx_mech import CountVector, derive_approx_params, mech_approx_efficient
from .audit_harness import (
    accuracy_audit,
    chi_square,
    oracle_joint_dist_approx,
    oracle_joint_dist_pure,
    randomness_audit,
    tv_distance,
)
from .bit_tape import BitTape, _SplitMix64
from .errors import DatasetFormatError, FrugalDPError, ParameterDomainError
from .pure_mech import derive_pure_params, mech_pure_efficient

EXIT_OK = 0
EXIT_PARAMETER = 2
EXIT_IO = 3

_AUDIT_TRIALS = 200
_EQUIVALENCE_TRIALS = 20000


@dataclass(frozen=True)
class RunConfig:
    """One validated CLI invocation."""

    mode: str
    epsilon: Fraction
    delta: Fraction | None
    s: int | None
    seed: int | None
    input_path: str
    output_path: str | None
    audit: str = "none"

    def __post_init__(self):
        if self.mode not in ("approx", "pure"):
            raise ParameterDomainError("mode must be approx or pure")
        if self.mode == "approx" and self.delta is None:
            raise ParameterDomainError("approx mode requires --delta")
        if self.mode == "pure" and self.delta is not None:
            raise ParameterDomainError("pure mode forbids --delta")
        if self.s is not None and self.s < 1:
            raise ParameterDomainError("s must be a positive integer")
        if self.audit not in ("none", "randomness", "accuracy", "equivalence"):
            raise ParameterDomainError("unknown audit mode")


def load_dataset(path: str) -> CountVector:
    """Stream a binary-predicate CSV into column sums using O(d) memory."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetFormatError("empty file: missing header row") from None
        d = len(header)
        if d < 1 or any(not name.strip() for name in header):
            raise DatasetFormatError("header must name at least one predicate", row=1)
        sums = [0] * d
        n = 0
        for line, row in enumerate(reader, start=2):
            if not row:
                continue  # tolerate a trailing blank line
            if len(row) != d:
                raise DatasetFormatError(
                    f"row {line} has {len(row)} cells, expected {d}", row=line
                )
            for col, cell in enumerate(row):
                value = cell.strip()
                if value == "1":
                    sums[col] += 1
                elif value != "0":
                    raise DatasetFormatError(
                        f"row {line}, column {col + 1}: non-binary cell {cell!r}",
                        row=line,
                        column=col + 1,
                    )
            n += 1
    return CountVector(d=d, n=n, sums=tuple(sums))


def _interval_endpoints(iv) -> list[float]:
    return [float(iv.lo), float(iv.hi)]


def _params_block(params, mode: str) -> dict:
    if mode == "approx":
        return {
            "epsilon": str(params.epsilon),
            "delta": str(params.delta),
            "s": params.s,
            "sigma_sq": _interval_endpoints(params.sigma_sq_interval),
            "sigma_sq_pinned": str(params.sigma_sq),
            "gamma": _interval_endpoints(params.gamma),
            "r": params.r,
            "grid": params.grid,
        }
    return {
        "epsilon": str(params.epsilon),
        "s": params.s,
        "m": params.m,
        "scale": str(params.scale.t),
        "p": _interval_endpoints(params.p),
        "grid": params.grid,
    }


def _trial_seeds(seed: int | None, count: int) -> list[int | None]:
    if seed is None:
        return [None] * count
    gen = _SplitMix64(seed)
    return [gen.next_word() for _ in range(count)]


def _run_audit(config: RunConfig, counts: CountVector, params) -> dict:
    mode = config.mode
    if config.audit == "randomness":
        results, traces = [], []
        for trial_seed in _trial_seeds(config.seed, _AUDIT_TRIALS):
            tape = BitTape(seed=trial_seed)
            if mode == "approx":
                results.append(mech_approx_efficient(counts, params, tape))
            else:
                result, trace = mech_pure_efficient(counts, params, tape)
                results.append(result)
                traces.append(trace)
        return randomness_audit(results, traces or None)
    if config.audit == "accuracy":
        if mode == "approx":
            alpha, beta = params.accuracy_bound, 0.0
        else:
            beta = 0.1
            alpha = float(params.scale.t) * math.log(counts.d / beta) + 2 * params.grid
        results = []
        for trial_seed in _trial_seeds(config.seed, _AUDIT_TRIALS):
            tape = BitTape(seed=trial_seed)
            if mode == "approx":
                results.append(mech_approx_efficient(counts, params, tape))
            else:
                results.append(mech_pure_efficient(counts, params, tape)[0])
        return accuracy_audit(results, counts, alpha, beta)
    # equivalence: exact oracle comparison, tractable only at desk scale
    if counts.d > 3 or params.s > 8 or params.grid > 256:
        raise ParameterDomainError(
            "equivalence audit needs desk-scale parameters (d <= 3, s <= 8, grid <= 256)"
        )
    oracle = (
        oracle_joint_dist_approx(counts, params)
        if mode == "approx"
        else oracle_joint_dist_pure(counts, params)
    )
    histogram: Counter = Counter()
    for trial_seed in _trial_seeds(config.seed, _EQUIVALENCE_TRIALS):
        tape = BitTape(seed=trial_seed)
        if mode == "approx":
            histogram[mech_approx_efficient(counts, params, tape).values] += 1
        else:
            histogram[mech_pure_efficient(counts, params, tape)[0].values] += 1
    return {
        "trials": _EQUIVALENCE_TRIALS,
        "chi_square_p": chi_square(histogram, oracle),
        "tv_distance": float(tv_distance(histogram, oracle)),
    }


def run(config: RunConfig) -> tuple[int, dict]:
    """Execute one release; returns (exit_code, json_report)."""
    started = time.perf_counter()
    try:
        counts = load_dataset(config.input_path)
    except DatasetFormatError as exc:
        return EXIT_IO, {"error": str(exc)}
    except OSError as exc:
        return EXIT_IO, {"error": f"cannot read {config.input_path}: {exc}"}
    s = config.s if config.s is not None else counts.d
    try:
        if config.mode == "approx":
            params = derive_approx_params(config.epsilon, config.delta, counts.d, s)
        else:
            params = derive_pure_params(config.epsilon, counts.d, s)
        tape = BitTape(seed=config.seed)
        tail_count = 0
        if config.mode == "approx":
            result = mech_approx_efficient(counts, params, tape)
        else:
            result, trace = mech_pure_efficient(counts, params, tape)
            tail_count = trace.tail_size
        audit_block = None
        if config.audit != "none":
            audit_block = _run_audit(config, counts, params)
    except ParameterDomainError as exc:
        return EXIT_PARAMETER, {"error": str(exc)}
    except FrugalDPError as exc:
        return EXIT_PARAMETER, {"error": str(exc)}
    report = {
        "values": list(result.values),
        "params": _params_block(params, config.mode),
        "randomness": {
            "bits_total": result.report.bits_total,
            "bits_by_category": dict(sorted(result.report.bits_by_category.items())),
            "boundary_count": len(result.report.boundary_coordinates),
            "tail_count": tail_count,
        },
        "meta": {
            "n": counts.n,
            "d": counts.d,
            "seed": config.seed,
            "mode": config.mode,
            "wall_time_s": time.perf_counter() - started,
        },
    }
    if audit_block is not None:
        report["audit"] = audit_block
    return EXIT_OK, report


def _fraction_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not an exact decimal or rational: {text!r}") from exc


def _seed_arg(text: str) -> int:
    value = int(text)
    if not 0 <= value < (1 << 64):
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frugaldp",
        description="Differentially private counting-query release with metered randomness.",
    )
    parser.add_argument("--mode", required=True, choices=("approx", "pure"))
    parser.add_argument("--epsilon", required=True, type=_fraction_arg)
    parser.add_argument("--delta", type=_fraction_arg, default=None)
    parser.add_argument("--s", type=int, default=None, help="grid coarseness (default: d)")
    parser.add_argument("--seed", type=_seed_arg, default=None)
    parser.add_argument("--input", required=True, dest="input_path")
    parser.add_argument("--output", dest="output_path", default=None)
    parser.add_argument(
        "--audit",
        choices=("none", "randomness", "accuracy", "equivalence"),
        default="none",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig(
            mode=args.mode,
            epsilon=args.epsilon,
            delta=args.delta,
            s=args.s,
            seed=args.seed,
            input_path=args.input_path,
            output_path=args.output_path,
            audit=args.audit,
        )
    except ParameterDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    code, report = run(config)
    text = json.dumps(report, indent=2, sort_keys=True)
    if config.output_path and code == EXIT_OK:
        try:
            with open(config.output_path, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            print(f"error: cannot write {config.output_path}: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        print(text)
    if code != EXIT_OK:
        print(f"error: {report.get('error', 'failed')}", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
