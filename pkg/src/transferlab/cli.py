"""Command-line driver: run sweeps, fit rates, dump instances, verify oracles.

Exit codes are a stable contract: 0 on success, 1 when a check or
precondition fails, 2 on usage errors (argparse's default).

Risk tables are persisted as CSV with floats at 17 significant digits, which
round-trips doubles losslessly; everything downstream (the rate reports and
the external plotting frontend) consumes this one format.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .checks import closed_form_checks, exact_risk_checks
from .errors import InsufficientDataError, TransferLabError
from .estimators import EstimatorKind
from .harness import RiskEstimate, RiskRow, RiskTable, fit_rate, sweep
from .instances import InstanceKind, InstanceSpec, make_instance
from .sampling import RngSeed

CSV_HEADER = "instance,estimator,S,A,n,repeats,mean_risk,stderr,seed"


def format_float(x: float) -> str:
    return f"{x:.17g}"


def write_risk_csv(path, table: RiskTable) -> None:
    lines = [CSV_HEADER]
    for row in table.rows:
        lines.append(
            ",".join(
                (
                    str(int(row.instance)),
                    row.estimator.value,
                    str(row.num_inputs),
                    str(row.num_labels),
                    str(row.n),
                    str(row.estimate.repeats),
                    format_float(row.estimate.mean),
                    format_float(row.estimate.stderr),
                    str(row.seed),
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def read_risk_csv(path) -> RiskTable:
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise TransferLabError(f"{path}: missing or malformed header")
    table = RiskTable()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != 9:
            raise TransferLabError(f"{path}:{lineno}: expected 9 fields, got {len(fields)}")
        try:
            row = RiskRow(
                instance=InstanceKind(int(fields[0])),
                estimator=EstimatorKind(fields[1]),
                num_inputs=int(fields[2]),
                num_labels=int(fields[3]),
                n=int(fields[4]),
                estimate=RiskEstimate(
                    mean=float(fields[6]), stderr=float(fields[7]), repeats=int(fields[5])
                ),
                seed=int(fields[8]),
            )
        except (ValueError, TransferLabError) as exc:
            raise TransferLabError(f"{path}:{lineno}: {exc}") from exc
        table.append(row)
    return table


def _parse_int_list(text: str, what: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part]
    except ValueError:
        raise TransferLabError(f"could not parse {what} list {text!r}") from None


def _parse_estimators(text: str) -> list[EstimatorKind]:
    kinds = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            kinds.append(EstimatorKind(part))
        except ValueError:
            valid = "|".join(k.value for k in EstimatorKind)
            raise TransferLabError(f"unknown estimator {part!r} (expected {valid})") from None
    if not kinds:
        raise TransferLabError("no estimators selected")
    return kinds


def cmd_simulate(args) -> int:
    n_list = _parse_int_list(args.n, "sample size")
    estimators = _parse_estimators(args.estimators)
    table = sweep(
        InstanceKind(args.instance),
        args.S,
        args.A,
        n_list,
        estimators,
        args.repeats,
        RngSeed(args.seed),
        workers=args.workers,
    )
    write_risk_csv(args.out, table)
    return 0


def rates_records(
    table: RiskTable,
    instance: int | None = None,
    estimators: list[EstimatorKind] | None = None,
) -> list[dict]:
    """Regress each selected (instance, estimator) series of a risk table."""
    groups: dict[tuple[int, str], list[RiskRow]] = {}
    for row in table.rows:
        if instance is not None and int(row.instance) != instance:
            continue
        if estimators is not None and row.estimator not in estimators:
            continue
        groups.setdefault((int(row.instance), row.estimator.value), []).append(row)
    if not groups:
        raise InsufficientDataError("no rows match the requested filter")
    records = []
    for (inst, est), rows in sorted(groups.items()):
        try:
            result = fit_rate((row.n, row.estimate.mean) for row in rows)
        except InsufficientDataError as exc:
            raise InsufficientDataError(f"instance {inst}, estimator {est}: {exc}") from exc
        records.append(
            {
                "instance": inst,
                "estimator": est,
                "points": result.points,
                "dropped": result.dropped,
                "slope": result.slope,
                "intercept": result.intercept,
                "r_squared": result.r_squared,
            }
        )
    return records


def format_rates_report(records: list[dict]) -> str:
    blocks = []
    for record in records:
        blocks.append(
            "\n".join(
                (
                    f"instance: {record['instance']}",
                    f"estimator: {record['estimator']}",
                    f"points: {record['points']}",
                    f"dropped: {record['dropped']}",
                    f"slope: {format_float(record['slope'])}",
                    f"intercept: {format_float(record['intercept'])}",
                    f"r_squared: {format_float(record['r_squared'])}",
                )
            )
        )
    return "\n\n".join(blocks) + "\n"


def cmd_rates(args) -> int:
    table = read_risk_csv(getattr(args, "in"))
    estimators = _parse_estimators(args.estimators) if args.estimators else None
    records = rates_records(table, args.instance, estimators)
    report = format_rates_report(records)
    if args.out:
        Path(args.out).write_text(report)
    else:
        sys.stdout.write(report)
    return 0


def cmd_instance_dump(args) -> int:
    spec = InstanceSpec(InstanceKind(args.instance), args.S, args.A, args.n)
    rho, pi_star = make_instance(spec)
    print("rho:")
    print(" ".join(f"{p:.6f}" for p in rho.probs))
    print("pi_star:")
    for row in pi_star.rows:
        print(" ".join(f"{p:.6f}" for p in row))
    return 0


def cmd_verify(args) -> int:
    results = []
    if args.scope in ("closed-forms", "all"):
        results.extend(closed_form_checks(seed=args.seed, step=args.step))
    if args.scope in ("exact-risk", "all"):
        results.extend(
            exact_risk_checks(seed=args.seed, repeats=args.repeats, workers=args.workers)
        )
    for result in results:
        print(result.line())
    failed = sum(not result.passed for result in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transferlab",
        description="Teacher-to-student transfer simulation lab",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="run a Monte Carlo risk sweep")
    simulate.add_argument("--instance", type=int, required=True, choices=[0, 1, 2, 3])
    simulate.add_argument("--S", type=int, required=True, help="input alphabet size")
    simulate.add_argument("--A", type=int, required=True, help="label alphabet size")
    simulate.add_argument("--n", required=True, help="comma-separated sample sizes")
    simulate.add_argument(
        "--estimators",
        default="mle,empce,empsel,fullkl",
        help="comma-separated estimator tags",
    )
    simulate.add_argument("--repeats", type=int, default=2000)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--out", required=True)
    simulate.add_argument("--workers", type=int, default=1)
    simulate.set_defaults(func=cmd_simulate)

    rates = sub.add_parser("rates", help="fit log-log rate slopes from a risk CSV")
    rates.add_argument("--in", required=True, help="risk CSV from simulate")
    rates.add_argument("--instance", type=int, default=None, choices=[0, 1, 2, 3])
    rates.add_argument("--estimators", default=None)
    rates.add_argument("--out", default=None)
    rates.set_defaults(func=cmd_rates)

    dump = sub.add_parser("instance-dump", help="print an instance's distributions")
    dump.add_argument("--instance", type=int, required=True, choices=[0, 1, 2, 3])
    dump.add_argument("--S", type=int, required=True)
    dump.add_argument("--A", type=int, required=True)
    dump.add_argument("--n", type=int, default=None)
    dump.set_defaults(func=cmd_instance_dump)

    verify = sub.add_parser("verify", help="run oracle equivalence suites")
    verify.add_argument("--scope", required=True, choices=["closed-forms", "exact-risk", "all"])
    verify.add_argument("--step", type=float, default=0.02)
    verify.add_argument("--seed", type=int, default=1)
    verify.add_argument("--repeats", type=int, default=200_000)
    verify.add_argument("--workers", type=int, default=1)
    verify.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TransferLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
