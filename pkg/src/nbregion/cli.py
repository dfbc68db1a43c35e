"""Command line interface.

Subcommands
-----------
estimate   moment estimates (text or JSON) from a file of counts
region     confidence-region contours as CSV or SVG
coverage   Monte Carlo coverage of the region at known parameters
underdisp  Monte Carlo frequency of under-dispersed samples
scatter    cloud of replicate estimates as CSV

Exit codes: 0 success, 2 usage or input error, 3 degenerate sample
(zero mean or zero variance), 4 empty grid.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .distribution import NbParams
from .errors import DomainInvalid, EmptyGrid, NbRegionError, ZeroMean, ZeroVariance
from .estimation import mme, sample_stats
from .region import (
    DEFAULT_LEVELS,
    GridSpec,
    RegionProblem,
    contains,
    contour_grid,
    default_grid,
    render,
)
from .verify import coverage, estimate_cloud, underdispersion_probability

__all__ = ["main", "app"]


def _read_counts(source: str) -> list[int]:
    """Whitespace- or comma-separated integer counts from a file or stdin (-).

    ``#`` starts a comment that runs to the end of the line.
    """
    if source == "-":
        text = sys.stdin.read()
    else:
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise ValueError(f"cannot read counts from {source!r}: {exc}") from None
    values = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        for token in line.replace(",", " ").split():
            try:
                values.append(int(token))
            except ValueError:
                raise ValueError(
                    f"invalid count {token!r}: counts must be integers"
                ) from None
    return values


def _parse_floats(text: str, expected: int, option: str) -> list[float]:
    parts = text.split(",")
    if len(parts) != expected:
        raise ValueError(f"{option} expects {expected} comma-separated values")
    try:
        return [float(v) for v in parts]
    except ValueError:
        raise ValueError(f"{option} expects numeric values, got {text!r}") from None


def _parse_levels(text: str) -> tuple[float, ...]:
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("--levels must list at least one confidence level")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise ValueError(f"--levels expects numeric values, got {text!r}") from None


def _parse_gridspec(text: str) -> GridSpec:
    parts = text.split(",")
    if len(parts) != 6:
        raise ValueError(
            "--grid expects MU_MIN,MU_MAX,MU_STEPS,P_MIN,P_MAX,P_STEPS"
        )
    try:
        mu_min, mu_max, p_min, p_max = (
            float(parts[0]),
            float(parts[1]),
            float(parts[3]),
            float(parts[4]),
        )
        mu_steps, p_steps = int(parts[2]), int(parts[5])
    except ValueError:
        raise ValueError(f"--grid has a malformed value in {text!r}") from None
    return GridSpec(mu_min, mu_max, p_min, p_max, mu_steps, p_steps)


def _write_output(out: str | None, data: bytes) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(out).write_bytes(data)


def _cmd_estimate(args) -> int:
    stats = sample_stats(_read_counts(args.counts))
    est = mme(stats)
    payload = {
        "n": stats.n,
        "mean": stats.mean,
        "s2": stats.s2,
        "mu_hat": est.mu_hat,
        "p_hat": est.p_hat,
        "log_mu_hat": est.log_mu_hat,
        "log_p1_hat": est.log_p1_hat,
        "regime": est.regime.value,
    }
    if args.json:
        print(json.dumps(payload))
    else:
        for key, value in payload.items():
            print(f"{key} = {value:.12g}" if isinstance(value, float) else f"{key} = {value}")
    return 0


def _cmd_region(args) -> int:
    levels = _parse_levels(args.levels)
    if args.estimates is not None and args.counts is not None:
        raise ValueError("give either a counts file or --estimates, not both")
    if args.estimates is not None:
        if args.n is None:
            raise ValueError("--estimates requires --n (sample size)")
        mu_hat, p1_hat = _parse_floats(args.estimates, 2, "--estimates")
        if mu_hat <= 0 or p1_hat <= 0:
            raise ValueError("--estimates takes positive values MU_HAT,P1_HAT "
                             "(the dispersion entry is P_hat + 1)")
        problem = RegionProblem(math.log(mu_hat), math.log(p1_hat), args.n, levels)
        p_hat = p1_hat - 1.0
    elif args.counts is not None:
        stats = sample_stats(_read_counts(args.counts))
        est = mme(stats)
        problem = RegionProblem(est.log_mu_hat, est.log_p1_hat, stats.n, levels)
        mu_hat, p_hat = est.mu_hat, est.p_hat
    else:
        raise ValueError("either a counts file or --estimates is required")

    if args.grid is not None:
        spec = _parse_gridspec(args.grid)
    else:
        guess = NbParams(mu_hat, max(p_hat, 0.0))
        spec = default_grid(
            problem, guess, k=args.k, mu_steps=args.steps, p_steps=args.steps
        )

    grid = contour_grid(problem, spec)
    _write_output(args.out, render(grid, args.format))

    for level in problem.levels:
        sp = grid.split[level]
        print(
            f"level {level:g}: poisson_part={sp.poisson_part:.6g} "
            f"nb_part={sp.nb_part:.6g}",
            file=sys.stderr,
        )
    for point in args.check or ():
        mu, p = _parse_floats(point, 2, "--check")
        for level in problem.levels:
            try:
                verdict = "inside" if contains(problem, (mu, p), 1.0 - level) else "outside"
            except DomainInvalid:
                verdict = "domain-invalid"
            print(f"check mu={mu:g} p={p:g} level={level:g}: {verdict}", file=sys.stderr)
    return 0


def _cmd_coverage(args) -> int:
    params = NbParams(args.mu, args.p)
    report = coverage(params, args.n, _parse_levels(args.levels), args.reps, args.seed)
    _write_output(args.out, report.to_csv().encode("ascii"))
    for lc in report.levels:
        print(
            f"level {lc.level:g}: coverage={lc.coverage:.4f} (se={lc.std_error:.4f})",
            file=sys.stderr,
        )
    if report.degenerate:
        print(f"degenerate replicates: {report.degenerate}", file=sys.stderr)
    return 0


def _cmd_underdisp(args) -> int:
    params = NbParams(args.mu, args.p)
    report = underdispersion_probability(params, args.n, args.reps, args.seed)
    _write_output(args.out, report.to_csv().encode("ascii"))
    print(
        f"underdispersion proportion={report.proportion:.4f} (se={report.std_error:.4f})",
        file=sys.stderr,
    )
    return 0


def _cmd_scatter(args) -> int:
    params = NbParams(args.mu, args.p)
    cloud, degenerate = estimate_cloud(params, args.n, args.reps, args.seed)
    lines = ["mu_hat,p_hat,log_mu_hat,log_p1_hat"]
    lines.extend(
        f"{row[0]:.9g},{row[1]:.9g},{row[2]:.9g},{row[3]:.9g}" for row in cloud
    )
    _write_output(args.out, ("\n".join(lines) + "\n").encode("ascii"))
    if degenerate:
        print(f"degenerate replicates skipped: {degenerate}", file=sys.stderr)
    return 0


def _add_sim_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--mu", type=float, required=True, help="true mean, mu > 0")
    sub.add_argument("--p", type=float, default=0.0, help="true dispersion, P >= 0")
    sub.add_argument("--n", type=int, required=True, help="sample size per replicate")
    sub.add_argument("--reps", type=int, default=10_000, help="number of replicates")
    sub.add_argument("--seed", type=int, default=0, help="stream seed")
    sub.add_argument("--out", help="output file (default: stdout)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nbregion",
        description="Negative binomial moment estimates and joint confidence regions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="moment estimates from a file of counts")
    est.add_argument("counts", help="path to whitespace/comma separated counts, or - for stdin")
    est.add_argument("--json", action="store_true", help="emit JSON instead of text")
    est.set_defaults(func=_cmd_estimate)

    reg = sub.add_parser("region", help="confidence-region contours as CSV or SVG")
    reg.add_argument("counts", nargs="?", help="counts file or - (omit with --estimates)")
    reg.add_argument(
        "--estimates",
        metavar="MU_HAT,P1_HAT",
        help="skip estimation and use these values (second entry is P_hat + 1)",
    )
    reg.add_argument("--n", type=int, help="sample size behind --estimates")
    reg.add_argument(
        "--levels",
        default=",".join(str(v) for v in DEFAULT_LEVELS),
        help="comma-separated confidence levels in (0, 1)",
    )
    reg.add_argument(
        "--grid",
        metavar="MU_MIN,MU_MAX,MU_STEPS,P_MIN,P_MAX,P_STEPS",
        help="explicit evaluation window (default: +-k sd around the estimates)",
    )
    reg.add_argument("--k", type=float, default=4.0, help="half-width of the default window in sd units")
    reg.add_argument("--steps", type=int, default=256, help="grid points per axis for the default window")
    reg.add_argument("--format", choices=("csv", "svg"), default="csv")
    reg.add_argument("--out", help="output file (default: stdout)")
    reg.add_argument(
        "--check",
        action="append",
        metavar="MU,P",
        help="report whether this point is inside each level (repeatable)",
    )
    reg.set_defaults(func=_cmd_region)

    cov = sub.add_parser("coverage", help="Monte Carlo coverage at known parameters")
    _add_sim_options(cov)
    cov.add_argument(
        "--levels",
        default=",".join(str(v) for v in DEFAULT_LEVELS),
        help="comma-separated confidence levels in (0, 1)",
    )
    cov.set_defaults(func=_cmd_coverage)

    und = sub.add_parser("underdisp", help="Monte Carlo under-dispersion frequency")
    _add_sim_options(und)
    und.set_defaults(func=_cmd_underdisp)

    sca = sub.add_parser("scatter", help="cloud of replicate estimates as CSV")
    _add_sim_options(sca)
    sca.set_defaults(func=_cmd_scatter)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ZeroMean, ZeroVariance) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except EmptyGrid as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4
    except (NbRegionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def app() -> None:
    sys.exit(main())
