"""Command line front end: adaptive solve runs and fixed-grid convergence."""

import argparse
import sys

import scipy.linalg

from . import harness
from .errors import CoverageError, CoveringError, LocalConditioningError, SolveError

NUMERICAL_ERRORS = (
    CoverageError,
    CoveringError,
    LocalConditioningError,
    SolveError,
    scipy.linalg.LinAlgError,
)


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument errors raise ConfigError so main can exit with code 1."""

    def error(self, message):
        raise ConfigError(message)


def _add_common_options(parser):
    parser.add_argument("--problem", choices=["u1", "u2"], default="u1")
    parser.add_argument("--mode", choices=["grid", "halton"], default="grid")
    parser.add_argument("--epsilon", type=float, default=3.0)
    parser.add_argument("--kernel", choices=["matern6", "wendland2"], default="matern6")
    parser.add_argument("--patches-per-axis", type=int, default=0,
                        help="0 resolves the patch grid from the point count")
    parser.add_argument("--overlap", type=float, default=2.25)
    parser.add_argument("--out", default="", help="directory for reports and figures")
    parser.add_argument("--no-figures", dest="figures", action="store_false",
                        help="write delimited outputs only")
    parser.add_argument("--config", default="", help="key=value file; CLI flags override it")


def build_parser():
    parser = _Parser(prog="rbfpum", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="adaptive refinement run")
    _add_common_options(ps)
    ps.add_argument("--n-side", type=int, default=11)
    ps.add_argument("--tau-min", type=float, default=1e-8)
    ps.add_argument("--tau-max", type=float, default=1e-5)
    ps.add_argument("--indicator", choices=["interp", "coarsefine"], default="interp")
    ps.add_argument("--test-multiplier", type=float, default=2.0)
    ps.add_argument("--max-iterations", type=int, default=50)
    ps.add_argument("--max-points", type=int, default=5000)
    ps.add_argument("--separation", type=float, default=1e-4)
    ps.add_argument("--stopping", choices=["both_empty", "removal_empty"],
                    default="both_empty",
                    help="stop when both decision sets are empty, or as soon "
                         "as the removal set is")
    ps.add_argument("--dump-matrix", action="store_true",
                    help="also write the final system in COO form")

    pc = sub.add_parser("convergence", help="fixed-grid error study")
    _add_common_options(pc)
    pc.add_argument("--sides", default="9,17,33",
                    help="comma-separated grid sides, e.g. 9,17,33")
    return parser, {"solve": ps, "convergence": pc}


def _apply_config_file(subparsers, argv):
    """Seed subcommand defaults from --config so explicit flags still win."""
    probe = _Parser(add_help=False)
    probe.add_argument("--config", default="")
    known, _ = probe.parse_known_args(argv)
    if not known.config:
        return
    try:
        values = harness.parse_config_file(known.config)
    except (OSError, ValueError) as exc:
        raise ConfigError(str(exc))
    for sub in subparsers.values():
        sub.set_defaults(**values)


def _run_config_from_args(args):
    fields = {
        name: getattr(args, name)
        for name in harness.CONFIG_FIELD_TYPES
        if hasattr(args, name)
    }
    return harness.RunConfig(**fields)


def _print_history(records):
    header = f"{'k':>3} {'N_i':>6} {'N_b':>5} {'N_tot':>6} {'added':>6} {'removed':>8} {'mae':>10} {'rmse':>10} {'cn':>10}"
    print(header)
    for rec in records:
        print(
            f"{rec.k:>3} {rec.n_interior:>6} {rec.n_boundary:>5} {rec.n_total:>6} "
            f"{rec.n_added:>6} {rec.n_removed:>8} {rec.mae:>10.3e} {rec.rmse:>10.3e} "
            f"{rec.condition:>10.3e}"
        )


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subparsers = build_parser()
    try:
        _apply_config_file(subparsers, argv)
        args = parser.parse_args(argv)
        if args.command == "solve":
            config = _run_config_from_args(args)
            config.adaptive_config()  # validates threshold ordering etc.
            output = harness.run_solve(config)
            _print_history(output.result.records)
            final = output.result.records[-1]
            print(
                f"stop: {output.result.stop_reason} after {output.result.iterations} "
                f"iteration(s); N_tot={output.result.points.n_total} "
                f"mae={final.mae:.3e} rmse={final.rmse:.3e} cn={final.condition:.3e}"
            )
            if output.written:
                print(f"wrote {len(output.written)} file(s) to {config.out}")
        else:
            try:
                sides = [int(s) for s in args.sides.split(",") if s.strip()]
            except ValueError as exc:
                raise ConfigError(f"bad --sides value {args.sides!r}") from exc
            if not sides or any(s < 3 for s in sides):
                raise ConfigError("--sides needs integers >= 3")
            config = _run_config_from_args(args)
            rows = harness.run_convergence(config, sides)
            print(f"{'side':>5} {'N_tot':>6} {'mae':>11} {'rmse':>11} {'cn':>11} {'sec':>7}")
            for row in rows:
                print(
                    f"{row.side:>5} {row.n_total:>6} {row.mae:>11.4e} "
                    f"{row.rmse:>11.4e} {row.condition:>11.4e} {row.seconds:>7.2f}"
                )
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
