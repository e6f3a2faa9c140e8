"""Command-line driver.

Exit codes: 0 success, 1 invariant failure, 2 configuration/usage error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
import traceback
from dataclasses import replace
from pathlib import Path

from . import __version__, config, runner
from .errors import ConfigError, NumericalError

log = logging.getLogger("qesphase")

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qesphase", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, needs_config: bool):
        p.add_argument("--config", required=needs_config, help="flat TOML run configuration")
        p.add_argument("--out", help="output directory (overrides the config 'out' key)")
        p.add_argument("--steps", type=int, help="quadrature steps (even, >= 16)")
        p.add_argument("--tail-tol", type=float, help="photon-number tail tolerance")

    p = sub.add_parser("single", help="one full phase report as JSON")
    common(p, True)
    p = sub.add_parser("sweep", help="sweep one parameter; CSV + JSON summary + figure")
    common(p, True)
    p.add_argument("--no-plot", action="store_true", help="skip the PNG figure")
    p = sub.add_parser("verify", help="randomized oracle-equivalence and invariant harness")
    common(p, False)
    p.add_argument("--seed", type=int, help="generator seed (default 0)")
    p.add_argument("--instances", type=int, help="number of random instances (default 100)")
    return parser


def _load(args) -> config.RunConfig:
    cfg = config.load(args.config)
    overrides = {}
    if args.steps is not None:
        overrides["quadrature_steps"] = args.steps
    if args.tail_tol is not None:
        overrides["tail_tol"] = args.tail_tol
    if args.out is not None:
        overrides["out"] = args.out
    return config.validate(replace(cfg, **overrides)) if overrides else cfg


def _out_dir(path: str | None) -> Path:
    return Path(path if path else ".")


def cmd_single(args) -> int:
    cfg = _load(args)
    if cfg.sweep is not None:
        raise ConfigError("config has a sweep axis; use the 'sweep' subcommand")
    report, payload = runner.run_single(cfg)
    dest = runner.write_text(_out_dir(cfg.out) / "single.json", runner.dumps(payload))
    print(f"beta_closed = {report.beta_closed!r}  beta_quadrature = {report.beta_quadrature!r}")
    print(f"wrote {dest}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args)
    if cfg.sweep is None:
        raise ConfigError("config has no sweep_variable; use the 'single' subcommand")
    out = _out_dir(cfg.out)
    targets = [out / "sweep.csv", out / "sweep.json"]
    if not args.no_plot:
        targets.append(out / "sweep.png")
    try:
        rows, summary = runner.run_sweep(cfg)
        runner.write_text(targets[0], runner.rows_to_csv(rows))
        runner.write_text(targets[1], runner.dumps(summary))
        if not args.no_plot:
            from .plotting import plot_sweep

            plot_sweep(rows, cfg.sweep.variable, targets[2], summary.get("cosine_fit"))
    except BaseException:
        for path in targets:
            path.unlink(missing_ok=True)
        raise
    if "cosine_fit" in summary:
        fit = summary["cosine_fit"]
        print(f"cosine fit: c0 = {fit['c0']!r}  c1 = {fit['c1']!r}  residual = {fit['residual']:.3e}")
    for path in targets:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_verify

    settings = config.verify_settings(config.load_raw(args.config)) if args.config else {}
    seed = settings.get("seed", 0)
    instances = settings.get("instances", 100)
    steps = args.steps if args.steps is not None else settings.get("steps")
    out = args.out if args.out is not None else settings.get("out")
    if args.seed is not None:
        seed = args.seed
    if args.instances is not None:
        instances = args.instances
    if instances < 1:
        raise ConfigError(f"--instances must be >= 1, got {instances}")
    if steps is not None and (steps < 16 or steps % 2):
        raise ConfigError(f"--steps must be an even integer >= 16, got {steps}")

    result = run_verify(seed, instances) if steps is None else run_verify(seed, instances, steps)
    text = "\n".join(result.lines()) + "\n"
    sys.stdout.write(text)
    if out:
        runner.write_text(Path(out) / "verify.txt", text)
        runner.write_text(Path(out) / "verify.json", runner.dumps(result.to_dict()))
    if not result.passed:
        for failure in result.failures:
            print("failing instance:", runner.dumps(failure).strip(), file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def _numerical_failure(exc: Exception, args) -> int:
    payload = {"version": __version__, "error": type(exc).__name__, "message": str(exc)}
    text = runner.dumps(payload)
    print(text, file=sys.stderr, end="")
    out = getattr(args, "out", None)
    if out:
        runner.write_text(Path(out) / "error.json", text)
    return EXIT_NUMERICAL


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as exc:
        print(f"qesphase: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handler = {"single": cmd_single, "sweep": cmd_sweep, "verify": cmd_verify}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"qesphase: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        log.debug("numerical failure", exc_info=True)
        return _numerical_failure(exc, args)
    except (ArithmeticError, ValueError) as exc:
        log.debug(traceback.format_exc())
        return _numerical_failure(exc, args)


if __name__ == "__main__":
    sys.exit(main())
