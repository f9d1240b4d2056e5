"""Command-line interface.

Three subcommands:

* ``run``: execute one comparison experiment, configured by flags and/or a
  flat ``key = value`` config file (flags win).
* ``verify``: sweep seeds of near-start instances, run the fixed and exact
  adaptive policies with estimation noise, and evaluate every inequality
  check; exits nonzero if any applicable check fails.
* ``reproduce-figures``: run the four benchmark configurations (rank 2 and
  5, near and far starts) and emit CSVs, summaries, and gnuplot templates.

Exit codes: 0 success, 1 run or verification failure, 2 bad usage.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bounds import check_optimal_step, step_context_at
from .errors import FactorDescentError
from .experiments import (ExperimentConfig, INIT_FAR, INIT_NEAR, export_csv,
                          reproduce_figures, run_comparison, write_plot_script)
from .stepsize import ADAPTIVE_EXACT, FIXED_FGD, POLICY_KINDS

__all__ = ["main", "parse_config_text", "ConfigError"]


class ConfigError(ValueError):
    """Malformed config file or flag value."""


_CONFIG_KEYS = ("n", "r", "seed", "init", "policy", "max_iters", "rel_tol",
                "delta_rho", "checks", "out")

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def parse_config_text(text: str) -> dict:
    """Parse the flat config grammar: one ``key = value`` per line, ``#``
    starts a comment, repeated ``policy`` keys (or comma lists) accumulate."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if not val:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        if key == "policy":
            values.setdefault("policy", []).extend(
                part.strip() for part in val.split(",") if part.strip())
        elif key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        else:
            values[key] = val
    return values


def _parse_init(text: str) -> tuple[str, float]:
    kind, _, param = text.partition(":")
    kind = kind.strip()
    if kind not in (INIT_NEAR, INIT_FAR):
        raise ConfigError(f"init must be 'near[:SAFETY]' or 'far[:SCALE]', got {text!r}")
    if not param:
        return kind, 0.5 if kind == INIT_NEAR else 1.0
    try:
        return kind, float(param)
    except ValueError as exc:
        raise ConfigError(f"bad init parameter in {text!r}") from exc


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in _TRUE:
        return True
    if low in _FALSE:
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_seed_range(text: str) -> list[int]:
    if ".." in text:
        first, _, last = text.partition("..")
        try:
            lo, hi = int(first), int(last)
        except ValueError as exc:
            raise ConfigError(f"bad seed range {text!r}") from exc
        if hi < lo:
            raise ConfigError(f"empty seed range {text!r}")
        return list(range(lo, hi + 1))
    try:
        return [int(text)]
    except ValueError as exc:
        raise ConfigError(f"bad seed {text!r}") from exc


def _coerce(raw: dict) -> dict:
    """Config-file strings to typed values keyed like ExperimentConfig."""
    out: dict = {}
    try:
        if "n" in raw:
            out["n"] = int(raw["n"])
        if "r" in raw:
            out["r"] = int(raw["r"])
        if "seed" in raw:
            out["seed"] = int(raw["seed"])
        if "max_iters" in raw:
            out["max_iters"] = int(raw["max_iters"])
        if "rel_tol" in raw:
            out["rel_tol"] = float(raw["rel_tol"])
        if "delta_rho" in raw:
            out["delta_rho"] = float(raw["delta_rho"])
    except ValueError as exc:
        raise ConfigError(f"bad numeric value in config: {exc}") from exc
    if "init" in raw:
        out["init_kind"], out["init_param"] = _parse_init(raw["init"])
    if "policy" in raw:
        out["policies"] = tuple(raw["policy"])
    if "checks" in raw:
        out["checks_enabled"] = _parse_bool(raw["checks"])
    if "out" in raw:
        out["output_dir"] = raw["out"]
    return out


def _build_run_config(args) -> ExperimentConfig:
    values: dict = {}
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        values.update(_coerce(parse_config_text(text)))
    if args.n is not None:
        values["n"] = args.n
    if args.r is not None:
        values["r"] = args.r
    if args.seed is not None:
        values["seed"] = args.seed
    if args.init is not None:
        values["init_kind"], values["init_param"] = _parse_init(args.init)
    if args.policy:
        values["policies"] = tuple(args.policy)
    if args.max_iters is not None:
        values["max_iters"] = args.max_iters
    if args.rel_tol is not None:
        values["rel_tol"] = args.rel_tol
    if args.delta_rho is not None:
        values["delta_rho"] = args.delta_rho
    if args.checks:
        values["checks_enabled"] = True
    if args.out is not None:
        values["output_dir"] = args.out
    values.setdefault("n", 100)
    values.setdefault("r", 2)
    values.setdefault("seed", 0)
    try:
        return ExperimentConfig(**values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _cmd_run(args) -> int:
    config = _build_run_config(args)
    artifact = run_comparison(config)
    paths = export_csv(artifact)
    write_plot_script(Path(config.output_dir), list(artifact.trajectories))
    for label, entry in artifact.summary["policies"].items():
        print(f"{label}: {entry['terminated']} after {entry['iterations_run']} iterations, "
              f"final rel_error {entry['final_rel_error']:.3e}")
    for path in paths:
        print(f"wrote {path}")
    status = 0
    if artifact.failures:
        for label, message in artifact.failures.items():
            print(f"{label}: FAILED ({message})", file=sys.stderr)
        status = 1
    for label, entry in artifact.summary["checks"].items():
        if entry["failures"]:
            print(f"{label}: {entry['failures']} inequality check(s) failed",
                  file=sys.stderr)
            status = 1
    return status


def _cmd_verify(args) -> int:
    seeds = _parse_seed_range(args.seed)
    total_applicable = total_failures = 0
    for seed in seeds:
        config = ExperimentConfig(
            n=args.n, r=args.r, seed=seed, init_kind=INIT_NEAR,
            init_param=args.safety, policies=(FIXED_FGD, ADAPTIVE_EXACT),
            max_iters=args.max_iters, rel_tol=args.rel_tol,
            delta_rho=args.delta_rho, checks_enabled=True,
            output_dir=str(Path(args.out) / f"seed-{seed}") if args.out else ".")
        artifact = run_comparison(config)
        applicable = failures = 0
        for entry in artifact.summary["checks"].values():
            applicable += entry["applicable"]
            failures += entry["failures"]
        # audit the step-optimality property at every recorded transition
        optimal_failures = 0
        for traj in artifact.trajectories.values():
            for k in range(len(traj.records) - 1):
                ctx = step_context_at(artifact.problem, traj, k)
                if ctx.grad_norm_sq > ctx.grad_floor and not check_optimal_step(ctx):
                    optimal_failures += 1
        failures += optimal_failures
        if artifact.failures:
            failures += len(artifact.failures)
        if args.out:
            export_csv(artifact)
        total_applicable += applicable
        total_failures += failures
        print(f"seed {seed}: {applicable} applicable checks, {failures} failures")
    print(f"total: {total_applicable} applicable checks, {total_failures} failures "
          f"across {len(seeds)} seed(s)")
    return 1 if total_failures else 0


def _cmd_reproduce_figures(args) -> int:
    results = reproduce_figures(args.out, seed=args.seed, n=args.n,
                                max_iters=args.max_iters, rel_tol=args.rel_tol)
    status = 0
    for label, summary in results.items():
        parts = []
        for policy, entry in summary["policies"].items():
            reached = entry["iterations_to_tolerance"]
            parts.append(f"{policy}={reached if reached is not None else 'n/a'}")
        ratios = ", ".join(f"{k}={v:.2f}" for k, v in summary["iteration_ratios"].items()
                           if v is not None)
        print(f"{label}: iterations to tolerance {' '.join(parts)}"
              + (f" ({ratios})" if ratios else ""))
        if summary["failed"]:
            print(f"{label}: failed policies: {summary['failed']}", file=sys.stderr)
            status = 1
    print(f"outputs under {args.out}")
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="factordescent",
        description="Factored gradient descent benchmarks and convergence verification.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one comparison experiment")
    p_run.add_argument("--config", help="flat key = value config file")
    p_run.add_argument("--n", type=int, help="matrix dimension")
    p_run.add_argument("--r", type=int, help="factor rank")
    p_run.add_argument("--seed", type=int, help="instance seed")
    p_run.add_argument("--init", help="start: near:SAFETY or far:SCALE")
    p_run.add_argument("--policy", action="append", choices=POLICY_KINDS,
                       help="step policy (repeatable)")
    p_run.add_argument("--max-iters", type=int, dest="max_iters")
    p_run.add_argument("--rel-tol", type=float, dest="rel_tol")
    p_run.add_argument("--delta-rho", type=float, dest="delta_rho",
                       help="estimation-noise amplitude in [0, 1/2]")
    p_run.add_argument("--checks", action="store_true",
                       help="evaluate inequality checks along the runs")
    p_run.add_argument("--out", help="output directory")
    p_run.set_defaults(func=_cmd_run)

    p_verify = sub.add_parser(
        "verify", help="seed sweep of the inequality checks; nonzero exit on failure")
    p_verify.add_argument("--seed", default="1..10",
                          help="single seed or inclusive range like 1..50")
    p_verify.add_argument("--n", type=int, default=50)
    p_verify.add_argument("--r", type=int, default=3)
    p_verify.add_argument("--safety", type=float, default=0.5,
                          help="near-start fraction of the start radius")
    p_verify.add_argument("--delta-rho", type=float, dest="delta_rho", default=0.5)
    p_verify.add_argument("--max-iters", type=int, dest="max_iters", default=400)
    p_verify.add_argument("--rel-tol", type=float, dest="rel_tol", default=1e-8)
    p_verify.add_argument("--out", help="optional directory for per-seed CSV dumps")
    p_verify.set_defaults(func=_cmd_verify)

    p_fig = sub.add_parser(
        "reproduce-figures",
        help="run the four benchmark configs (rank 2/5 x near/far) and export CSVs")
    p_fig.add_argument("--out", default="figures-output")
    p_fig.add_argument("--seed", type=int, default=1)
    p_fig.add_argument("--n", type=int, default=1000,
                       help="matrix dimension (lower for smoke tests)")
    p_fig.add_argument("--max-iters", type=int, dest="max_iters", default=2000)
    p_fig.add_argument("--rel-tol", type=float, dest="rel_tol", default=1e-10)
    p_fig.set_defaults(func=_cmd_reproduce_figures)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FactorDescentError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
