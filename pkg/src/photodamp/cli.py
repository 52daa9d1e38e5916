"""Command-line front end: ``photodamp compute | sweep | verify``.

Exit codes: 0 success, 1 failed verification check, 2 invalid configuration,
3 truncation or density-matrix validation failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .channel import ChannelParams, evolve
from .errors import TruncationError, ValidationError
from .fock import StateSpec, realize_state
from .photocount import (
    DetectorParams,
    analytic_number_damped,
    damped_distribution,
    distribution,
    effective_efficiency,
)
from .verify import SUITES, run_suite

log = logging.getLogger("photodamp")

TOL_ENV = "PHOTODAMP_TOL"
METHODS = ("kraus", "vectorized", "factored", "ode", "analytic", "damping-law")
CSV_COLUMNS = ("t", "n", "p", "method", "xi_effective")

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_STATE = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


def default_tol() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return 1e-10
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{TOL_ENV}={raw!r} is not a number") from None


@dataclass
class RunConfig:
    state: str
    dim: int = 32
    xi: float = 1.0
    kappa: float = 1.0
    times: list = field(default_factory=lambda: [0.0])
    method: str = "damping-law"
    output: str = "csv"
    tol: float = 1e-10
    seed: int = 0
    steps: int | None = None

    def validate(self) -> StateSpec:
        try:
            spec = StateSpec.parse(self.state)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        self.state = str(spec)
        if int(self.dim) != self.dim or self.dim < 1:
            raise ConfigError(f"dim must be a positive integer, got {self.dim!r}")
        if not 0.0 <= self.xi <= 1.0:
            raise ConfigError(f"xi must lie in [0, 1], got {self.xi!r}")
        if not (math.isfinite(self.kappa) and self.kappa >= 0):
            raise ConfigError(f"kappa must be >= 0, got {self.kappa!r}")
        if not self.times:
            raise ConfigError("at least one time is required")
        for t in self.times:
            if not (math.isfinite(t) and t >= 0):
                raise ConfigError(f"times must be finite and >= 0, got {t!r}")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {', '.join(METHODS)}")
        if self.method == "analytic" and spec.kind != "number":
            raise ConfigError("method 'analytic' requires a number state")
        if self.output not in ("csv", "json"):
            raise ConfigError("output must be csv or json")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if self.steps is not None and (int(self.steps) != self.steps or self.steps < 1):
            raise ConfigError("steps must be a positive integer")
        return spec


def parse_times(text: str) -> list[float]:
    """``a,b,c`` as a list, or ``start:stop:step`` as an inclusive range."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"time range must be start:stop:step, got {text!r}")
        start, stop, step = (float(x) for x in parts)
        if not step > 0:
            raise ConfigError("time range step must be > 0")
        if stop < start:
            raise ConfigError("time range stop must be >= start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + k * step for k in range(count)]
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse times {text!r}") from None


def _count(rho0, spec, cfg: RunConfig, t: float) -> np.ndarray:
    params = ChannelParams(cfg.kappa, t)
    det = DetectorParams(cfg.xi)
    if cfg.method == "damping-law":
        return damped_distribution(rho0, det, params)
    if cfg.method == "analytic":
        return analytic_number_damped(spec.value, det, params, cfg.dim)
    rho_t = evolve(rho0, params, cfg.method, cfg.steps)
    return distribution(rho_t, det)


def run_compute(cfg: RunConfig) -> dict:
    """Evaluate all times; raises before anything is emitted on failure."""
    spec = cfg.validate()
    rho0 = realize_state(spec, cfg.dim)
    results = []
    for t in cfg.times:
        probs = _count(rho0, spec, cfg, t)
        xi_eff = effective_efficiency(cfg.xi, ChannelParams(cfg.kappa, t)).xi
        results.append(
            {
                "t": t,
                "xi_effective": xi_eff,
                "probs": [float(p) for p in probs],
                "defects": {"normalization": abs(float(probs.sum()) - 1.0)},
            }
        )
    return {"tool": "photodamp", "version": __version__, "config": asdict(cfg), "results": results}


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    method = report["config"]["method"]
    for block in report["results"]:
        for n, p in enumerate(block["probs"]):
            writer.writerow([repr(block["t"]), n, repr(p), method, repr(block["xi_effective"])])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_config(path: str) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    if "config" in data and isinstance(data["config"], dict):
        data = data["config"]
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return data


def build_config(args, require_range: bool = False) -> RunConfig:
    values = {"tol": default_tol()}
    if args.config:
        try:
            values.update(_load_config(args.config))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    overrides = {
        "state": args.state,
        "dim": args.dim,
        "xi": args.xi,
        "kappa": args.kappa,
        "method": args.method,
        "output": args.output,
        "tol": args.tol,
        "steps": args.steps,
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    if args.time:
        values["times"] = [t for chunk in args.time for t in parse_times(chunk)]
    if args.times is not None:
        if ":" not in args.times:
            raise ConfigError("--times expects start:stop:step")
        values["times"] = parse_times(args.times)
    elif require_range and not args.config:
        raise ConfigError("sweep needs --times start:stop:step")
    if "state" not in values:
        raise ConfigError("--state is required")
    values["times"] = [float(t) for t in values.get("times", [0.0])]
    for key in ("xi", "kappa", "tol"):
        if key in values:
            values[key] = float(values[key])
    return RunConfig(**values)


def cmd_compute(args, require_range=False) -> int:
    try:
        cfg = build_config(args, require_range)
        cfg.validate()
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = run_compute(cfg)
    except (TruncationError, ValidationError) as exc:
        defect = getattr(exc, "defect", None)
        if defect is None:
            defect = getattr(exc, "tail_mass", None)
        print(f"error: {exc} (defect={defect})", file=sys.stderr)
        return EXIT_STATE
    worst = max(r["defects"]["normalization"] for r in report["results"])
    if worst > cfg.tol:
        log.warning("normalization defect %.3e exceeds tol %.3e", worst, cfg.tol)
    _emit(render(report, cfg.output), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    return cmd_compute(args, require_range=True)


def cmd_verify(args) -> int:
    try:
        tol = args.tol if args.tol is not None else default_tol()
        checks = run_suite(args.suite, args.dim, args.seed, tol)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    ok = all(c.passed for c in checks)
    if args.output == "json":
        text = json.dumps(
            {
                "tool": "photodamp",
                "version": __version__,
                "suite": args.suite,
                "dim": args.dim,
                "seed": args.seed,
                "tol": tol,
                "checks": [c.as_dict() for c in checks],
                "passed": ok,
            },
            indent=2,
        ) + "\n"
    else:
        lines = [f"{'check':<34} {'measured':>12} {'threshold':>12}  result"]
        for c in checks:
            op = ">=" if c.higher_is_better else "<="
            lines.append(
                f"{c.name:<34} {c.defect:>12.3e} {op}{c.threshold:>10.1e}  {'PASS' if c.passed else 'FAIL'}"
            )
        lines.append(f"suite {args.suite}: {'PASS' if ok else 'FAIL'}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _add_run_flags(p):
    p.add_argument("--config", help="JSON config, or a previous JSON output to re-run")
    p.add_argument("--state", help="number:M | coherent:RE,IM | thermal:NBAR")
    p.add_argument("--dim", type=int, help="Fock cutoff D (default 32)")
    p.add_argument("--xi", type=float, help="detector quantum efficiency in [0, 1]")
    p.add_argument("--kappa", type=float, help="dissipation rate")
    p.add_argument("--time", action="append", help="time(s), comma separated; repeatable")
    p.add_argument("--times", help="time range start:stop:step (inclusive)")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--output", choices=("csv", "json"))
    p.add_argument("--tol", type=float, help=f"tolerance (default 1e-10, env {TOL_ENV})")
    p.add_argument("--steps", type=int, help="RK4 steps for --method ode")
    p.add_argument("--out", help="write to this path instead of stdout")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photodamp", description="Photocount statistics of light in an amplitude-damping channel."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="count distributions at one or more times")
    _add_run_flags(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("sweep", help="long-format table over a time range")
    _add_run_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run a seeded self-check suite")
    p.add_argument("--suite", required=True, choices=SUITES)
    p.add_argument("--dim", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float)
    p.add_argument("--output", choices=("text", "json"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = make_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
