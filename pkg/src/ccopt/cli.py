"""Command-line runner.

Example::

    ccopt --problem rosenbrock_l1 --method trust-region --trace out.csv

Exit status: 0 on Stationary / SurrogateVanished, 2 on ObjectiveDiverging /
UnboundedBelow, 3 on MaxIters / IterLimit / RadiusCollapse /
NoDescentDirection, 1 on usage, configuration or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .config import SolverConfig
from .linesearch import run_backtracking, run_weak_wolfe
from .problems import DatasetError, exp_fit_problem, get_entry, load_catalog, load_csv_dataset, synthetic_exp_dataset
from .subproblem import stationarity_measure
from .trace import TerminationReason, trace_to_csv, trace_to_json
from .trustregion import HessianModel, run_trust_region

__all__ = ["RunRequest", "UsageError", "parse_args", "execute", "main", "EXIT_CODES"]

METHODS = ("backtracking", "wolfe", "trust-region")

EXIT_CODES = {
    TerminationReason.STATIONARY: 0,
    TerminationReason.SURROGATE_VANISHED: 0,
    TerminationReason.NO_DESCENT_DIRECTION: 3,
    TerminationReason.OBJECTIVE_DIVERGING: 2,
    TerminationReason.UNBOUNDED_BELOW: 2,
    TerminationReason.MAX_ITERS: 3,
    TerminationReason.ITER_LIMIT: 3,
    TerminationReason.RADIUS_COLLAPSE: 3,
}

LOG_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunRequest:
    problem: str = "rosenbrock_l1"
    method: str = "wolfe"
    data: str | None = None
    x0: tuple | None = None
    config: SolverConfig = field(default_factory=SolverConfig)
    trace_path: str | None = None
    format: str = "csv"
    seed: int = 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _flag(name):
    return "--" + name.replace("_", "-")


def _build_parser():
    p = _Parser(prog="ccopt", description="Convex-composite minimization: h(c(x)) + g(x).")
    names = ", ".join(e.name for e in load_catalog()) + ", fit"
    p.add_argument("--problem", help=f"catalog name ({names}) or a JSON config file")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--data", help="CSV with columns t,y for the 'fit' problem")
    p.add_argument("--x0", help="comma-separated starting point")
    p.add_argument("--trace", dest="trace_path", help="write the iteration trace here")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--seed", type=int)
    defaults = SolverConfig()
    for f in fields(SolverConfig):
        default = getattr(defaults, f.name)
        if f.name == "stat_every":
            kind = int
        elif f.name in ("norm", "hessian"):
            kind = str
        else:
            kind = type(default)
        p.add_argument(_flag(f.name), dest=f.name, type=kind, help=f"default: {default}")
    return p


def _parse_x0(text):
    try:
        return tuple(float(v) for v in str(text).split(","))
    except ValueError:
        raise UsageError(f"--x0 must be comma-separated numbers, got {text!r}") from None


def parse_args(argv) -> RunRequest:
    """Parse and validate command-line arguments into a :class:`RunRequest`."""
    ns = vars(_build_parser().parse_args(argv))
    settings = {}
    problem = ns.get("problem")
    if problem and problem.endswith(".json"):
        try:
            settings = json.loads(Path(problem).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {problem}: {exc}") from None
        if not isinstance(settings, dict):
            raise UsageError("config file must hold a JSON object")
        ns["problem"] = None
    settings = {k.replace("-", "_"): v for k, v in settings.items()}
    if "trace" in settings:
        settings["trace_path"] = settings.pop("trace")
    known = {f.name for f in fields(RunRequest)} | set(SolverConfig.field_names())
    unknown = set(settings) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    settings.update({k: v for k, v in ns.items() if v is not None})

    cfg_kwargs = {k: settings.pop(k) for k in SolverConfig.field_names() if k in settings}
    settings.pop("config", None)
    if "x0" in settings and settings["x0"] is not None:
        x0 = settings["x0"]
        settings["x0"] = tuple(float(v) for v in x0) if isinstance(x0, list) else _parse_x0(x0)
    req = RunRequest(**settings)
    if req.method not in METHODS:
        raise UsageError(f"--method must be one of {METHODS}")
    if req.format not in ("csv", "json"):
        raise UsageError("--format must be csv or json")
    try:
        cfg = replace(SolverConfig(), **cfg_kwargs)
        cfg.validate(req.method)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    if cfg.stat_every is not None and cfg.stat_every < 1:
        raise UsageError("--stat-every must be positive")
    return replace(req, config=cfg)


def _build_problem(req: RunRequest):
    if req.problem == "fit" or req.data is not None:
        data = load_csv_dataset(req.data) if req.data else synthetic_exp_dataset(seed=req.seed)
        problem, x0 = exp_fit_problem(data, name="fit"), np.array([1.0, 0.0])
    else:
        entry = get_entry(req.problem, req.seed)
        problem, x0 = entry.problem, entry.x0
    if req.x0 is not None:
        x0 = np.array(req.x0, dtype=float)
    return problem, x0


def _run(req: RunRequest, problem, x0):
    cfg = req.config
    sub, stopping = cfg.subproblem(), cfg.stopping()
    if req.method == "backtracking":
        return run_backtracking(problem, x0, cfg.backtrack(), sub, stopping)
    if req.method == "wolfe":
        return run_weak_wolfe(problem, x0, cfg.wolfe(), sub, stopping)
    n = problem.n
    H = HessianModel.zero(n) if cfg.hessian == "zero" else HessianModel.scaled_identity(n, cfg.hessian_scale)
    return run_trust_region(problem, x0, cfg.trust_region(), H, sub, stopping)


def execute(req: RunRequest) -> int:
    """Run the request, write its trace, print a summary; returns the exit code."""
    log = logging.getLogger("ccopt")
    try:
        problem, x0 = _build_problem(req)
    except (KeyError, DatasetError, ValueError) as exc:
        print(f"ccopt: {exc}", file=sys.stderr)
        return 1
    try:
        trace, reason = _run(req, problem, x0)
    except ValueError as exc:
        print(f"ccopt: {exc}", file=sys.stderr)
        return 1
    final = trace.final
    stat = final.stationarity
    if stat is None:
        stat = stationarity_measure(problem, final.x, req.config.eps, norm=req.config.subproblem().norm)
    summary = {
        "problem": problem.name,
        "method": req.method,
        "reason": reason.value,
        "iterations": final.k,
        "f": final.f,
        "stationarity": stat,
        "x": [float(v) for v in final.x],
    }
    if req.trace_path:
        text = trace_to_csv(trace) if req.format == "csv" else trace_to_json(trace, summary)
        try:
            with open(req.trace_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"ccopt: cannot write trace: {exc}", file=sys.stderr)
            return 1
    print(f"problem       {problem.name}")
    print(f"method        {req.method}")
    print(f"termination   {reason.value}")
    print(f"iterations    {final.k}")
    print(f"final f       {final.f:.17g}")
    print(f"stationarity  {stat:.3e}")
    print(f"x             {' '.join(f'{v:.17g}' for v in final.x)}")
    log.debug("exit code %d", EXIT_CODES[reason])
    return EXIT_CODES[reason]


def main(argv=None) -> int:
    level = LOG_LEVELS.get(os.environ.get("CC_OPT_LOG", "quiet").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        req = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"ccopt: error: {exc}", file=sys.stderr)
        return 1
    return execute(req)


if __name__ == "__main__":
    sys.exit(main())
