"""Command-line front end.

Exit codes: 0 success, 1 I/O failure, 2 invalid input (model, metric CSV,
formula, flag value), 3 solver failure or failed self-test.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import errors
from .bisim import bisim_metric
from .logic.enumeration import DEFAULT_GRID, enumerate_theory
from .logic.semantics import Evaluator, distance_from_values
from .logic.synthesis import expressivity_witnesses
from .logic.syntax import L, LPRIME, parse_formula
from .model import load_model, metric_from_csv, metric_to_csv, validate_pmetric
from .selftest import run_selftest
from .transport import wasserstein_p_solution, wasserstein_primal

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    model_path: Path | None = None
    discount: float = 0.5
    tol: float = 1e-9
    max_iters: int | None = None
    p: float = 1.0
    depth: int = 4
    epsilon: float = 1e-4
    output_path: Path | None = None
    seed: int = 0
    language: str | None = None  # None: eval accepts both, logdist enumerates L

    def __post_init__(self):
        if not 0.0 <= self.discount <= 1.0:
            raise UsageError(f"--discount must lie in [0,1], got {self.discount}")
        if not self.tol >= 0:
            raise UsageError(f"--tol must be nonnegative, got {self.tol}")
        if self.max_iters is not None and self.max_iters < 1:
            raise UsageError("--max-iters must be at least 1")
        if not self.p >= 1:
            raise UsageError(f"--p must be >= 1, got {self.p}")
        if self.depth < 0:
            raise UsageError("--depth must be nonnegative")
        if not self.epsilon > 0:
            raise UsageError("--epsilon must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise UsageError("--seed must be a 64-bit unsigned integer")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        return cls(
            model_path=Path(args.model) if args.model else None,
            discount=args.discount,
            tol=1e-9 if args.tol is None else args.tol,
            max_iters=args.max_iters,
            p=args.p,
            depth=args.depth,
            epsilon=args.epsilon,
            output_path=Path(args.out) if args.out else None,
            seed=args.seed,
            language=args.language,
        )


def _load(cfg: RunConfig):
    if cfg.model_path is None:
        raise UsageError("--model is required")
    return load_model(cfg.model_path.read_bytes())


def _emit(text: str, path: Path | None, stdout):
    if path is None:
        stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8")


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def cmd_validate(cfg, args, stdout, stderr):
    m = _load(cfg)
    plural = lambda k, word: f"{k} {word}" + ("" if k == 1 else "s")
    stdout.write(f"OK: {plural(m.n_states, 'state')}, {plural(m.n_actions, 'action')}\n")
    return EXIT_OK


def cmd_bisim(cfg, args, stdout, stderr):
    m = _load(cfg)
    if cfg.tol <= 0:
        raise UsageError("--tol must be positive for bisim")
    rep = bisim_metric(m, cfg.discount, tol=cfg.tol, max_iters=cfg.max_iters)
    _emit(metric_to_csv(rep.metric.d, m.states), cfg.output_path, stdout)
    stderr.write(_dumps({"iterations": rep.iterations, "final_delta": rep.final_delta,
                         "converged": rep.converged, "discount": cfg.discount, "tol": cfg.tol}))
    if not rep.converged:
        stderr.write(f"warning: not converged after {rep.iterations} iterations "
                     f"(last step {rep.final_delta:.3e} > tol {cfg.tol:.1e})\n")
    return EXIT_OK


def cmd_wasserstein(cfg, args, stdout, stderr):
    m = _load(cfg)
    names, d = metric_from_csv(Path(args.metric).read_text(encoding="utf-8"))
    if len(names) != m.n_states:
        raise errors.DimensionMismatch(f"metric has {len(names)} states, model has {m.n_states}")
    d = validate_pmetric(d)
    a = m.action_index(args.action) if args.action is not None else 0
    x, y = m.state_index(args.mu), m.state_index(args.nu)
    mu, nu = m.kernel[a, x], m.kernel[a, y]
    sol = wasserstein_primal(d, mu, nu)
    out = {
        "action": m.actions[a], "mu": m.states[x], "nu": m.states[y], "p": cfg.p,
        "value": sol.value, "coupling": sol.coupling.tolist(),
        "potential": sol.potential.tolist(), "gap": sol.gap,
    }
    if cfg.p != 1.0:
        value, omega = wasserstein_p_solution(d, mu, nu, cfg.p)
        out.update(value=value, coupling=omega.tolist(), w1=sol.value)
    _emit(_dumps(out), cfg.output_path, stdout)
    return EXIT_OK


def cmd_eval(cfg, args, stdout, stderr):
    m = _load(cfg)
    phi = parse_formula(args.formula, actions=m.actions, language=cfg.language)
    values = Evaluator(m, cfg.discount)(phi)
    _emit(_dumps({s: float(v) for s, v in zip(m.states, values)}), cfg.output_path, stdout)
    return EXIT_OK


def auto_witness_depth(c: float, depth: int) -> int:
    """Kleene steps after which ``c**n <= 1e-3``; ``depth`` when that is undefined."""
    if 0.0 < c < 1.0:
        return max(1, math.ceil(math.log(1e-3) / math.log(c)))
    return max(depth, 1) if c == 1.0 else 1


def cmd_logdist(cfg, args, stdout, stderr):
    m = _load(cfg)
    n = m.n_states
    grid = DEFAULT_GRID if args.grid is None else tuple(float(v) for v in args.grid.split(","))
    language = cfg.language or L
    enum = enumerate_theory(m, cfg.depth, grid, c=cfg.discount, language=language)
    enum_bound = distance_from_values(enum.values)
    wdepth = args.witness_depth if args.witness_depth is not None else auto_witness_depth(cfg.discount, cfg.depth)
    if wdepth == 0:
        witness_bound = np.zeros((n, n))
    else:
        witness_bound = expressivity_witnesses(m, cfg.discount, wdepth, cfg.epsilon).achieved
    rep = bisim_metric(m, cfg.discount, tol=cfg.tol if cfg.tol > 0 else 1e-9, max_iters=cfg.max_iters)
    d = rep.metric.d
    summary = {
        "depth": cfg.depth, "witness_depth": wdepth, "language": language, "enumerated_formulas": len(enum),
        "bisim_converged": rep.converged,
        "max_bisim_minus_enumeration": float((d - enum_bound).max()),
        "max_bisim_minus_witness": float((d - witness_bound).max()),
        "max_enumeration_minus_bisim": float((enum_bound - d).max()),
    }
    enum_csv, wit_csv = metric_to_csv(enum_bound, m.states), metric_to_csv(witness_bound, m.states)
    if cfg.output_path is None:
        stdout.write("# enumeration lower bound\n" + enum_csv + "# witness lower bound\n" + wit_csv)
        stderr.write(_dumps(summary))
    else:
        base = cfg.output_path
        Path(f"{base}_enumeration.csv").write_text(enum_csv, encoding="utf-8")
        Path(f"{base}_witness.csv").write_text(wit_csv, encoding="utf-8")
        stdout.write(_dumps(summary))
    return EXIT_OK


def cmd_selftest(cfg, args, stdout, stderr):
    slack = args.tol  # None keeps each suite's own tolerance
    results = run_selftest(cfg.seed, slack)
    failed = False
    for res in results:
        stdout.write(f"{res.name}: {res.passed}/{res.total} passed\n")
        for w in res.witnesses:
            stdout.write(f"  FAIL {w}\n")
        if res.failed > len(res.witnesses):
            stdout.write(f"  ... {res.failed - len(res.witnesses)} more failures\n")
        failed |= res.failed > 0
    return EXIT_INTERNAL if failed else EXIT_OK


COMMANDS = {
    "validate": cmd_validate, "bisim": cmd_bisim, "wasserstein": cmd_wasserstein,
    "eval": cmd_eval, "logdist": cmd_logdist, "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="model JSON file")
    common.add_argument("--discount", type=float, default=0.5, help="discount c in [0,1]")
    common.add_argument("--tol", type=float, default=None, help="fixpoint tolerance (default 1e-9)")
    common.add_argument("--max-iters", type=int, default=None)
    common.add_argument("--p", type=float, default=1.0, help="Wasserstein exponent")
    common.add_argument("--depth", type=int, default=4)
    common.add_argument("--epsilon", type=float, default=1e-4)
    common.add_argument("--out", help="output path (stdout if omitted)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--language", choices=(L, LPRIME), default=None)

    parser = argparse.ArgumentParser(prog="bisimlogic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check a model file")
    sub.add_parser("bisim", parents=[common], help="bisimulation metric as CSV")
    w = sub.add_parser("wasserstein", parents=[common], help="transport between two kernel rows")
    w.add_argument("--metric", required=True, help="metric CSV (as written by bisim)")
    w.add_argument("--mu", required=True, help="source state of the first row")
    w.add_argument("--nu", required=True, help="source state of the second row")
    w.add_argument("--action", default=None, help="action label (default: first action)")
    e = sub.add_parser("eval", parents=[common], help="evaluate a formula at every state")
    e.add_argument("formula")
    ld = sub.add_parser("logdist", parents=[common], help="logical-distance lower bounds")
    ld.add_argument("--grid", default=None, help="comma-separated scalars for enumeration")
    ld.add_argument("--witness-depth", type=int, default=None,
                    help="Kleene levels for witness synthesis (default: until c**n <= 1e-3)")
    sub.add_parser("selftest", parents=[common], help="run the seeded property suites")
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
        return COMMANDS[args.command](cfg, args, stdout, stderr)
    except OSError as exc:
        stderr.write(_dumps({"error": "IOError", "message": str(exc)}))
        return EXIT_IO
    except errors.SolverFailure as exc:
        stderr.write(_dumps({"error": "SolverFailure", "message": str(exc)}))
        return EXIT_INTERNAL
    except (errors.BisimError, UsageError, ValueError, KeyError) as exc:
        report = {"error": type(exc).__name__, "message": str(exc)}
        for attr in ("action", "state", "position", "witness"):
            if getattr(exc, attr, None) is not None:
                report[attr] = getattr(exc, attr)
        stderr.write(_dumps(report))
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
