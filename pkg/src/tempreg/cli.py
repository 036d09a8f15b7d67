"""Command-line front end.

Exit codes: 0 on success, 1 on usage or input errors, 2 when ``--check`` is
given and a trend check fails.
"""

from __future__ import annotations

import argparse
import sys
import typing
from dataclasses import fields

import numpy as np

from . import experiments as ex
from .envs import random_mdp, room_world, three_state_variance_mdp
from .errors import TempRegError
from .markov import reversal, stationary_distribution
from .mdp import TabularMdp, solve_exact, solve_with_matrix
from .operators import RegularizerSpec, bias_bound, effective_matrix, episodic_effective_matrix
from .textio import read_mdp, write_mdp


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# -- value parsing ------------------------------------------------------------


def parse_grid(text: str) -> tuple[float, ...]:
    """``"0,0.5,0.9"`` or ``"start:stop:step"`` (stop inclusive)."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"range grid must be start:stop:step, got {text!r}")
        start, stop, step = (float(x) for x in parts)
        if step <= 0 or stop < start:
            raise UsageError(f"empty or backwards range {text!r}")
        return ex._grid(start, stop, step)
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"bad grid {text!r}") from None


def _grid_arg(text: str) -> tuple[float, ...]:
    try:
        return parse_grid(text)
    except (UsageError, ValueError) as err:
        raise argparse.ArgumentTypeError(str(err)) from None


def _int_grid_arg(text: str) -> tuple[int, ...]:
    vals = _grid_arg(text)
    if any(v != int(v) for v in vals):
        raise argparse.ArgumentTypeError(f"integer grid expected, got {text!r}")
    return tuple(int(v) for v in vals)


_PLAN_HINTS = typing.get_type_hints(ex.SweepPlan)


def _coerce(name: str, raw: str):
    hint = _PLAN_HINTS[name]
    text = raw.strip()
    if text.lower() == "none" and type(None) in typing.get_args(hint):
        return None
    base = hint
    if typing.get_origin(hint) is typing.Union:
        base = next(a for a in typing.get_args(hint) if a is not type(None))
    if typing.get_origin(base) is tuple:
        elem = typing.get_args(base)[0]
        vals = parse_grid(text)
        return tuple(int(v) for v in vals) if elem is int else vals
    if base is bool:
        if text.lower() in ("1", "true", "yes", "on"):
            return True
        if text.lower() in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"{name}: expected a boolean, got {raw!r}")
    if base is int:
        return int(text)
    return float(text)


def read_config(path: str) -> dict:
    """``key = value`` lines naming :class:`SweepPlan` fields; ``#`` starts a comment."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as err:
        raise UsageError(f"cannot read config {path}: {err.strerror}") from None
    out = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        if key not in _PLAN_HINTS:
            raise UsageError(f"{path}:{lineno}: unknown setting {key!r}")
        try:
            out[key] = _coerce(key, value)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {value.strip()!r}") from None
    return out


# -- environments for ``solve`` -----------------------------------------------

BUILTIN_ENVS = ("cycle", "two-state", "variance", "room", "random:N")


def load_env(name: str, seed: int) -> tuple[TabularMdp, tuple[int, int] | None]:
    """MDP from a file path or builtin name; second item is ``(start, terminal)``
    for episodic environments."""
    if name == "cycle":
        p = [[0.1, 0.9, 0.0], [0.0, 0.1, 0.9], [0.9, 0.0, 0.1]]
        return TabularMdp(p, [1.0, 0.0, 0.0], 0.9), None
    if name == "two-state":
        return TabularMdp([[0.9, 0.1], [0.2, 0.8]], [1.0, 0.0], 0.5), None
    if name == "variance":
        return three_state_variance_mdp()[0], None
    if name == "room":
        world, mdp = room_world()
        return mdp, (world.start, world.terminal)
    if name.startswith("random:"):
        try:
            n = int(name.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad environment {name!r}; use random:N") from None
        return random_mdp(n, seed), None
    try:
        return read_mdp(name), None
    except OSError as err:
        raise UsageError(f"cannot read environment {name}: {err.strerror}") from None
    except ValueError as err:
        raise UsageError(f"{name}: {err}") from None


def _spec_from(beta: float, lam: float) -> RegularizerSpec:
    if lam > 0.0:
        return RegularizerSpec.exp_smoothing(beta, lam)
    return RegularizerSpec.previous_state(beta)


def cmd_solve(args) -> int:
    mdp, episodic = load_env(args.env, args.seed)
    if args.gamma is not None:
        mdp = TabularMdp(mdp.transition, mdp.reward, args.gamma)
    if args.dump:
        write_mdp(args.dump, mdp)
    spec = _spec_from(args.beta, args.lam)
    v = solve_exact(mdp)
    bound = None
    if episodic is not None:
        m = episodic_effective_matrix(mdp, episodic[0], episodic[1], spec)
    else:
        rev = reversal(mdp.transition, stationary_distribution(mdp.transition, require_positive=True))
        m = effective_matrix(mdp.transition, rev, spec)
        bound = bias_bound(mdp, rev, spec)
    vb = solve_with_matrix(mdp, m)
    p = spec.as_params()
    print(f"# method={p['method']} beta={p['beta']:g} lambda={p['lambda']:g} gamma={mdp.gamma:g}")
    print(f"{'state':>5} {'v':>18} {'v_beta':>18} {'gap':>12}")
    for s, (a, b) in enumerate(zip(v, vb)):
        print(f"{s:>5} {a:>18.10f} {b:>18.10f} {abs(a - b):>12.3e}")
    print(f"max_abs_gap {float(np.abs(v - vb).max()):.6e}")
    if bound is not None:
        print(f"bias_bound {bound:.6e}")
    return 0


# -- experiments --------------------------------------------------------------

SUBCOMMAND_EXPERIMENTS = {
    "mixing": ("mixing",),
    "bias": ("bias",),
    "variance": ("variance",),
    "room": ("room",),
    "noisy-walk": ("noisy_walk", "noisy_walk_lambda"),
    "all": ex.EXPERIMENTS,
}


def build_plan(args) -> ex.SweepPlan:
    settings = read_config(args.config) if args.config else {}
    settings["seed"] = args.seed
    cmd = args.command

    def put(key, value):
        if value is not None:
            settings[key] = value

    put("jobs", args.jobs)
    put("betas", getattr(args, "beta_grid", None))
    put("lambdas", getattr(args, "lambda_grid", None))
    put("sigma2s", getattr(args, "sigma2_grid", None))
    put("n_smooths", getattr(args, "n_smooth_grid", None))
    beta = getattr(args, "beta", None)
    lam = getattr(args, "lam", None)
    if cmd in ("mixing", "bias"):
        # a single beta on a grid experiment narrows the grid
        put("betas", None if beta is None else (beta,))
        if cmd == "bias":
            put("bias_check_beta", beta)
            put("n_smooths", None if args.n_smooth is None else (args.n_smooth,))
            put("bias_gamma", args.gamma)
    else:
        for key in ("variance_beta", "room_beta", "walk_beta"):
            put(key, beta)
        for key in ("variance_lambda", "room_lambda"):
            put(key, lam)
    if cmd == "all":
        put("bias_gamma", args.gamma)
    if cmd in ("noisy-walk", "all"):
        if args.sigma2 is not None:
            put("walk_lambda_sigma2", args.sigma2)
            if cmd == "noisy-walk" and args.sigma2_grid is None:
                settings["sigma2s"] = (args.sigma2,)
        if args.action_scale_is_var:
            settings["walk_action_is_var"] = True
        put("walk_action_scale", args.action_scale)
    runs = getattr(args, "runs", None)
    if runs is not None:
        key = {
            "mixing": "mixing_seeds",
            "bias": "bias_seeds",
            "variance": "variance_runs",
            "room": "room_seeds",
            "noisy-walk": "walk_reps",
        }.get(cmd)
        if key is None:
            raise UsageError("--runs applies to a single experiment")
        settings[key] = runs
    if getattr(args, "steps", None) is not None:
        settings["variance_steps"] = args.steps
    if getattr(args, "trajectories", None) is not None:
        settings["room_trajectories"] = args.trajectories
    try:
        return ex.SweepPlan(**settings)
    except ValueError as err:
        raise UsageError(str(err)) from None


def _brief(stats: dict) -> str:
    parts = []
    for key, val in stats.items():
        if isinstance(val, dict):
            continue
        parts.append(f"{key}={val:.6g}" if isinstance(val, (float, np.floating)) else f"{key}={val}")
    return " ".join(parts)


def cmd_experiment(args) -> int:
    plan = build_plan(args)
    names = SUBCOMMAND_EXPERIMENTS[args.command]
    try:
        checks = ex.run_all(plan, args.out, names)
    except OSError as err:
        raise UsageError(f"cannot write results to {err.filename or args.out}: {err.strerror}") from None
    for chk in checks:
        status = "PASS" if chk.passed else "FAIL"
        note = f" ({chk.note})" if chk.note else ""
        print(f"{status} {chk.name}: {_brief(chk.stats)}{note}")
    print(f"wrote {', '.join(n + '.csv' for n in names)} and summary.json to {args.out}")
    if args.check and not all(c.passed for c in checks):
        return 2
    return 0


# -- parser -------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="root seed; run i uses seed + i (default 0)")


def _experiment_common(p: argparse.ArgumentParser) -> None:
    _common(p)
    p.add_argument("--out", default="results", help="output directory (default ./results)")
    p.add_argument("--config", metavar="FILE", help="key = value file overriding any sweep setting")
    p.add_argument("--jobs", type=int, help="worker processes for independent runs (default 1)")
    p.add_argument("--check", action="store_true", help="exit with status 2 if a trend check fails")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="tempreg",
        description="Temporally regularized policy evaluation: exact solves and experiment sweeps.",
    )
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("solve", help="exact and regularized values of one MDP")
    _common(p)
    p.add_argument(
        "--env",
        required=True,
        help="MDP text file, or a builtin: " + ", ".join(BUILTIN_ENVS),
    )
    p.add_argument("--beta", type=float, default=0.5, help="regularization strength in [0, 1] (default 0.5)")
    p.add_argument("--lambda", dest="lam", type=float, default=0.0,
                   help="exponential smoothing factor in [0, 1); 0 regularizes toward the previous state")
    p.add_argument("--gamma", type=float, help="override the discount factor")
    p.add_argument("--dump", metavar="FILE", help="also write the MDP in text form to FILE")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("mixing", help="distance of mixed chain powers to the limit matrix")
    _experiment_common(p)
    p.add_argument("--beta", type=float, help="run a single beta instead of the grid")
    p.add_argument("--beta-grid", type=_grid_arg, help="beta grid, e.g. 0,0.5 or 0:0.9:0.1")
    p.add_argument("--runs", type=int, help="number of random chains (default 10)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("bias", help="regularization bias as rewards get smoother")
    _experiment_common(p)
    p.add_argument("--beta", type=float, help="run a single beta (also the checked beta)")
    p.add_argument("--beta-grid", type=_grid_arg, help="beta grid")
    p.add_argument("--n-smooth", type=int, help="run a single smoothing length N")
    p.add_argument("--n-smooth-grid", type=_int_grid_arg, help="grid of smoothing lengths N")
    p.add_argument("--gamma", type=float, help="discount factor (default 0.9)")
    p.add_argument("--runs", type=int, help="number of random MDPs (default 30)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("variance", help="spread of online estimates under a noisy reward")
    _experiment_common(p)
    p.add_argument("--beta", type=float, help="regularization strength (default 0.5)")
    p.add_argument("--lambda", dest="lam", type=float, help="smoothing factor (default 0.8)")
    p.add_argument("--runs", type=int, help="independent runs per method (default 100)")
    p.add_argument("--steps", type=int, help="TD updates per run (default 2000)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("room", help="learning speed in the two-room gridworld")
    _experiment_common(p)
    p.add_argument("--beta", type=float, help="regularization strength (default 0.5)")
    p.add_argument("--lambda", dest="lam", type=float, help="smoothing factor (default 0.5)")
    p.add_argument("--runs", type=int, help="number of seeds (default 20)")
    p.add_argument("--trajectories", type=int, help="trajectory budget per seed (default 100)")
    p.set_defaults(func=cmd_experiment)

    for name, helptext in (
        ("noisy-walk", "linear TD on a walk observed through noise"),
        ("all", "every experiment, one CSV each plus summary.json"),
    ):
        p = sub.add_parser(name, help=helptext)
        _experiment_common(p)
        p.add_argument("--beta", type=float, help="regularization strength for the single-beta experiments")
        p.add_argument("--lambda", dest="lam", type=float, help="smoothing factor for variance and room")
        p.add_argument("--sigma2", type=float,
                       help="observation noise variance for the lambda sweep (noisy-walk: also the only sigma2)")
        p.add_argument("--sigma2-grid", type=_grid_arg, help="observation noise variance grid")
        p.add_argument("--lambda-grid", type=_grid_arg, help="lambda grid for the smoothing sweep")
        p.add_argument("--action-scale", type=float, help="scale of the walk's Gaussian moves (default 0.05)")
        p.add_argument("--action-scale-is-var", action="store_true",
                       help="read --action-scale as a variance instead of a standard deviation")
        if name == "noisy-walk":
            p.add_argument("--runs", type=int, help="repetitions (default 1000)")
        else:
            p.add_argument("--beta-grid", type=_grid_arg, help="beta grid for mixing and bias")
            p.add_argument("--n-smooth-grid", type=_int_grid_arg, help="N grid for bias")
            p.add_argument("--gamma", type=float, help="discount factor for bias (default 0.9)")
        p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as err:
        print(f"tempreg: error: {err}", file=sys.stderr)
        return 1
    except (TempRegError, ValueError) as err:
        print(f"tempreg: error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
