"""Experiment harness: parameter sweeps, CSV records and trend checks.

Each ``run_*`` function is a pure function of its :class:`SweepPlan` and
returns a list of :class:`ExperimentRecord`. Per-run rows carry the run seed;
aggregate rows (means, variances over runs) carry ``seed = -1`` and are
recomputable from the per-run rows emitted alongside them.

:func:`check_trends` turns records into pass/fail :class:`TrendCheck` results
using only the aggregate rows.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Callable, Iterable

import numpy as np

from .envs import (
    NoisyWalk,
    random_mdp,
    room_world,
    smooth_rewards,
    three_state_variance_mdp,
    walk_theta_star,
)
from .markov import mix, mixing_error_curve, reversal, stationary_distribution
from .mdp import solve_exact, solve_with_matrix
from .online import OnlineConfig, evaluate_online, semi_gradient_td
from .operators import (
    RegularizerSpec,
    bias_bound,
    episodic_effective_matrix,
    regularized_solve,
)

CSV_FIELDS = ("experiment", "seed", "step", "metric", "value", "beta", "lambda", "sigma2", "n_smooth", "method")
PARAM_FIELDS = CSV_FIELDS[5:]
AGGREGATE = -1

EXPERIMENTS = ("mixing", "bias", "variance", "room", "noisy_walk", "noisy_walk_lambda")


def _grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    n = int(round((stop - start) / step)) + 1
    return tuple(round(start + i * step, 10) for i in range(n))


@dataclass(frozen=True)
class SweepPlan:
    """Grids, seed sets and horizons for every experiment.

    Run ``i`` of an experiment uses seed ``seed + i``.
    """

    seed: int = 0
    betas: tuple[float, ...] = _grid(0.0, 0.9, 0.1)
    lambdas: tuple[float, ...] = _grid(0.0, 0.9, 0.1)
    sigma2s: tuple[float, ...] = (0.0, 0.01, 0.04, 0.09, 0.16, 0.25)
    n_smooths: tuple[int, ...] = (0, 2, 4, 6, 8, 10)
    jobs: int = 1

    mixing_seeds: int = 10
    mixing_states: int = 10
    mixing_iters: int = 20
    mixing_check_iter: int = 5

    bias_seeds: int = 30
    bias_states: int = 10
    bias_gamma: float = 0.9
    bias_check_beta: float = 0.5

    variance_runs: int = 100
    variance_steps: int = 2000
    variance_beta: float = 0.5
    variance_lambda: float = 0.8
    variance_alpha: float = 1.0
    variance_alpha_tau: float | None = 1.0
    variance_record_every: int = 10
    variance_stay: float = 0.1
    variance_noise: float = 4.0

    room_seeds: int = 20
    room_trajectories: int = 100
    room_beta: float = 0.5
    room_lambda: float = 0.5
    room_alpha: float = 0.1
    room_max_steps: int = 100_000

    walk_reps: int = 1000
    walk_episodes: int = 30
    walk_alpha: float = 0.01
    walk_beta: float = 0.5
    walk_lambda_sigma2: float = 0.04
    walk_action_scale: float = 0.05
    walk_action_is_var: bool = False
    walk_oracle_episodes: int = 2000

    def __post_init__(self):
        for b in (*self.betas, self.bias_check_beta, self.variance_beta, self.room_beta, self.walk_beta):
            if not 0.0 <= b <= 1.0:
                raise ValueError(f"beta {b} outside [0, 1]")
        for lam in (*self.lambdas, self.variance_lambda, self.room_lambda):
            if not 0.0 <= lam < 1.0:
                raise ValueError(f"lambda {lam} outside [0, 1)")
        if any(s < 0.0 for s in self.sigma2s) or self.walk_lambda_sigma2 < 0.0:
            raise ValueError("sigma2 values must be nonnegative")
        if any(n < 0 or n > self.bias_states for n in self.n_smooths):
            raise ValueError(f"n_smooth values must lie in [0, {self.bias_states}]")
        if not 1 <= self.mixing_check_iter <= self.mixing_iters:
            raise ValueError("mixing_check_iter must lie in [1, mixing_iters]")
        if not self.betas or not self.lambdas or not self.sigma2s or not self.n_smooths:
            raise ValueError("grids must be nonempty")

    def seeds(self, count: int) -> list[int]:
        return [self.seed + i for i in range(count)]

    def replace(self, **changes) -> "SweepPlan":
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data.update(changes)
        return SweepPlan(**data)


@dataclass(frozen=True)
class ExperimentRecord:
    experiment: str
    seed: int
    step: int
    metric: str
    value: float
    params: dict[str, Any] = field(default_factory=dict)

    def row(self) -> list[str]:
        out = [self.experiment, str(self.seed), str(self.step), self.metric, repr(float(self.value))]
        for key in PARAM_FIELDS:
            val = self.params.get(key, "")
            out.append(repr(float(val)) if isinstance(val, float) else str(val))
        return out


def _spec_params(spec: RegularizerSpec, **extra) -> dict[str, Any]:
    p = spec.as_params()
    out = {"method": p["method"], "beta": p["beta"], "lambda": p["lambda"]}
    out.update(extra)
    return out


def _map(fn: Callable, items: Iterable, jobs: int) -> list:
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# -- mixing -------------------------------------------------------------------


def _mixing_one(args):
    plan, seed = args
    m = random_mdp(plan.mixing_states, seed).transition
    mu = stationary_distribution(m, require_positive=True)
    rev = reversal(m, mu)
    out = []
    for beta in plan.betas:
        mixed = mix(m, rev, beta)
        out.append(
            (
                beta,
                mixing_error_curve(mixed, mu, plan.mixing_iters, "max"),
                mixing_error_curve(mixed, mu, plan.mixing_iters, "fro"),
            )
        )
    return seed, out


def run_mixing(plan: SweepPlan) -> list[ExperimentRecord]:
    """Distance of ``((1 - beta) P + beta P_rev)**i`` to ``P^inf`` on random chains."""
    results = _map(_mixing_one, [(plan, s) for s in plan.seeds(plan.mixing_seeds)], plan.jobs)
    records = []
    sums: dict[tuple[float, str], np.ndarray] = {}
    for seed, per_beta in results:
        for beta, curve_max, curve_fro in per_beta:
            params = _spec_params(RegularizerSpec.previous_state(beta))
            for metric, curve in (("dist_to_Pinf", curve_max), ("dist_to_Pinf_fro", curve_fro)):
                for i, value in enumerate(curve, start=1):
                    records.append(ExperimentRecord("mixing", seed, i, metric, value, params))
                sums.setdefault((beta, metric), np.zeros(plan.mixing_iters))
                sums[(beta, metric)] += np.asarray(curve)
    for (beta, metric), total in sums.items():
        params = _spec_params(RegularizerSpec.previous_state(beta))
        for i, value in enumerate(total / len(results), start=1):
            records.append(ExperimentRecord("mixing", AGGREGATE, i, metric + "_mean", value, params))
    return records


# -- bias ---------------------------------------------------------------------


def _bias_one(args):
    plan, seed = args
    base = random_mdp(plan.bias_states, seed, "uniform", plan.bias_gamma)
    out = []
    for n_smooth in plan.n_smooths:
        mdp = smooth_rewards(base, n_smooth, seed)
        mu = stationary_distribution(mdp.transition, require_positive=True)
        rev = reversal(mdp.transition, mu)
        v = solve_exact(mdp)
        for beta in plan.betas:
            spec = RegularizerSpec.previous_state(beta)
            gap = np.abs(v - regularized_solve(mdp, rev, spec))
            out.append((n_smooth, beta, float(gap.mean()), float(gap.max()), bias_bound(mdp, rev, spec)))
    return seed, out


def run_bias(plan: SweepPlan) -> list[ExperimentRecord]:
    """Mean ``|v - v_beta|`` on random MDPs whose rewards are smoothed over ``N`` states."""
    results = _map(_bias_one, [(plan, s) for s in plan.seeds(plan.bias_seeds)], plan.jobs)
    records = []
    sums: dict[tuple[int, float], np.ndarray] = {}
    for seed, rows in results:
        for n_smooth, beta, mean_gap, max_gap, bound in rows:
            params = _spec_params(RegularizerSpec.previous_state(beta), n_smooth=n_smooth)
            records.append(ExperimentRecord("bias", seed, 0, "mean_abs_bias", mean_gap, params))
            records.append(ExperimentRecord("bias", seed, 0, "max_abs_bias", max_gap, params))
            records.append(ExperimentRecord("bias", seed, 0, "bias_bound", bound, params))
            sums.setdefault((n_smooth, beta), np.zeros(3))
            sums[(n_smooth, beta)] += (mean_gap, max_gap, bound)
    for (n_smooth, beta), total in sums.items():
        params = _spec_params(RegularizerSpec.previous_state(beta), n_smooth=n_smooth)
        for metric, value in zip(("mean_abs_bias", "max_abs_bias", "bias_bound"), total / len(results)):
            records.append(ExperimentRecord("bias", AGGREGATE, 0, metric + "_mean", value, params))
    return records


# -- variance -----------------------------------------------------------------


def variance_methods(plan: SweepPlan) -> list[RegularizerSpec]:
    return [
        RegularizerSpec.none(),
        RegularizerSpec.previous_state(plan.variance_beta),
        RegularizerSpec.exp_smoothing(plan.variance_beta, plan.variance_lambda),
    ]


def _variance_one(args):
    plan, spec, seed = args
    mdp, noise = three_state_variance_mdp(stay=plan.variance_stay, noise_var=plan.variance_noise)
    cfg = OnlineConfig(
        alpha=plan.variance_alpha,
        spec=spec,
        steps_per_episode=plan.variance_steps,
        seed=seed,
        alpha_tau=plan.variance_alpha_tau,
    )
    run = evaluate_online(mdp, cfg, reward_noise=noise, record="step")
    estimates = np.concatenate([[0.0], run.history[:, 0]])
    return estimates[:: plan.variance_record_every]


def run_variance(plan: SweepPlan) -> list[ExperimentRecord]:
    """Cross-run spread of the online estimate at the noisy state ``S1``.

    The reference ``v*(S1)`` is the exact value of the mean-reward MDP. Step
    ``t`` means ``t`` TD updates; step 0 is the zero initialisation.
    """
    mdp, _ = three_state_variance_mdp(stay=plan.variance_stay, noise_var=plan.variance_noise)
    v_star = float(solve_exact(mdp)[0])
    seeds = plan.seeds(plan.variance_runs)
    steps = list(range(0, plan.variance_steps + 1, plan.variance_record_every))
    records = []
    for spec in variance_methods(plan):
        runs = np.array(_map(_variance_one, [(plan, spec, s) for s in seeds], plan.jobs))
        params = _spec_params(spec)
        for seed, row in zip(seeds, runs):
            for t, value in zip(steps, row):
                records.append(ExperimentRecord("variance", seed, t, "estimate_S1", value, params))
        abs_err = np.abs(runs - v_star).mean(axis=0)
        var = runs.var(axis=0, ddof=1)
        for t, e, s2 in zip(steps, abs_err, var):
            records.append(ExperimentRecord("variance", AGGREGATE, t, "abs_err_S1", e, params))
            records.append(ExperimentRecord("variance", AGGREGATE, t, "var_S1", s2, params))
    records.append(ExperimentRecord("variance", AGGREGATE, 0, "v_star_S1", v_star, {}))
    return records


# -- room ---------------------------------------------------------------------


def room_methods(plan: SweepPlan) -> list[RegularizerSpec]:
    return [
        RegularizerSpec.none(),
        RegularizerSpec.previous_state(plan.room_beta),
        RegularizerSpec.exp_smoothing(plan.room_beta, plan.room_lambda),
    ]


def room_reference(spec: RegularizerSpec) -> np.ndarray:
    """Fixed point each learner converges to on the room (its own operator)."""
    world, mdp = room_world()
    return solve_with_matrix(mdp, episodic_effective_matrix(mdp, world.start, world.terminal, spec))


def _room_one(args):
    plan, spec, seed = args
    world, mdp = room_world()
    cfg = OnlineConfig(
        alpha=plan.room_alpha,
        spec=spec,
        episodes=plan.room_trajectories,
        steps_per_episode=plan.room_max_steps,
        seed=seed,
        alpha_tau=None,
    )
    run = evaluate_online(mdp, cfg, start=world.start, terminal=world.terminal, record="episode")
    return run.history


def run_room(plan: SweepPlan) -> list[ExperimentRecord]:
    """Per-state ``|v_hat - v_ref|`` after each trajectory in the two-room world.

    Step ``k`` is the number of completed trajectories. The per-state error
    of state ``i`` has metric ``abs_err_s<i>`` (two digits), so one snapshot
    is 18 rows; ``mean_abs_err`` averages them.
    """
    seeds = plan.seeds(plan.room_seeds)
    records = []
    for spec in room_methods(plan):
        ref = room_reference(spec)
        params = _spec_params(spec)
        histories = _map(_room_one, [(plan, spec, s) for s in seeds], plan.jobs)
        per_seed_mean = []
        for seed, hist in zip(seeds, histories):
            err = np.abs(hist - ref)
            for k, row in enumerate(err):
                for state, value in enumerate(row):
                    records.append(ExperimentRecord("room", seed, k, f"abs_err_s{state:02d}", value, params))
                records.append(ExperimentRecord("room", seed, k, "mean_abs_err", row.mean(), params))
            per_seed_mean.append(err.mean(axis=1))
        for k, value in enumerate(np.mean(per_seed_mean, axis=0)):
            records.append(ExperimentRecord("room", AGGREGATE, k, "mean_abs_err_mean", value, params))
    return records


# -- noisy walk ---------------------------------------------------------------


def make_walk(plan: SweepPlan, sigma2: float = 0.0) -> NoisyWalk:
    return NoisyWalk(
        sigma2=sigma2,
        action_scale=plan.walk_action_scale,
        action_scale_is_var=plan.walk_action_is_var,
    )


def walk_reference(plan: SweepPlan) -> float:
    return walk_theta_star(make_walk(plan), episodes=plan.walk_oracle_episodes, seed=plan.seed)


def _walk_thetas(plan: SweepPlan, spec: RegularizerSpec, sigma2: float) -> np.ndarray:
    cfg = OnlineConfig(
        alpha=plan.walk_alpha,
        spec=spec,
        episodes=plan.walk_episodes,
        steps_per_episode=make_walk(plan).episode_length,
        seed=plan.seed,
        alpha_tau=None,
    )
    return semi_gradient_td(make_walk(plan, sigma2), cfg, reps=plan.walk_reps).theta


def _walk_records(name, plan, spec, sigma2, thetas, theta_star):
    params = _spec_params(spec, sigma2=sigma2)
    err = np.abs(thetas - theta_star)
    out = []
    for rep, (th, e) in enumerate(zip(thetas, err)):
        out.append(ExperimentRecord(name, plan.seed + rep, 0, "theta", th, params))
        out.append(ExperimentRecord(name, plan.seed + rep, 0, "abs_theta_err", e, params))
    out.append(ExperimentRecord(name, AGGREGATE, 0, "abs_theta_err_mean", err.mean(), params))
    out.append(ExperimentRecord(name, AGGREGATE, 0, "theta_mean", thetas.mean(), params))
    return out


def run_noisy_walk(plan: SweepPlan, theta_star: float | None = None) -> list[ExperimentRecord]:
    """``|theta_hat - theta*|`` over the observation-noise grid, with and without
    previous-state regularization. ``seed`` holds ``plan.seed + replicate``;
    replicates are columns of one vectorised run."""
    if theta_star is None:
        theta_star = walk_reference(plan)
    records = [ExperimentRecord("noisy_walk", AGGREGATE, 0, "theta_star", theta_star, {})]
    for sigma2 in plan.sigma2s:
        for spec in (RegularizerSpec.none(), RegularizerSpec.previous_state(plan.walk_beta)):
            thetas = _walk_thetas(plan, spec, sigma2)
            records += _walk_records("noisy_walk", plan, spec, sigma2, thetas, theta_star)
    return records


def run_noisy_walk_lambda(plan: SweepPlan, theta_star: float | None = None) -> list[ExperimentRecord]:
    """Exponential-smoothing sweep over ``lam`` at ``plan.walk_lambda_sigma2``."""
    if theta_star is None:
        theta_star = walk_reference(plan)
    records = [ExperimentRecord("noisy_walk_lambda", AGGREGATE, 0, "theta_star", theta_star, {})]
    for lam in plan.lambdas:
        spec = RegularizerSpec.exp_smoothing(plan.walk_beta, lam)
        thetas = _walk_thetas(plan, spec, plan.walk_lambda_sigma2)
        records += _walk_records("noisy_walk_lambda", plan, spec, plan.walk_lambda_sigma2, thetas, theta_star)
    return records


RUNNERS: dict[str, Callable[[SweepPlan], list[ExperimentRecord]]] = {
    "mixing": run_mixing,
    "bias": run_bias,
    "variance": run_variance,
    "room": run_room,
    "noisy_walk": run_noisy_walk,
    "noisy_walk_lambda": run_noisy_walk_lambda,
}


# -- trend checks -------------------------------------------------------------


@dataclass
class TrendCheck:
    name: str
    passed: bool
    stats: dict[str, Any]
    note: str = ""

    def __post_init__(self):
        self.passed = bool(self.passed)


def _not_evaluable(name: str, why: str) -> TrendCheck:
    return TrendCheck(name, False, {}, note="not evaluable: " + why)


def _aggregates(records, metric: str) -> list[ExperimentRecord]:
    return [r for r in records if r.seed == AGGREGATE and r.metric == metric]


def check_mixing(records, plan: SweepPlan) -> TrendCheck:
    at = plan.mixing_check_iter
    by_beta = {r.params["beta"]: r.value for r in _aggregates(records, "dist_to_Pinf_mean") if r.step == at}
    interior = {b: v for b, v in by_beta.items() if 0.0 < b < 1.0}
    if 0.0 not in by_beta or not interior:
        return _not_evaluable("mixing_u_shape", "needs beta = 0 and at least one beta in (0, 1)")
    base = by_beta[0.0]
    best = min(interior, key=interior.get)
    return TrendCheck(
        "mixing_u_shape",
        interior[best] < base,
        {"iteration": at, "beta0": base, "best_beta": best, "best": interior[best], "by_beta": by_beta},
    )


def check_bias(records, plan: SweepPlan) -> TrendCheck:
    rows = [
        r for r in records
        if r.seed != AGGREGATE and r.metric == "mean_abs_bias" and r.params["beta"] == plan.bias_check_beta
    ]
    n = np.array([r.params["n_smooth"] for r in rows], dtype=float)
    if len(set(n.tolist())) < 2:
        return _not_evaluable("bias_decreases_with_n", "needs the check beta and two or more N values")
    y = np.array([r.value for r in rows])
    slope = float(np.polyfit(n, y, 1)[0])
    means = {
        r.params["n_smooth"]: r.value
        for r in _aggregates(records, "mean_abs_bias_mean")
        if r.params["beta"] == plan.bias_check_beta
    }
    return TrendCheck("bias_decreases_with_n", slope < 0.0, {"beta": plan.bias_check_beta, "slope": slope, "mean_by_n": means})


def _final_quartile_mean(records, metric, method) -> float:
    rows = [r for r in _aggregates(records, metric) if r.params["method"] == method]
    last = max(r.step for r in rows)
    vals = [r.value for r in rows if r.step >= 0.75 * last]
    return float(np.mean(vals))


def check_variance(records, plan: SweepPlan) -> TrendCheck:
    base = _final_quartile_mean(records, "var_S1", "none")
    smooth = _final_quartile_mean(records, "var_S1", "exp-smoothing")
    prev = _final_quartile_mean(records, "var_S1", "previous-state")
    return TrendCheck(
        "variance_reduction",
        smooth < base,
        {
            "var_none": base,
            "var_exp_smoothing": smooth,
            "var_previous_state": prev,
            "ratio_exp_smoothing": smooth / base,
            "ratio_previous_state": prev / base,
            "abs_err_none": _final_quartile_mean(records, "abs_err_S1", "none"),
            "abs_err_exp_smoothing": _final_quartile_mean(records, "abs_err_S1", "exp-smoothing"),
        },
        note="step = one TD update; criterion evaluated on exponential smoothing",
    )


def check_room(records, plan: SweepPlan) -> TrendCheck:
    final = {
        r.params["method"]: r.value
        for r in _aggregates(records, "mean_abs_err_mean")
        if r.step == plan.room_trajectories
    }
    ok = final["exp-smoothing"] < final["previous-state"] < final["none"]
    return TrendCheck("room_propagation_order", ok, {"trajectories": plan.room_trajectories, **final})


def check_noisy_walk(records, plan: SweepPlan) -> TrendCheck:
    top = max(plan.sigma2s)
    errs = {
        r.params["method"]: r.value
        for r in _aggregates(records, "abs_theta_err_mean")
        if r.params["sigma2"] == top
    }
    # replicates share random numbers across methods, so pair them by seed
    per_rep: dict[str, dict[int, float]] = {"none": {}, "previous-state": {}}
    for r in records:
        if r.metric == "abs_theta_err" and r.params["sigma2"] == top:
            per_rep[r.params["method"]][r.seed] = r.value
    diffs = np.array([per_rep["none"][k] - per_rep["previous-state"][k] for k in sorted(per_rep["none"])])
    se = float(diffs.std(ddof=1) / np.sqrt(diffs.size)) if diffs.size > 1 else float("nan")
    return TrendCheck(
        "noisy_walk_robustness",
        errs["previous-state"] < errs["none"],
        {"sigma2": top, "err_none": errs["none"], "err_regularized": errs["previous-state"],
         "difference": errs["none"] - errs["previous-state"], "paired_se": se},
    )


def check_noisy_walk_lambda(records, plan: SweepPlan) -> TrendCheck:
    curve = sorted(
        (r.params["lambda"], r.value) for r in _aggregates(records, "abs_theta_err_mean")
    )
    if len(curve) < 3:
        return _not_evaluable("noisy_walk_lambda_interior_min", "needs three or more lambda values")
    lams = [c[0] for c in curve]
    vals = [c[1] for c in curve]
    k = int(np.argmin(vals))
    return TrendCheck(
        "noisy_walk_lambda_interior_min",
        0 < k < len(vals) - 1,
        {"argmin_lambda": lams[k], "curve": dict(curve)},
    )


CHECKS = {
    "mixing": check_mixing,
    "bias": check_bias,
    "variance": check_variance,
    "room": check_room,
    "noisy_walk": check_noisy_walk,
    "noisy_walk_lambda": check_noisy_walk_lambda,
}


def check_trends(name: str, records, plan: SweepPlan) -> TrendCheck:
    return CHECKS[name](records, plan)


# -- output -------------------------------------------------------------------


def write_csv(path: str | os.PathLike, records: Iterable[ExperimentRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for rec in records:
            writer.writerow(rec.row())


def read_csv(path: str | os.PathLike) -> list[ExperimentRecord]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            params: dict[str, Any] = {}
            for key in PARAM_FIELDS:
                val = row[key]
                if val == "":
                    continue
                if key == "method":
                    params[key] = val
                elif key == "n_smooth":
                    params[key] = int(val)
                else:
                    params[key] = float(val)
            out.append(ExperimentRecord(row["experiment"], int(row["seed"]), int(row["step"]),
                                        row["metric"], float(row["value"]), params))
    return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def summary_dict(checks: list[TrendCheck], plan: SweepPlan) -> dict[str, Any]:
    return _jsonable({
        "all_passed": all(c.passed for c in checks),
        "checks": [asdict(c) for c in checks],
        "plan": asdict(plan),
        "notes": {
            "variance_step_unit": "one TD update per step",
            "mixing_metric": "max absolute entry difference (Frobenius in *_fro columns)",
        },
    })


def write_summary(path: str | os.PathLike, checks: list[TrendCheck], plan: SweepPlan) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary_dict(checks, plan), fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_experiment(name: str, plan: SweepPlan, out_dir: str | os.PathLike | None = None) -> tuple[list[ExperimentRecord], TrendCheck]:
    records = RUNNERS[name](plan)
    check = check_trends(name, records, plan)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_csv(os.path.join(out_dir, f"{name}.csv"), records)
    return records, check


def run_all(plan: SweepPlan, out_dir: str | os.PathLike, names: Iterable[str] = EXPERIMENTS) -> list[TrendCheck]:
    """Run the named experiments, writing one CSV each plus ``summary.json``."""
    os.makedirs(out_dir, exist_ok=True)
    checks = []
    theta_star = None
    for name in names:
        if name.startswith("noisy_walk"):
            if theta_star is None:
                theta_star = walk_reference(plan)
            records = RUNNERS[name](plan, theta_star)
            write_csv(os.path.join(out_dir, f"{name}.csv"), records)
            checks.append(check_trends(name, records, plan))
        else:
            checks.append(run_experiment(name, plan, out_dir)[1])
    write_summary(os.path.join(out_dir, "summary.json"), checks, plan)
    return checks
