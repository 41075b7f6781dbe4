"""Episode and experiment orchestration.

run_episode drives one episode's discrete-event loop: session arrivals and
departures interleaved with fixed-cadence control iterations and
measurement-window closings. Simultaneous events follow a fixed priority —
window close, then departures, then arrivals, then control — except the
final window boundary at the episode end, which closes after everything
else so end-of-episode events still land in a window.

run_experiment chains episodes, carrying learned Q-tables (and the
exploration schedule position) forward. run_sweep fans an experiment grid
over offered loads, algorithms and seeds, and aggregates the final-episode
measurements with 95% confidence intervals.
"""

import math
import os
import random
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from .agent import (AgentObservation, QTable, encode_state, epsilon_at, load_qtable,
                    reward, save_qtable, select_action, update_q)
from .baselines import mio_allocate, thr_decide
from .config import ALGORITHMS
from .metrics import MetricsRecord, rei
from .slice_env import ScalingRequest, SliceState
from .traffic import SessionStream

_INF = math.inf


@dataclass(frozen=True)
class EpisodeTotals:
    offered: int
    admitted: int
    blocked: int
    conflicts: int


@dataclass
class EpisodeResult:
    metrics: list           # MetricsRecord per measurement window
    conflict_log: list      # ConflictEvent per denied scale-up
    qtables: list           # learned tables (None unless algorithm == "qlc")
    totals: EpisodeTotals
    final_allocation: tuple


def cl_iterations(config):
    """Control instants per episode: k * cl_interval for k with t < T."""
    T = config.episode_duration
    iters = math.ceil(T / config.cl_interval)
    while (iters - 1) * config.cl_interval >= T:
        iters -= 1
    return iters


def run_episode(config, qtables=None, episode_index=0, validate=False):
    """Simulate one episode; deterministic in (config, episode_index).

    Per-episode randomness derives from config.seed + episode_index, so an
    episode can be reproduced without replaying its predecessors. Incoming
    Q-tables are copied, never mutated. With validate=True the invariants
    (admission safety, pool conservation, epsilon monotonicity) are
    re-checked as the episode runs.
    """
    config.validate()
    if not 0 <= episode_index < config.episodes:
        raise ValueError("episode_index outside the configured experiment")
    n = config.n_nfs
    T = config.episode_duration
    algo = config.algorithm
    episode_seed = config.seed + episode_index
    policy_rng = random.Random(episode_seed)
    stream = SessionStream(config.profile(), n, np.random.default_rng(episode_seed),
                           mean_duration=config.service_mean, sd_duration=config.service_sd,
                           mean_load=config.load_mean, sd_load=config.load_sd)
    env = SliceState(n, config.v_pool, config.cpu_capacity, config.ac_thr,
                     config.n_cpu_init, validate=validate)
    iters = cl_iterations(config)

    # -- per-algorithm control policy ------------------------------------
    if algo == "qlc":
        acfg = config.agent_config()
        if qtables is None:
            qtables = [QTable(config.b_levels) for _ in range(n)]
        else:
            if len(qtables) != n:
                raise ValueError("need one Q-table per NF")
            qtables = [qt.copy() for qt in qtables]
        n_train = config.episodes * iters
        k0 = episode_index * iters
        prev_eps = _INF

        def control(k):
            nonlocal prev_eps
            us = env.utilizations()
            eps = epsilon_at(k0 + k, n_train, acfg)
            if validate:
                if eps > prev_eps:
                    raise RuntimeError("exploration rate increased")
                prev_eps = eps
            states = []
            reqs = []
            for i in range(n):
                obs = AgentObservation(us[i], tuple(us[:i] + us[i + 1:]))
                s = encode_state(obs, acfg)
                states.append(s)
                reqs.append(ScalingRequest(i, select_action(qtables[i], s, eps, policy_rng)))
            outcomes = env.resolve_scaling(reqs, policy_rng)
            us2 = env.utilizations()
            for i in range(n):
                r = reward(us[i], us2[i], reqs[i].delta, outcomes[i].granted, acfg)
                obs2 = AgentObservation(us2[i], tuple(us2[:i] + us2[i + 1:]))
                update_q(qtables[i], states[i], reqs[i].delta, r,
                         encode_state(obs2, acfg), acfg)
    elif algo == "thr":
        qtables = None
        tcfg = config.thr_config()

        def control(k):
            us = env.utilizations()
            reqs = [ScalingRequest(i, thr_decide(us[i], env.n_cpu[i], tcfg))
                    for i in range(n)]
            env.resolve_scaling(reqs, policy_rng)
    elif algo == "mio":
        qtables = None

        def control(k):
            sol = mio_allocate(env.active_load(), config.v_pool, config.cpu_capacity,
                               config.u_t, config.ac_thr)
            env.set_allocation(sol.allocation)
    else:  # noaut
        qtables = None
        zero_reqs = [ScalingRequest(i, 0) for i in range(n)]

        def control(k):
            env.resolve_scaling(zero_reqs, policy_rng)

    # -- measurement windows ----------------------------------------------
    meas = config.meas_window
    records = []
    win_idx = 1
    win_start = 0.0
    win_end = min(meas, T)
    win_offered = 0
    win_admitted_base = 0
    win_conflict_base = 0
    integ_base = (0.0,) * n
    ep_offered = 0

    def close_window(b):
        nonlocal win_idx, win_start, win_end, win_offered
        nonlocal win_admitted_base, win_conflict_base, integ_base, ep_offered
        integ = env.utilization_integrals(b)
        width = b - win_start
        u_mean = tuple((integ[i] - integ_base[i]) / width for i in range(n))
        admitted = env.admitted_total - win_admitted_base
        conflicts = len(env.conflict_log) - win_conflict_base
        records.append(MetricsRecord(
            t_start=win_start, t_end=b, offered=win_offered, admitted=admitted,
            lambda_in=win_offered / width, lambda_out=admitted / width,
            u_mean=u_mean, n_cpu_end=tuple(env.n_cpu), conflicts=conflicts,
            rei=rei(u_mean, config.u_t)))
        ep_offered += win_offered
        win_offered = 0
        win_admitted_base = env.admitted_total
        win_conflict_base = len(env.conflict_log)
        integ_base = integ
        win_start = b
        win_idx += 1
        win_end = min(win_idx * meas, T)

    # -- event loop ---------------------------------------------------------
    have = stream.refill()
    at = stream.times
    ad = stream.durations
    al = stream.loads_flat
    a_len = len(at)
    ai = 0
    next_arr = at[0] if have else _INF
    cl_idx = 0
    next_cl = 0.0
    cl_interval = config.cl_interval
    heap = env._departures
    admit = env.admit

    while True:
        t_dep = heap[0][0] if heap else _INF
        t_next = next_arr if next_arr < t_dep else t_dep
        if next_cl < t_next:
            t_next = next_cl
        while win_end < T and win_end <= t_next:
            close_window(win_end)
        if t_next > T:
            # only departures can sit past the episode end; they no longer
            # affect anything measured
            break
        if t_dep <= next_arr and t_dep <= next_cl:
            env.advance(t_dep)
        elif next_arr <= next_cl:
            win_offered += 1
            j = ai * n
            admit(next_arr, ad[ai], al[j:j + n])
            ai += 1
            if ai == a_len:
                if stream.refill():
                    at = stream.times
                    ad = stream.durations
                    al = stream.loads_flat
                    a_len = len(at)
                    ai = 0
                    next_arr = at[0]
                else:
                    next_arr = _INF
            else:
                next_arr = at[ai]
        else:
            env.advance(next_cl)
            control(cl_idx)
            cl_idx += 1
            next_cl = cl_idx * cl_interval if cl_idx < iters else _INF
    while win_start < T:
        close_window(win_end)

    totals = EpisodeTotals(offered=ep_offered, admitted=env.admitted_total,
                           blocked=env.blocked_total, conflicts=len(env.conflict_log))
    if totals.offered != totals.admitted + totals.blocked:
        raise RuntimeError("admission accounting does not add up")
    return EpisodeResult(metrics=records, conflict_log=env.conflict_log,
                         qtables=qtables, totals=totals,
                         final_allocation=tuple(env.n_cpu))


def run_experiment(config, validate=False):
    """Run all configured episodes, chaining learned state; returns one
    EpisodeResult per episode."""
    results = []
    qtables = None
    for e in range(config.episodes):
        res = run_episode(config, qtables=qtables, episode_index=e, validate=validate)
        qtables = res.qtables
        results.append(res)
    return results


# -- sweeps ----------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    lambda_in: float        # aggregate offered rate (1/s)
    algo: str
    lambda_out_mean: float
    lambda_out_ci95: float
    rei_mean: float
    rei_ci95: float


def ci95(values):
    """Half-width of the 95% Student-t confidence interval of the mean."""
    k = len(values)
    if k < 2:
        return 0.0
    sd = float(np.std(values, ddof=1))
    if sd == 0.0:
        return 0.0
    return float(stats.t.ppf(0.975, k - 1)) * sd / math.sqrt(k)


def _sweep_cell(args):
    base, lam, algo, seed = args
    cfg = replace(base, lambda_ue=lam, algorithm=algo, seed=seed, scenario=1)
    if algo == "qlc":
        res = run_experiment(cfg)[-1]
    else:
        # Nothing carries across episodes for the memoryless policies, and
        # episode randomness depends only on seed + episode index, so the
        # final (measured) episode can be reproduced directly.
        res = run_episode(cfg, episode_index=cfg.episodes - 1)
    lam_out = res.totals.admitted / cfg.episode_duration
    rei_mean = sum(r.rei for r in res.metrics) / len(res.metrics)
    return lam_out, rei_mean


def run_sweep(base_config, lambda_values, seeds, algorithms=ALGORITHMS, workers=None):
    """Final-episode served rate and REI over a (lambda, algorithm, seed)
    grid, aggregated across seeds into SweepRow entries.

    Cells are independent simulations; with workers > 1 they are fanned out
    over processes. Row order is lambda-major, then algorithm.
    """
    lambda_values = [float(lam) for lam in lambda_values]
    seeds = [int(s) for s in seeds]
    if not lambda_values or not seeds:
        raise ValueError("need at least one lambda value and one seed")
    cells = [(lam, algo, seed) for lam in lambda_values
             for algo in algorithms for seed in seeds]
    args = [(base_config, lam, algo, seed) for lam, algo, seed in cells]
    if workers is None:
        workers = os.cpu_count() or 1
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_sweep_cell, args))
    else:
        outcomes = [_sweep_cell(a) for a in args]
    grouped = defaultdict(list)
    for (lam, algo, _seed), out in zip(cells, outcomes):
        grouped[(lam, algo)].append(out)
    rows = []
    for lam in dict.fromkeys(lambda_values):
        for algo in algorithms:
            vals = grouped[(lam, algo)]
            louts = [v[0] for v in vals]
            reis = [v[1] for v in vals]
            rows.append(SweepRow(
                lambda_in=base_config.population * lam, algo=algo,
                lambda_out_mean=sum(louts) / len(louts), lambda_out_ci95=ci95(louts),
                rei_mean=sum(reis) / len(reis), rei_ci95=ci95(reis)))
    return rows


def write_sweep_csv(path, rows):
    with open(path, "w", newline="") as fh:
        fh.write("lambda_in,algo,lambda_out_mean,lambda_out_ci95,rei_mean,rei_ci95\n")
        for r in rows:
            fh.write(f"{r.lambda_in:.6f},{r.algo},{r.lambda_out_mean:.6f},"
                     f"{r.lambda_out_ci95:.6f},{r.rei_mean:.6f},{r.rei_ci95:.6f}\n")


# -- learned-state persistence ----------------------------------------------


def qtable_path(out_dir, agent_index):
    return os.path.join(out_dir, f"qtable_agent{agent_index}.csv")


def save_qtables(qtables, out_dir):
    """One CSV per agent under out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    for i, qt in enumerate(qtables):
        save_qtable(qt, qtable_path(out_dir, i))


def load_qtables(out_dir, n_agents, b_levels=2):
    return [load_qtable(qtable_path(out_dir, i), b_levels) for i in range(n_agents)]
