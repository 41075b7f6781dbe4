"""End-to-end acceptance checks for the simulator.

Each test covers one headline claim about the system (served-load ordering,
learning effects, optimizer exactness, determinism, fairness) and prints a
single verdict line straight to the terminal so the suite doubles as a
checklist. The served-load sweep is computed once and shared; the whole
module is sized to finish well inside fifteen minutes on one core.
"""

import os
import random
import time
from pathlib import Path
from statistics import fmean

import numpy as np
import pytest

from qlcsim import (
    AgentConfig,
    CompositeState,
    QTable,
    ScalingRequest,
    SimConfig,
    SliceState,
    mio_allocate,
    run_experiment,
    run_sweep,
    save_qtables,
    update_q,
    write_conflict_csv,
    write_metrics_csv,
)

SWEEP_BUDGET_SECONDS = 900.0


def _verdict(capsys, name, ok, detail):
    with capsys.disabled():
        print(f"\nacceptance[{name}]: {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def sweep():
    """Full served-load sweep: 8 offered-load points x 4 algorithms x 10 seeds."""
    base = SimConfig()
    lambdas = np.linspace(5e-7, 2e-5, 8)
    seeds = [1000 * j for j in range(10)]
    t0 = time.perf_counter()
    rows = run_sweep(base, lambdas, seeds, workers=1)
    elapsed = time.perf_counter() - t0
    return rows, elapsed


def _by_point(rows):
    """{lambda_in: {algo: row}} with lambda points in ascending order."""
    table = {}
    for row in rows:
        table.setdefault(row.lambda_in, {})[row.algo] = row
    return dict(sorted(table.items()))


def test_served_load_ordering_at_peak(sweep, capsys):
    """At the heaviest offered load the mean served rate must be ordered
    mio >= qlc >= thr >= noaut; a gap may close to zero but must not invert
    by more than half a confidence-interval width. The sweep itself has to
    finish inside the runtime budget."""
    rows, elapsed = sweep
    peak = _by_point(rows)[max(r.lambda_in for r in rows)]
    means = {a: peak[a].lambda_out_mean for a in ("mio", "qlc", "thr", "noaut")}
    problems = []
    for hi, lo in (("mio", "qlc"), ("qlc", "thr"), ("thr", "noaut")):
        tol = 0.5 * max(peak[hi].lambda_out_ci95, peak[lo].lambda_out_ci95)
        if means[hi] < means[lo] - tol:
            problems.append(f"{hi}={means[hi]:.4f} < {lo}={means[lo]:.4f} (tol {tol:.4f})")
    if elapsed >= SWEEP_BUDGET_SECONDS:
        problems.append(f"sweep took {elapsed:.0f}s (budget {SWEEP_BUDGET_SECONDS:.0f}s)")
    detail = ("served at peak: " +
              " >= ".join(f"{a} {means[a]:.4f}" for a in ("mio", "qlc", "thr", "noaut")) +
              f"; sweep ran {elapsed:.0f}s")
    if problems:
        detail += "; " + "; ".join(problems)
    _verdict(capsys, "served-load-ordering", not problems, detail)


def test_qlc_outserves_thr_at_peak(sweep, capsys):
    """Learned control must beat the reactive threshold rule by at least 10%
    in mean served rate at the heaviest load."""
    rows, _ = sweep
    peak = _by_point(rows)[max(r.lambda_in for r in rows)]
    qlc = peak["qlc"].lambda_out_mean
    thr = peak["thr"].lambda_out_mean
    ok = thr > 0 and qlc >= 1.10 * thr
    _verdict(capsys, "qlc-vs-thr-gain", ok,
             f"qlc {qlc:.4f}/s vs thr {thr:.4f}/s ({qlc / thr:.2f}x, need >= 1.10x)")


def test_low_load_parity(sweep, capsys):
    """At the lightest offered load every algorithm serves essentially all
    traffic: the four means sit within 2% of each other and within 5% of the
    offered rate."""
    rows, _ = sweep
    lam_in = min(r.lambda_in for r in rows)
    point = _by_point(rows)[lam_in]
    means = {a: point[a].lambda_out_mean for a in point}
    lo, hi = min(means.values()), max(means.values())
    spread_ok = lo > 0 and hi <= 1.02 * lo
    offered_ok = all(abs(v - lam_in) <= 0.05 * lam_in for v in means.values())
    detail = (f"offered {lam_in:.4f}/s, served " +
              ", ".join(f"{a} {v:.4f}" for a, v in sorted(means.items())) +
              f"; spread {hi / lo - 1:.2%}")
    _verdict(capsys, "low-load-parity", spread_ok and offered_ok, detail)


def test_conflicts_decay_with_training(capsys):
    """Under the time-varying traffic scenario the learned agents must cut
    scaling conflicts over training: mean final-episode count at most half
    the mean first-episode count over five seeds."""
    firsts, finals = [], []
    for j in range(5):
        cfg = SimConfig(algorithm="qlc", scenario=2, seed=1000 * j)
        results = run_experiment(cfg)
        firsts.append(results[0].totals.conflicts)
        finals.append(results[-1].totals.conflicts)
    mean_first, mean_final = fmean(firsts), fmean(finals)
    ok = mean_first > 0 and mean_final <= 0.5 * mean_first
    _verdict(capsys, "conflict-decay", ok,
             f"episode 1 mean {mean_first:.1f} -> final mean {mean_final:.1f} "
             f"({mean_final / mean_first:.1%}, need <= 50%)")


def test_qlc_rei_nearer_target_at_mid_load(sweep, capsys):
    """At mid loads (offered rate between 0.5/s and 1.0/s) the learned
    policy's mean resource-efficiency index must sit at least as close to 1
    as the threshold rule's."""
    rows, _ = sweep
    checked, problems = [], []
    for lam_in, point in _by_point(rows).items():
        if not 0.5 <= lam_in <= 1.0:
            continue
        q_gap = abs(point["qlc"].rei_mean - 1.0)
        t_gap = abs(point["thr"].rei_mean - 1.0)
        checked.append(f"at {lam_in:.3f}/s |qlc-1|={q_gap:.3f} vs |thr-1|={t_gap:.3f}")
        if q_gap > t_gap:
            problems.append(f"qlc farther from target at {lam_in:.3f}/s")
    ok = bool(checked) and not problems
    detail = "; ".join(checked) if checked else "no sweep points in the mid-load band"
    if problems:
        detail += "; " + "; ".join(problems)
    _verdict(capsys, "rei-mid-load", ok, detail)


def _exhaustive_best(loads, v_pool, cap, u_target, ac_thr):
    """Reference allocator: scan the feasible grid in lexicographic order and
    keep the first strictly-better (served, -deviation) pair."""
    best_obj, best_alloc = None, None
    for a0 in range(1, v_pool):
        for a1 in range(1, v_pool - a0 + 1):
            fracs = [ac_thr * (n * cap) / load
                     for n, load in zip((a0, a1), loads) if load > 0.0]
            frac = min(fracs) if fracs else 1.0
            if frac > 1.0:
                frac = 1.0
            served = frac * sum(loads)
            dev = sum(abs(load / (n * cap) - u_target)
                      for n, load in zip((a0, a1), loads))
            obj = (served, -dev)
            if best_obj is None or obj > best_obj:
                best_obj, best_alloc = obj, (a0, a1)
    return best_alloc, best_obj


def test_optimal_allocator_matches_exhaustive_search(capsys):
    """The vectorized allocator must agree with a scalar exhaustive search on
    1000 random two-NF instances (pool sizes 2..20, loads in [0, 200]) with
    exact tuple equality — zero mismatches tolerated."""
    rng = random.Random(2026)
    mismatches = 0
    for _ in range(1000):
        v_pool = rng.randint(2, 20)
        loads = []
        for _ in range(2):
            r = rng.random()
            loads.append(0.0 if r < 0.08 else rng.uniform(0.0, 200.0))
        if rng.random() < 0.15:
            loads[1] = loads[0]  # exercise tie handling
        got = mio_allocate(tuple(loads), v_pool, 10.0, 0.5, 0.9)
        want_alloc, (want_served, want_neg_dev) = _exhaustive_best(
            loads, v_pool, 10.0, 0.5, 0.9)
        if (got.allocation != want_alloc or got.served_load != want_served
                or got.deviation != -want_neg_dev):
            mismatches += 1
    _verdict(capsys, "optimal-allocator-exact", mismatches == 0,
             f"{1000 - mismatches}/1000 instances matched exactly "
             "(pool 2-20, loads 0-200, ties and zero loads included)")


def test_q_update_reaches_fixed_point(capsys):
    """Repeated updates on a single self-looping state with constant reward 1
    and discount 0.9 must converge to the fixed point 10 within 1e-6 in at
    most 200 iterations (run at learning rate 1.0, where each update is a
    full contraction by the discount factor)."""
    cfg = AgentConfig(alpha=1.0)
    table = QTable(cfg.b_levels)
    state = CompositeState(0, 0)
    converged_at = None
    q = 0.0
    for k in range(1, 201):
        q = update_q(table, state, 0, 1.0, state, cfg)
        if abs(q - 10.0) <= 1e-6:
            converged_at = k
            break
    _verdict(capsys, "q-fixed-point", converged_at is not None,
             f"q = {q:.9f} after {converged_at or 200} updates "
             "(target 10 within 1e-6, limit 200)")


def _render_run(results, out_dir, n_nfs):
    os.makedirs(out_dir)
    for e, res in enumerate(results):
        write_metrics_csv(os.path.join(out_dir, f"metrics_ep{e:02d}.csv"),
                          res.metrics, n_nfs)
        write_conflict_csv(os.path.join(out_dir, f"conflicts_ep{e:02d}.csv"),
                           res.conflict_log)
    save_qtables(results[-1].qtables, out_dir)


def test_invariants_and_determinism(tmp_path, capsys):
    """Full runs of both traffic scenarios with runtime guards enabled: pool
    conservation and admission safety hold throughout, learned tables keep
    the expected shape, exploration decays monotonically, and a repeat run
    under the same seed reproduces every output file bit for bit."""
    problems, files_checked = [], 0
    for scenario in (1, 2):
        cfg = SimConfig(algorithm="qlc", scenario=scenario, seed=7)
        results_a = run_experiment(cfg, validate=True)
        results_b = run_experiment(cfg, validate=True)
        for table in results_a[-1].qtables:
            expected = (2 * cfg.b_levels + 1) * 3 * 5
            if table.n_entries != expected:
                problems.append(f"scenario {scenario}: table has "
                                f"{table.n_entries} entries, expected {expected}")
        dir_a = tmp_path / f"s{scenario}a"
        dir_b = tmp_path / f"s{scenario}b"
        _render_run(results_a, str(dir_a), cfg.n_nfs)
        _render_run(results_b, str(dir_b), cfg.n_nfs)
        names_a = sorted(p.name for p in dir_a.iterdir())
        names_b = sorted(p.name for p in dir_b.iterdir())
        if names_a != names_b:
            problems.append(f"scenario {scenario}: file sets differ")
            continue
        for name in names_a:
            files_checked += 1
            if (dir_a / name).read_bytes() != (dir_b / name).read_bytes():
                problems.append(f"scenario {scenario}: {name} differs between reruns")
    detail = (f"both scenarios: guards held, tables 75 entries/agent, "
              f"{files_checked} output files bit-identical across reruns")
    if problems:
        detail = "; ".join(problems)
    _verdict(capsys, "invariants-determinism", not problems, detail)


def test_contended_scale_up_is_fair(capsys):
    """With two CPUs left and both agents asking for two more, exactly one
    request is granted per trial, and over ten thousand seeded trials each
    agent wins 50% +/- 2%."""
    wins = [0, 0]
    clean = True
    for trial in range(10_000):
        env = SliceState(2, 20, n_cpu_init=9)  # 2 CPUs left unallocated
        outcomes = env.resolve_scaling(
            [ScalingRequest(0, 2), ScalingRequest(1, 2)], random.Random(trial))
        granted = [o.agent_index for o in outcomes if o.granted]
        if len(granted) != 1 or len(env.conflict_log) != 1:
            clean = False
            break
        wins[granted[0]] += 1
    share = wins[0] / 10_000
    ok = clean and 0.48 <= share <= 0.52
    _verdict(capsys, "contention-fairness", ok,
             f"agent 0 won {wins[0]}, agent 1 won {wins[1]} "
             f"({share:.1%} vs {1 - share:.1%}, need 50% +/- 2%)")
