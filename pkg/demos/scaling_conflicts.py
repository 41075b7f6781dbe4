"""Scaling conflicts: what they are and how training removes them.

A conflict happens when an agent asks for more CPUs than the shared pool
has left. Concurrent requests are resolved in uniform random order, so
contention is fair but somebody still loses. The second half of the demo
trains the learning agents on a small scenario and prints the per-episode
conflict counts, which fall as the agents learn to stop over-asking.
"""

import random

from qlcsim import ScalingRequest, SimConfig, SliceState, run_experiment


def contention():
    print("two agents, two CPUs left, both ask for two more:")
    wins = [0, 0]
    for trial in range(1000):
        env = SliceState(2, 20, n_cpu_init=9)
        outcomes = env.resolve_scaling(
            [ScalingRequest(0, 2), ScalingRequest(1, 2)], random.Random(trial))
        for out in outcomes:
            if out.granted:
                wins[out.agent_index] += 1
    print(f"  over 1000 trials agent 0 won {wins[0]}, agent 1 won {wins[1]}; "
          "each trial grants exactly one request\n")


CFG = SimConfig(algorithm="qlc", scenario=1, seed=0,
                episode_duration=30_000.0, episodes=10)


def training_trend():
    print(f"training on {CFG.episodes} episodes of {CFG.episode_duration:.0f}s "
          f"at peak load (seed {CFG.seed}):")
    print("  episode  conflicts  served/s")
    results = run_experiment(CFG)
    for e, res in enumerate(results, start=1):
        served = res.totals.admitted / CFG.episode_duration
        bar = "#" * (res.totals.conflicts // 25)
        print(f"  {e:>7}  {res.totals.conflicts:>9}  {served:8.3f}  {bar}")
    print("\nconflicts peak while exploration is high, then the agents learn "
          "what the pool can actually grant.")
    return results


def main():
    contention()
    final = training_trend()[-1]
    times = [f"{ev.t:.0f}" for ev in final.conflict_log[:8]]
    print(f"the few remaining ones happen at control instants: "
          f"t = {', '.join(times) if times else '(none)'}")


if __name__ == "__main__":
    main()
