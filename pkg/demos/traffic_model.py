"""Show the two traffic scenarios side by side.

Scenario 1 offers a constant Poisson stream; scenario 2 modulates the
per-user rate with a two-peak daily shape. Both share the same session
model: normally distributed durations and per-function loads, floored
to stay positive.
"""

import random

import numpy as np

from qlcsim import (
    LoadProfile,
    SessionStream,
    lambda_at,
    next_arrival,
    sample_session,
)

HORIZON = 20_000.0


def describe(profile, label):
    rng = random.Random(1)
    t, n = 0.0, 0
    while True:
        t = next_arrival(profile, t, rng)
        if t is None:
            break
        n += 1
    print(f"{label}: {n} arrivals over {profile.duration:.0f}s "
          f"({n / profile.duration:.3f}/s)")


def main():
    const = LoadProfile.constant(population=100_000, duration=HORIZON,
                                 rate_per_user=2e-5)
    diurnal = LoadProfile.diurnal(population=100_000, duration=HORIZON,
                                  rate_min=5e-7, rate_max=2e-5)

    print("aggregate arrival rate (1/s) across the day:")
    for frac in (0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0):
        t = frac * HORIZON
        lc = lambda_at(const, t)
        ld = lambda_at(diurnal, t)
        bar = "#" * int(round(20 * ld / 2.0))
        print(f"  t={t:>8.0f}  constant {lc:.2f}  diurnal {ld:.2f}  {bar}")

    print()
    describe(const, "constant scenario")
    describe(diurnal, "diurnal scenario")

    rng = random.Random(7)
    sessions = [sample_session(0.0, 2, rng) for _ in range(10_000)]
    durations = [s.duration for s in sessions]
    loads = [l for s in sessions for l in s.load_per_nf]
    print(f"\nsession durations: mean {np.mean(durations):.1f}s, "
          f"sd {np.std(durations):.1f}s (drawn N(60, 5), floored at 0.1)")
    print(f"per-function loads: mean {np.mean(loads):.3f}, "
          f"sd {np.std(loads):.3f} (drawn N(1, 0.02), floored at 0.01)")

    stream = SessionStream(diurnal, 2, np.random.default_rng(3))
    stream.refill()
    print(f"\nbatched stream starts with arrivals at "
          f"{[round(t, 1) for t in stream.times[:5]]} ...")


if __name__ == "__main__":
    main()
