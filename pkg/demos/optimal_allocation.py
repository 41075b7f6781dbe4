"""Walk through the exhaustive CPU allocator.

Given the current per-function loads it scans every feasible split of the
pool and keeps the one that serves the most load, breaking ties toward the
allocation whose utilizations sit closest to the 0.5 target.
"""

from qlcsim import mio_allocate

POOL = 20
CAP = 10.0  # load units one CPU can carry
U_TARGET = 0.5
AC_THR = 0.9


def show(loads):
    sol = mio_allocate(loads, POOL, CAP, U_TARGET, AC_THR)
    u = tuple(l / (n * CAP) for l, n in zip(loads, sol.allocation))
    print(f"  loads {loads!s:<16} -> allocation {sol.allocation}, "
          f"serves {sol.served_load:6.1f}, utilizations "
          f"({u[0]:.2f}, {u[1]:.2f}), deviation {sol.deviation:.2f}")


def main():
    print(f"pool of {POOL} CPUs, {CAP:.0f} load units per CPU, "
          f"admission threshold {AC_THR}")

    print("\nbalanced load just splits the pool:")
    show((10.0, 10.0))
    show((40.0, 40.0))

    print("\nskewed load pulls CPUs toward the busy function:")
    show((18.0, 2.0))
    show((60.0, 15.0))

    print("\noverload: the allocator maximizes what can still be served:")
    show((150.0, 150.0))
    show((190.0, 10.0))

    print("\nidle functions keep their one-CPU floor:")
    show((25.0, 0.0))


if __name__ == "__main__":
    main()
