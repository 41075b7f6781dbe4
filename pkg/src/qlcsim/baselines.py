"""Benchmark scaling policies.

NO_AUT never scales. THR is the classic reactive pair of utilization
thresholds. MIO is a centralized optimizer with full knowledge of current
loads: it enumerates every feasible allocation of the pool and picks the
one that maximizes the load the slice can serve, breaking ties toward
utilizations closest to the target and then toward the lexicographically
smallest allocation. MIO is the upper benchmark the distributed learners
are measured against.
"""

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


def no_aut_decide(u=None, n_cpu=None):
    """The do-nothing policy."""
    return 0


@dataclass(frozen=True)
class ThrConfig:
    sc_high: float = 0.95
    sc_low: float = 0.15
    step: int = 1

    def __post_init__(self):
        if not 0 < self.sc_low < self.sc_high <= 1:
            raise ValueError("need 0 < sc_low < sc_high <= 1")
        if self.step < 1:
            raise ValueError("step must be at least 1")


def thr_decide(u, n_cpu, cfg):
    """Reactive threshold rule: scale up above sc_high, down below sc_low.

    Never proposes a scale-down that would leave the NF without a CPU.
    """
    if u > cfg.sc_high:
        return cfg.step
    if u < cfg.sc_low and n_cpu - cfg.step >= 1:
        return -cfg.step
    return 0


@dataclass(frozen=True)
class MioSolution:
    allocation: tuple
    served_load: float
    deviation: float

    @property
    def objective(self):
        """Lexicographic objective: served load first, then target closeness."""
        return (self.served_load, -self.deviation)


class MioAllocator:
    """Exhaustive allocator over one (n_nfs, v_pool) geometry.

    The feasible grid (every NF at least one CPU, total at most the pool)
    is enumerated once in lexicographic order and reused across calls.
    """

    def __init__(self, n_nfs, v_pool, cpu_capacity, u_target, ac_thr):
        if n_nfs < 1:
            raise ValueError("need at least one NF")
        if v_pool < n_nfs:
            raise ValueError(f"pool of {v_pool} cannot give {n_nfs} NFs one CPU each")
        if cpu_capacity <= 0 or u_target <= 0 or not 0 < ac_thr <= 1:
            raise ValueError("invalid allocator parameters")
        self.n_nfs = n_nfs
        self.v_pool = v_pool
        self.cpu_capacity = cpu_capacity
        self.u_target = u_target
        self.ac_thr = ac_thr
        grid = [a for a in itertools.product(range(1, v_pool + 1), repeat=n_nfs)
                if sum(a) <= v_pool]
        self._allocs = np.array(grid, dtype=np.int64)
        self._caps = self._allocs * float(cpu_capacity)
        self._thr_caps = ac_thr * self._caps

    def allocate(self, per_nf_load):
        """Best allocation for the given per-NF active loads."""
        loads = np.asarray(per_nf_load, dtype=float)
        if loads.shape != (self.n_nfs,):
            raise ValueError(f"expected {self.n_nfs} load values")
        if loads.min() < 0:
            raise ValueError("loads must be non-negative")
        # fraction of the offered load each NF could carry at the admission
        # threshold; the slice serves the worst NF's fraction, capped at 1
        frac = self._thr_caps / np.where(loads > 0.0, loads, 1.0)
        frac = np.where(loads > 0.0, frac, np.inf)
        served = np.minimum(frac.min(axis=1), 1.0) * loads.sum()
        dev = np.abs(loads / self._caps - self.u_target).sum(axis=1)
        top = served.max()
        on_top = served == top
        best_dev = dev[on_top].min()
        # argmax of the boolean mask returns the first hit, and the grid is
        # lexicographically ordered, so ties resolve to the smallest allocation
        idx = int(np.argmax(on_top & (dev == best_dev)))
        return MioSolution(tuple(int(a) for a in self._allocs[idx]),
                           float(served[idx]), float(dev[idx]))


@lru_cache(maxsize=None)
def _cached_allocator(n_nfs, v_pool, cpu_capacity, u_target, ac_thr):
    return MioAllocator(n_nfs, v_pool, cpu_capacity, u_target, ac_thr)


def mio_allocate(per_nf_load, v_pool, cpu_capacity, u_target, ac_thr):
    """Convenience wrapper around MioAllocator with grid caching."""
    alloc = _cached_allocator(len(per_nf_load), v_pool, cpu_capacity, u_target, ac_thr)
    return alloc.allocate(per_nf_load)
