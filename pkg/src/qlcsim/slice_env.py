"""Network-slice environment: per-NF CPU allocations drawing on one shared
finite pool, session admission control, and arbitration of concurrent
scaling requests.

Utilization of an NF is the sum of its active session loads divided by its
allocated capacity (n_cpu * cpu_capacity). A request is admitted only if
every NF would stay at or below the admission threshold with the new load
included; otherwise it is blocked and leaves no trace beyond a counter.

Scaling requests from all agents at a control instant are applied in
uniform random order. Scale-ups beyond the free pool are denied and logged
as conflicts; scale-downs below one CPU are denied outright. Grants take
effect immediately, so CPUs freed earlier in the same batch can be claimed
by later requests.
"""

import heapq
from dataclasses import dataclass
from enum import Enum

# Deltas a single scaling request may carry. The learning agents' action
# set aliases this tuple.
SCALING_DELTAS = (-2, -1, 0, 1, 2)


class ScaleCause(Enum):
    APPLIED = "applied"
    NO_OP = "no_op"
    CONFLICT_POOL_EXHAUSTED = "conflict_pool_exhausted"
    INVALID_BELOW_FLOOR = "invalid_below_floor"


@dataclass(frozen=True)
class ScalingRequest:
    agent_index: int
    delta: int


@dataclass(frozen=True)
class ScalingOutcome:
    agent_index: int
    delta: int
    granted: bool
    cause: ScaleCause


@dataclass(frozen=True)
class ConflictEvent:
    """A scale-up that found too few free CPUs at its processing instant."""

    t: float
    agent_index: int
    delta: int


class SliceState:
    """Mutable slice state shared by all NFs of one slice.

    Tracks allocations, the free pool, active sessions (as a departure
    heap), admission counters, the conflict log, and running time
    integrals of per-NF utilization for windowed averaging.
    """

    def __init__(self, n_nfs, v_pool, cpu_capacity=10.0, ac_thr=0.9, n_cpu_init=1,
                 validate=False):
        if n_nfs < 1:
            raise ValueError("need at least one NF")
        if n_cpu_init < 1:
            raise ValueError("initial allocation must be at least 1 CPU")
        if v_pool < n_nfs * n_cpu_init:
            raise ValueError("pool too small for the initial allocations")
        if cpu_capacity <= 0 or not 0 < ac_thr <= 1:
            raise ValueError("cpu_capacity must be positive and 0 < ac_thr <= 1")
        self.n_nfs = n_nfs
        self.v_pool = v_pool
        self.cpu_capacity = cpu_capacity
        self.ac_thr = ac_thr
        self.n_cpu = [n_cpu_init] * n_nfs
        self.free = v_pool - n_cpu_init * n_nfs
        self.now = 0.0
        self.admitted_total = 0
        self.blocked_total = 0
        self.conflict_log = []
        self._load = [0.0] * n_nfs
        self._departures = []  # heap of (departure_time, load_0, ..., load_{n-1})
        self._u_accum = [0.0] * n_nfs
        self._accrued_to = 0.0
        self._validate = validate

    # -- observation ----------------------------------------------------

    def utilization(self, nf_index, t=None):
        """Utilization of one NF, now or at a future instant t.

        The t >= now form is a read-only projection counting only sessions
        that survive past t; it does not move the clock.
        """
        if t is None or t == self.now:
            return self._load[nf_index] / (self.n_cpu[nf_index] * self.cpu_capacity)
        if t < self.now:
            raise ValueError("cannot evaluate utilization in the past")
        total = 0.0
        j = nf_index + 1
        for entry in self._departures:
            if entry[0] > t:
                total += entry[j]
        return total / (self.n_cpu[nf_index] * self.cpu_capacity)

    def utilizations(self):
        """Current utilization of every NF as a list."""
        cap = self.cpu_capacity
        load = self._load
        ncpu = self.n_cpu
        return [load[i] / (ncpu[i] * cap) for i in range(self.n_nfs)]

    def active_load(self):
        """Sum of active session loads per NF."""
        return tuple(self._load)

    def active_sessions(self):
        """Number of sessions currently holding resources."""
        return len(self._departures)

    # -- time -----------------------------------------------------------

    def _accrue(self, t):
        # Integrate utilization up to t; must be called before any change
        # to loads or allocations so windowed means stay exact.
        dt = t - self._accrued_to
        if dt > 0.0:
            cap = self.cpu_capacity
            for i in range(self.n_nfs):
                self._u_accum[i] += self._load[i] / (self.n_cpu[i] * cap) * dt
            self._accrued_to = t

    def advance(self, t):
        """Process session expirations up to and including t; returns how
        many sessions ended."""
        if t < self.now:
            raise ValueError(f"cannot advance backwards: {t} < {self.now}")
        heap = self._departures
        expired = 0
        while heap and heap[0][0] <= t:
            entry = heapq.heappop(heap)
            self._accrue(entry[0])
            for i in range(self.n_nfs):
                v = self._load[i] - entry[i + 1]
                # exact cancellation is not guaranteed in float; never go negative
                self._load[i] = v if v > 0.0 else 0.0
            expired += 1
        self.now = t
        return expired

    def utilization_integrals(self, t):
        """Advance to t and return the per-NF integral of u over [0, t]."""
        self.advance(t)
        self._accrue(t)
        return tuple(self._u_accum)

    # -- admission ------------------------------------------------------

    def try_admit(self, session, t=None):
        """Admission test for a sampled session at its arrival instant."""
        if t is not None and t != session.arrival_time:
            raise ValueError("admission instant must be the session's arrival time")
        return self.admit(session.arrival_time, session.duration, session.load_per_nf)

    def admit(self, t, duration, loads):
        """Admit a request iff every NF stays within the admission threshold
        with the new load included. Returns True when admitted."""
        if t != self.now:
            dep = self._departures
            if dep and dep[0][0] <= t:
                self.advance(t)
            elif t < self.now:
                self.advance(t)  # let advance raise its usual error
            else:
                self.now = t
        cap = self.cpu_capacity
        thr = self.ac_thr
        load = self._load
        ncpu = self.n_cpu
        for i in range(self.n_nfs):
            if (load[i] + loads[i]) / (ncpu[i] * cap) > thr:
                self.blocked_total += 1
                return False
        self._accrue(t)
        for i in range(self.n_nfs):
            load[i] += loads[i]
        heapq.heappush(self._departures, (t + duration,) + tuple(loads))
        self.admitted_total += 1
        if self._validate:
            for i in range(self.n_nfs):
                if load[i] / (ncpu[i] * cap) > thr:
                    raise RuntimeError("admission pushed utilization past the threshold")
        return True

    # -- scaling --------------------------------------------------------

    def resolve_scaling(self, requests, rng):
        """Apply a batch of concurrent scaling requests in uniform random
        order; returns one outcome per request, in request order."""
        seen = set()
        for req in requests:
            if not 0 <= req.agent_index < self.n_nfs:
                raise ValueError(f"no such agent: {req.agent_index}")
            if req.agent_index in seen:
                raise ValueError(f"duplicate scaling request for agent {req.agent_index}")
            if req.delta not in SCALING_DELTAS:
                raise ValueError(f"delta {req.delta} outside {SCALING_DELTAS}")
            seen.add(req.agent_index)
        order = list(range(len(requests)))
        rng.shuffle(order)
        outcomes = [None] * len(requests)
        t = self.now
        for k in order:
            req = requests[k]
            d = req.delta
            i = req.agent_index
            if d == 0:
                outcomes[k] = ScalingOutcome(i, 0, True, ScaleCause.NO_OP)
            elif d < 0:
                if self.n_cpu[i] + d >= 1:
                    self._accrue(t)
                    self.n_cpu[i] += d
                    self.free -= d
                    outcomes[k] = ScalingOutcome(i, d, True, ScaleCause.APPLIED)
                else:
                    outcomes[k] = ScalingOutcome(i, d, False, ScaleCause.INVALID_BELOW_FLOOR)
            elif d <= self.free:
                self._accrue(t)
                self.n_cpu[i] += d
                self.free -= d
                outcomes[k] = ScalingOutcome(i, d, True, ScaleCause.APPLIED)
            else:
                outcomes[k] = ScalingOutcome(i, d, False, ScaleCause.CONFLICT_POOL_EXHAUSTED)
                self.conflict_log.append(ConflictEvent(t, i, d))
        if sum(self.n_cpu) + self.free != self.v_pool or min(self.n_cpu) < 1:
            raise RuntimeError("pool accounting violated")
        return outcomes

    def set_allocation(self, allocation):
        """Replace all allocations at once (central optimizer path)."""
        alloc = [int(a) for a in allocation]
        if len(alloc) != self.n_nfs:
            raise ValueError("allocation length does not match the NF count")
        if min(alloc) < 1:
            raise ValueError("every NF keeps at least one CPU")
        if sum(alloc) > self.v_pool:
            raise ValueError("allocation exceeds the pool")
        self._accrue(self.now)
        self.n_cpu[:] = alloc
        self.free = self.v_pool - sum(alloc)
