"""Measurement-window metrics and their CSV forms.

The headline efficiency figure is the resource efficiency index (REI): the
mean over NFs of utilization divided by the target utilization. REI of 1
means the slice runs exactly at target; above 1 is under-provisioned,
below 1 wastes CPUs.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MetricsRecord:
    """Aggregates for one measurement window."""

    t_start: float
    t_end: float
    offered: int
    admitted: int
    lambda_in: float      # offered request rate in the window (1/s)
    lambda_out: float     # admitted (served) request rate (1/s)
    u_mean: tuple         # time-averaged utilization per NF
    n_cpu_end: tuple      # allocation when the window closed
    conflicts: int
    rei: float


def rei(u_values, u_target):
    """Resource efficiency index of a utilization vector."""
    if u_target <= 0:
        raise ValueError("u_target must be positive")
    if not u_values:
        raise ValueError("need at least one utilization value")
    return sum(u / u_target for u in u_values) / len(u_values)


def window_rates(admitted, offered, window_seconds):
    """(lambda_out, lambda_in) for one measurement window."""
    if window_seconds <= 0:
        raise ValueError("window must have positive length")
    if admitted > offered or admitted < 0:
        raise ValueError("admitted must lie in [0, offered]")
    return admitted / window_seconds, offered / window_seconds


def conflict_density(event_times, window_seconds, t_end=None):
    """Conflicts per hour in consecutive windows covering [0, t_end].

    `t_end` defaults to the last event time; the final window may be
    partial but is still normalized by the full window length, matching
    how the rate would be read off a fixed-cadence monitor.
    """
    if window_seconds <= 0:
        raise ValueError("window must have positive length")
    times = np.asarray(sorted(event_times), dtype=float)
    if t_end is None:
        t_end = float(times[-1]) if len(times) else window_seconds
    n_windows = max(int(np.ceil(t_end / window_seconds)), 1)
    counts = np.zeros(n_windows)
    if len(times):
        idx = np.minimum((times // window_seconds).astype(int), n_windows - 1)
        np.add.at(counts, idx, 1.0)
    return counts * (3600.0 / window_seconds)


# -- CSV emission ----------------------------------------------------------


def metrics_header(n_nfs):
    us = ",".join(f"u_{i + 1}" for i in range(n_nfs))
    ns = ",".join(f"n_cpu_{i + 1}" for i in range(n_nfs))
    return f"t_start,t_end,lambda_in,lambda_out,{us},{ns},conflicts,rei"


def metrics_rows(records):
    """Fixed-precision CSV lines for a sequence of MetricsRecord."""
    lines = []
    for r in records:
        us = ",".join(f"{u:.6f}" for u in r.u_mean)
        ns = ",".join(str(c) for c in r.n_cpu_end)
        lines.append(f"{r.t_start:.1f},{r.t_end:.1f},{r.lambda_in:.6f},{r.lambda_out:.6f},"
                     f"{us},{ns},{r.conflicts},{r.rei:.6f}")
    return lines


def write_metrics_csv(path, records, n_nfs):
    with open(path, "w", newline="") as fh:
        fh.write(metrics_header(n_nfs) + "\n")
        lines = metrics_rows(records)
        if lines:
            fh.write("\n".join(lines) + "\n")


def write_conflict_csv(path, events):
    """Conflict log as CSV: one row per denied scale-up."""
    with open(path, "w", newline="") as fh:
        fh.write("t,agent,delta\n")
        for e in events:
            fh.write(f"{e.t:.6f},{e.agent_index},{e.delta}\n")
