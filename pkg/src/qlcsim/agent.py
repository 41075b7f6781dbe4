"""Per-NF Q-learning agent.

Each agent controls the CPU allocation of one network function but encodes
its state from the utilizations of *all* NFs sharing the pool: a discrete
"load level" around the target utilization, computed from the pooled mean,
plus a three-way "balance" flag saying whether the agent sits above, near,
or below that mean. Neighbor awareness is what lets independently learning
agents avoid fighting over the same free CPUs.

Action selection is epsilon-greedy with an exponentially decaying epsilon;
updates are standard one-step Q-learning.
"""

from typing import NamedTuple
from dataclasses import dataclass

from .slice_env import SCALING_DELTAS as ACTIONS


class CompositeState(NamedTuple):
    load_level: int   # -b_levels .. +b_levels; 0 is nearest the target
    balance: int      # -1 below / 0 near / +1 above the pooled mean


class AgentObservation(NamedTuple):
    u_self: float
    u_neighbors: tuple  # utilizations of the other NFs on the same pool


@dataclass(frozen=True)
class AgentConfig:
    alpha: float = 0.5
    gamma: float = 0.9
    epsilon_init: float = 0.9
    epsilon_final: float = 0.0001
    b_levels: int = 2
    reward_k: float = 10.0
    reward_delta: float = 0.05
    u_target: float = 0.5
    balance_deadband: float = 0.01

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must be in (0, 1]")
        if not 0 <= self.gamma < 1:
            raise ValueError("gamma must be in [0, 1)")
        if not 0 < self.epsilon_final <= self.epsilon_init <= 1:
            raise ValueError("need 0 < epsilon_final <= epsilon_init <= 1")
        if self.b_levels < 1:
            raise ValueError("b_levels must be at least 1")
        if self.u_target <= 0 or self.reward_k <= 0 or self.reward_delta <= 0:
            raise ValueError("u_target, reward_k and reward_delta must be positive")
        if self.balance_deadband < 0:
            raise ValueError("balance_deadband must be non-negative")


class QTable:
    """Action-value table over the full composite-state grid.

    Rows are keyed by CompositeState and zero-initialized, so the table has
    (2 * b_levels + 1) * 3 states regardless of how many agents share the
    pool.
    """

    def __init__(self, b_levels=2):
        if b_levels < 1:
            raise ValueError("b_levels must be at least 1")
        self.b_levels = b_levels
        self.rows = {
            CompositeState(lv, b): [0.0] * len(ACTIONS)
            for lv in range(-b_levels, b_levels + 1)
            for b in (-1, 0, 1)
        }

    @property
    def n_states(self):
        return len(self.rows)

    @property
    def n_entries(self):
        return len(self.rows) * len(ACTIONS)

    def copy(self):
        dup = QTable(self.b_levels)
        for s, row in self.rows.items():
            dup.rows[s] = list(row)
        return dup

    def __eq__(self, other):
        return isinstance(other, QTable) and self.rows == other.rows

    def __repr__(self):
        return f"QTable(b_levels={self.b_levels}, states={self.n_states})"


def encode_state(obs, cfg):
    """Map raw utilizations to the discrete composite state.

    The load level buckets the pooled mean utilization around the target in
    steps of u_target / b_levels, clamped at +/- b_levels. The balance flag
    compares the agent's own utilization against the pooled mean with a
    small deadband so sub-percent noise reads as "balanced".
    """
    mean = (obs.u_self + sum(obs.u_neighbors)) / (1 + len(obs.u_neighbors))
    width = cfg.u_target / cfg.b_levels
    level = round((mean - cfg.u_target) / width)
    if level > cfg.b_levels:
        level = cfg.b_levels
    elif level < -cfg.b_levels:
        level = -cfg.b_levels
    gap = obs.u_self - mean
    if gap > cfg.balance_deadband:
        balance = 1
    elif gap < -cfg.balance_deadband:
        balance = -1
    else:
        balance = 0
    return CompositeState(level, balance)


def select_action(qtable, state, epsilon, rng):
    """Epsilon-greedy draw; greedy ties are broken uniformly."""
    if rng.random() < epsilon:
        return ACTIONS[rng.randrange(len(ACTIONS))]
    row = qtable.rows[state]
    best = max(row)
    if row.count(best) == 1:
        return ACTIONS[row.index(best)]
    ties = [a for a, q in zip(ACTIONS, row) if q == best]
    return ties[rng.randrange(len(ties))]


def reward(u_before, u_after, action, granted, cfg):
    """Shaped reward for one control decision.

    A scaling attempt is paid by how much closer it moved utilization to
    the target; a denied attempt leaves utilization unchanged and so earns
    exactly zero through the same expression. Holding (action 0) is paid by
    proximity to the target, peaking at u_target**2 / reward_delta**2.
    """
    if action != 0:
        return cfg.reward_k * (abs(u_before - cfg.u_target) - abs(u_after - cfg.u_target))
    gap = u_before - cfg.u_target
    return cfg.u_target * cfg.u_target / (gap * gap + cfg.reward_delta * cfg.reward_delta)


def update_q(qtable, state, action, reward_value, next_state, cfg):
    """One-step Q-learning update; returns the new table entry."""
    if action not in ACTIONS:
        raise ValueError(f"action {action} outside {ACTIONS}")
    row = qtable.rows[state]
    j = action + 2
    q = row[j]
    q += cfg.alpha * (reward_value + cfg.gamma * max(qtable.rows[next_state]) - q)
    row[j] = q
    return q


def epsilon_at(iteration, total_iterations, cfg):
    """Exploration rate at a global training iteration.

    Decays exponentially from epsilon_init so that epsilon_final is reached
    at 80% of the total training iterations, then stays flat. The iteration
    index runs across episode boundaries.
    """
    if total_iterations < 1:
        raise ValueError("total_iterations must be at least 1")
    if iteration < 0:
        raise ValueError("iteration must be non-negative")
    if cfg.epsilon_init == cfg.epsilon_final:
        return cfg.epsilon_final
    ratio = cfg.epsilon_final / cfg.epsilon_init
    eps = cfg.epsilon_init * ratio ** (iteration / (0.8 * total_iterations))
    return max(eps, cfg.epsilon_final)


# -- persistence ---------------------------------------------------------

_CSV_HEADER = "s_load,s_balance,action,q_value"


def save_qtable(qtable, path):
    """Write the table as CSV, one row per (state, action) entry.

    Values use 17 significant digits so a load round-trips bit-exactly.
    """
    lines = [_CSV_HEADER]
    for lv in range(-qtable.b_levels, qtable.b_levels + 1):
        for b in (-1, 0, 1):
            row = qtable.rows[CompositeState(lv, b)]
            for a, q in zip(ACTIONS, row):
                lines.append(f"{lv},{b},{a},{q:.17g}")
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def load_qtable(path, b_levels=2):
    """Read a table written by save_qtable; malformed or incomplete files
    raise ValueError naming the offending line."""
    table = QTable(b_levels)
    filled = set()
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != _CSV_HEADER:
        raise ValueError(f"{path}: line 1: expected header {_CSV_HEADER!r}")
    for ln, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise ValueError(f"{path}: line {ln}: expected 4 fields, got {len(parts)}")
        try:
            lv = int(parts[0])
            b = int(parts[1])
            a = int(parts[2])
            q = float(parts[3])
        except ValueError:
            raise ValueError(f"{path}: line {ln}: malformed entry {line!r}") from None
        state = CompositeState(lv, b)
        if state not in table.rows:
            raise ValueError(f"{path}: line {ln}: state {state} outside the grid")
        if a not in ACTIONS:
            raise ValueError(f"{path}: line {ln}: action {a} outside {ACTIONS}")
        key = (lv, b, a)
        if key in filled:
            raise ValueError(f"{path}: line {ln}: duplicate entry for {key}")
        filled.add(key)
        table.rows[state][a + 2] = q
    expected = table.n_entries
    if len(filled) != expected:
        raise ValueError(f"{path}: expected {expected} entries, found {len(filled)}")
    return table
