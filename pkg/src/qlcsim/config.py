"""Simulation configuration.

All knobs live in one flat SimConfig dataclass. Values come from, in order
of increasing precedence: built-in defaults, a flat `key = value` config
file, environment variables named QLCSIM_<KEY>, and explicit keyword
overrides. Unknown file keys are rejected rather than ignored.
"""

import os
from dataclasses import dataclass, fields

from .agent import AgentConfig
from .baselines import ThrConfig
from .traffic import LoadProfile

ENV_PREFIX = "QLCSIM_"
ALGORITHMS = ("noaut", "thr", "qlc", "mio")


@dataclass(frozen=True)
class SimConfig:
    # admission / scaling thresholds
    ac_thr: float = 0.9
    sc_high: float = 0.95
    sc_low: float = 0.15
    u_t: float = 0.5
    # resources
    n_cpu_init: int = 1
    v_pool: int = 20
    cpu_capacity: float = 10.0
    n_nfs: int = 2
    # episode structure
    episode_duration: float = 1e5
    episodes: int = 20
    cl_interval: float = 10.0
    meas_window: float = 1000.0
    # traffic
    population: int = 100000
    lambda_ue: float = 2e-5
    lambda_min: float = 5e-7
    lambda_max: float = 2e-5
    service_mean: float = 60.0
    service_sd: float = 5.0
    load_mean: float = 1.0
    load_sd: float = 0.02
    # learning
    alpha: float = 0.5
    gamma: float = 0.9
    epsilon_init: float = 0.9
    epsilon_final: float = 0.0001
    b_levels: int = 2
    reward_k: float = 10.0
    reward_delta: float = 0.05
    balance_deadband: float = 0.01
    # baselines
    thr_step: int = 1
    # run selection
    scenario: int = 1
    algorithm: str = "qlc"
    seed: int = 0

    def validate(self):
        """Raise ValueError on the first inconsistent setting."""
        checks = [
            (0 < self.ac_thr <= 1, "ac_thr must be in (0, 1]"),
            (0 < self.sc_low < self.sc_high <= 1, "need 0 < sc_low < sc_high <= 1"),
            (self.u_t > 0, "u_t must be positive"),
            (self.n_cpu_init >= 1, "n_cpu_init must be at least 1"),
            (self.n_nfs >= 1, "n_nfs must be at least 1"),
            (self.v_pool >= self.n_nfs * self.n_cpu_init,
             "v_pool cannot cover the initial allocations"),
            (self.cpu_capacity > 0, "cpu_capacity must be positive"),
            (self.episode_duration > 0, "episode_duration must be positive"),
            (self.episodes >= 1, "episodes must be at least 1"),
            (self.cl_interval > 0, "cl_interval must be positive"),
            (self.meas_window > 0, "meas_window must be positive"),
            (self.population >= 1, "population must be at least 1"),
            (self.lambda_ue > 0, "lambda_ue must be positive"),
            (0 < self.lambda_min <= self.lambda_max,
             "need 0 < lambda_min <= lambda_max"),
            (self.service_mean > 0 and self.service_sd >= 0,
             "service time moments out of range"),
            (self.load_mean > 0 and self.load_sd >= 0, "load moments out of range"),
            (0 < self.alpha <= 1, "alpha must be in (0, 1]"),
            (0 <= self.gamma < 1, "gamma must be in [0, 1)"),
            (0 < self.epsilon_final <= self.epsilon_init <= 1,
             "need 0 < epsilon_final <= epsilon_init <= 1"),
            (self.b_levels >= 1, "b_levels must be at least 1"),
            (self.reward_k > 0, "reward_k must be positive"),
            (self.reward_delta > 0, "reward_delta must be positive"),
            (self.balance_deadband >= 0, "balance_deadband must be non-negative"),
            (self.thr_step >= 1, "thr_step must be at least 1"),
            (self.scenario in (1, 2), "scenario must be 1 or 2"),
            (self.algorithm in ALGORITHMS, f"algorithm must be one of {ALGORITHMS}"),
            (self.algorithm != "qlc" or self.n_nfs >= 2,
             "qlc needs at least 2 NFs to cooperate"),
        ]
        for ok, message in checks:
            if not ok:
                raise ValueError(message)

    # -- derived views ----------------------------------------------------

    def profile(self):
        """LoadProfile for the configured scenario."""
        if self.scenario == 1:
            return LoadProfile.constant(self.population, self.lambda_ue,
                                        self.episode_duration)
        return LoadProfile.diurnal(self.population, self.lambda_min, self.lambda_max,
                                   self.episode_duration)

    def agent_config(self):
        return AgentConfig(alpha=self.alpha, gamma=self.gamma,
                           epsilon_init=self.epsilon_init,
                           epsilon_final=self.epsilon_final,
                           b_levels=self.b_levels, reward_k=self.reward_k,
                           reward_delta=self.reward_delta, u_target=self.u_t,
                           balance_deadband=self.balance_deadband)

    def thr_config(self):
        return ThrConfig(sc_high=self.sc_high, sc_low=self.sc_low, step=self.thr_step)


_FIELD_TYPES = {f.name: f.type for f in fields(SimConfig)}


def _parse_value(key, raw, where):
    kind = _FIELD_TYPES[key]
    raw = raw.strip()
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        return raw
    except ValueError:
        raise ValueError(f"{where}: cannot parse {key} value {raw!r} as {kind.__name__}") from None


def parse_config_file(path):
    """Read a flat `key = value` file; '#' starts a comment anywhere."""
    values = {}
    with open(path) as fh:
        for ln, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}: line {ln}: expected 'key = value'")
            key, raw = line.split("=", 1)
            key = key.strip()
            if key not in _FIELD_TYPES:
                raise ValueError(f"{path}: line {ln}: unknown config key {key!r}")
            values[key] = _parse_value(key, raw, f"{path}: line {ln}")
    return values


def env_overrides(env=None):
    """Config values taken from QLCSIM_<KEY> environment variables."""
    env = os.environ if env is None else env
    values = {}
    for key in _FIELD_TYPES:
        raw = env.get(ENV_PREFIX + key.upper())
        if raw is not None:
            values[key] = _parse_value(key, raw, f"${ENV_PREFIX}{key.upper()}")
    return values


def load_config(path=None, env=None, **overrides):
    """Build a validated SimConfig from file, environment and overrides."""
    values = {}
    if path is not None:
        values.update(parse_config_file(path))
    values.update(env_overrides(env))
    for key in overrides:
        if key not in _FIELD_TYPES:
            raise ValueError(f"unknown config key {key!r}")
    values.update(overrides)
    cfg = SimConfig(**values)
    cfg.validate()
    return cfg
