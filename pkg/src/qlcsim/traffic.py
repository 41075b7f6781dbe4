"""UE traffic generation: request arrivals, session durations, per-NF loads.

Two traffic shapes are supported. A "constant" profile loads the slice with
a homogeneous Poisson stream whose aggregate rate is the user population
times a fixed per-user request rate. A "diurnal" profile sweeps the per-user
rate smoothly between a floor and a peak, completing two peaks per episode,
and is sampled by thinning against the peak rate.

Each admitted request becomes a session with a Gaussian duration and one
Gaussian load value per network function, truncated away from zero.
"""

import math
from dataclasses import dataclass

import numpy as np

CONSTANT = "constant"
DIURNAL = "diurnal"

# Truncation floors for the Gaussian session marks. At the default
# mean/sd values a draw below either floor is a ~12-sigma event, so the
# clip exists for safety, not for shaping the distribution.
DURATION_FLOOR = 0.1
LOAD_FLOOR = 0.01

SERVICE_MEAN = 60.0
SERVICE_SD = 5.0
LOAD_MEAN = 1.0
LOAD_SD = 0.02


@dataclass(frozen=True)
class LoadProfile:
    """Aggregate request-arrival model for a population of users.

    `duration` is the episode length in seconds; the diurnal shape is
    periodic in `duration / 2` so every episode sees two peaks.
    """

    kind: str
    population: int
    duration: float
    rate_per_user: float = 0.0
    rate_min: float = 0.0
    rate_max: float = 0.0

    def __post_init__(self):
        if self.kind not in (CONSTANT, DIURNAL):
            raise ValueError(f"unknown load profile kind {self.kind!r}")
        if self.population < 1:
            raise ValueError("population must be at least 1")
        if self.duration <= 0:
            raise ValueError("profile duration must be positive")
        if self.kind == CONSTANT:
            if self.rate_per_user <= 0:
                raise ValueError("constant profile needs rate_per_user > 0")
        else:
            if self.rate_min <= 0 or self.rate_max < self.rate_min:
                raise ValueError("diurnal profile needs 0 < rate_min <= rate_max")

    @classmethod
    def constant(cls, population, rate_per_user, duration):
        return cls(CONSTANT, population, duration, rate_per_user=rate_per_user)

    @classmethod
    def diurnal(cls, population, rate_min, rate_max, duration):
        return cls(DIURNAL, population, duration, rate_min=rate_min, rate_max=rate_max)

    def peak_rate(self):
        """Largest aggregate arrival rate the profile can reach (1/s)."""
        if self.kind == CONSTANT:
            return self.population * self.rate_per_user
        return self.population * self.rate_max


@dataclass(frozen=True)
class UESession:
    """One admitted service request: arrival instant, holding time, and the
    load it places on each network function while active."""

    arrival_time: float
    duration: float
    load_per_nf: tuple

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("session duration must be positive")
        if any(l <= 0 for l in self.load_per_nf):
            raise ValueError("per-NF loads must be positive")


def lambda_at(profile, t):
    """Aggregate arrival rate (1/s) of `profile` at episode time `t`."""
    if t < 0 or t > profile.duration:
        raise ValueError(f"t={t} outside the episode [0, {profile.duration}]")
    if profile.kind == CONSTANT:
        return profile.population * profile.rate_per_user
    s = math.sin(2.0 * math.pi * t / profile.duration)
    return profile.population * (profile.rate_min + (profile.rate_max - profile.rate_min) * s * s)


def next_arrival(profile, t_now, rng):
    """Draw the next arrival instant after `t_now`, or None past episode end.

    Constant profiles draw a single exponential gap. Diurnal profiles use
    thinning: candidates are generated at the peak rate and accepted with
    probability lambda(t)/peak.
    """
    T = profile.duration
    if t_now >= T:
        raise ValueError("t_now must lie inside the episode")
    if profile.kind == CONSTANT:
        t = t_now + rng.expovariate(profile.population * profile.rate_per_user)
        return t if t <= T else None
    peak = profile.peak_rate()
    t = t_now
    while True:
        t += rng.expovariate(peak)
        if t > T:
            return None
        if rng.random() * peak < lambda_at(profile, t):
            return t


def sample_session(t_arrival, n_nfs, rng, mean_duration=SERVICE_MEAN, sd_duration=SERVICE_SD,
                   mean_load=LOAD_MEAN, sd_load=LOAD_SD):
    """Draw the duration and independent per-NF loads for one request."""
    if n_nfs < 1:
        raise ValueError("n_nfs must be at least 1")
    duration = max(rng.gauss(mean_duration, sd_duration), DURATION_FLOOR)
    loads = tuple(max(rng.gauss(mean_load, sd_load), LOAD_FLOOR) for _ in range(n_nfs))
    return UESession(t_arrival, duration, loads)


class SessionStream:
    """Chunked sampler of the arrival/session process for the event loop.

    Draws the same distributions as next_arrival/sample_session but in numpy
    batches, which is far cheaper per event. After each successful refill()
    the buffers hold parallel data for a batch of arrivals:

      times      -- sorted arrival instants (list of float)
      durations  -- session holding times (list of float)
      loads_flat -- per-NF loads, flattened with stride n_nfs

    The stream ends once arrivals would pass the episode duration.
    """

    CHUNK = 8192

    def __init__(self, profile, n_nfs, rng, mean_duration=SERVICE_MEAN, sd_duration=SERVICE_SD,
                 mean_load=LOAD_MEAN, sd_load=LOAD_SD):
        if n_nfs < 1:
            raise ValueError("n_nfs must be at least 1")
        self.profile = profile
        self.n_nfs = n_nfs
        self._rng = rng
        self._marks = (mean_duration, sd_duration, mean_load, sd_load)
        self._t = 0.0
        self._exhausted = False
        self.times = []
        self.durations = []
        self.loads_flat = []

    def refill(self):
        """Replace the buffers with the next batch; False once exhausted."""
        profile = self.profile
        T = profile.duration
        rng = self._rng
        while True:
            if self._exhausted:
                self.times = []
                self.durations = []
                self.loads_flat = []
                return False
            gaps = rng.exponential(1.0 / profile.peak_rate(), self.CHUNK)
            cand = self._t + np.cumsum(gaps)
            cut = int(np.searchsorted(cand, T, side="right"))
            if cut < len(cand):
                self._exhausted = True
            else:
                self._t = float(cand[-1])
            cand = cand[:cut]
            if profile.kind == DIURNAL and cut > 0:
                # thinning acceptance against the peak rate
                s = np.sin((2.0 * math.pi / T) * cand)
                lam = profile.population * (profile.rate_min
                                            + (profile.rate_max - profile.rate_min) * s * s)
                keep = rng.random(cut) * profile.peak_rate() < lam
                cand = cand[keep]
            m = len(cand)
            if m == 0:
                continue
            mean_d, sd_d, mean_l, sd_l = self._marks
            durations = np.maximum(rng.normal(mean_d, sd_d, m), DURATION_FLOOR)
            loads = np.maximum(rng.normal(mean_l, sd_l, m * self.n_nfs), LOAD_FLOOR)
            self.times = cand.tolist()
            self.durations = durations.tolist()
            # tuple so the event loop can slice per-arrival loads without a copy
            self.loads_flat = tuple(loads.tolist())
            return True
