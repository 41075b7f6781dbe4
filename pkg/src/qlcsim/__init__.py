"""qlcsim: discrete-event simulation of cooperative Q-learning CPU
auto-scaling for network slices sharing a finite pool."""

from .agent import (ACTIONS, AgentConfig, AgentObservation, CompositeState, QTable,
                    encode_state, epsilon_at, load_qtable, reward, save_qtable,
                    select_action, update_q)
from .baselines import (MioAllocator, MioSolution, ThrConfig, mio_allocate,
                        no_aut_decide, thr_decide)
from .config import ALGORITHMS, SimConfig, load_config
from .harness import (EpisodeResult, EpisodeTotals, SweepRow, ci95, cl_iterations,
                      load_qtables, run_episode, run_experiment, run_sweep,
                      save_qtables, write_sweep_csv)
from .metrics import (MetricsRecord, conflict_density, rei, window_rates,
                      write_conflict_csv, write_metrics_csv)
from .slice_env import (SCALING_DELTAS, ConflictEvent, ScaleCause, ScalingOutcome,
                        ScalingRequest, SliceState)
from .traffic import (LoadProfile, SessionStream, UESession, lambda_at, next_arrival,
                      sample_session)

__version__ = "0.1.0"

__all__ = [
    "ACTIONS", "ALGORITHMS", "AgentConfig", "AgentObservation", "CompositeState",
    "ConflictEvent", "EpisodeResult", "EpisodeTotals", "LoadProfile", "MetricsRecord",
    "MioAllocator", "MioSolution", "QTable", "SCALING_DELTAS", "ScaleCause",
    "ScalingOutcome", "ScalingRequest", "SessionStream", "SimConfig", "SliceState",
    "SweepRow", "ThrConfig", "UESession", "ci95", "cl_iterations", "conflict_density",
    "encode_state", "epsilon_at", "lambda_at", "load_config", "load_qtable",
    "load_qtables", "mio_allocate", "next_arrival", "no_aut_decide", "rei", "reward",
    "run_episode", "run_experiment", "run_sweep", "sample_session", "save_qtable",
    "save_qtables", "select_action", "thr_decide", "update_q", "window_rates",
    "write_conflict_csv", "write_metrics_csv", "write_sweep_csv",
]
