"""Time-efficiency aware black-box optimization: BO, a self-adaptive EA and the BO-to-EA hybrid."""

from .bea import BEAConfig, GainAwareState, Strategy, TransferStrategy, run_bea
from .bench import BenchmarkFunction
from .bo import BOConfig, run_bo
from .core import GainSeries, IterationRecord, SearchSpace, Trace, gain_series, timestamps
from .ea import EAConfig, Individual, run_ea

__version__ = "0.1.0"

__all__ = [
    "BEAConfig",
    "BOConfig",
    "BenchmarkFunction",
    "EAConfig",
    "GainAwareState",
    "GainSeries",
    "Individual",
    "IterationRecord",
    "SearchSpace",
    "Strategy",
    "Trace",
    "TransferStrategy",
    "gain_series",
    "run_bea",
    "run_bo",
    "run_ea",
    "timestamps",
]
