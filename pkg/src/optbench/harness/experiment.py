"""Run BO / EA / BEA over benchmark functions and seeds, and analyse the traces."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from ..bea import BEAConfig, TransferStrategy, run_bea
from ..bench import FUNCTIONS, BenchmarkFunction
from ..bo import BOConfig, run_bo
from ..core import DEFAULT_WINDOW, GainSeries, Trace, gain_series, mean_gain_series, timestamps
from ..ea import EAConfig, run_ea

log = logging.getLogger(__name__)

DEFAULT_THETA = {"griewank": 0.1, "rastrigin": 0.1, "schwefel": 0.5}
BASE_ALGORITHMS = ("bo", "ea", "bea")
STRATEGIES = ("s1", "s2", "s3", "s4")


class TickClock:
    """Deterministic stand-in for ``time.perf_counter``: every call advances by ``tick``."""

    def __init__(self, tick: float = 1e-3) -> None:
        self.tick = tick
        self.calls = 0

    def __call__(self) -> float:
        self.calls += 1
        return self.calls * self.tick


def parse_algorithm(label: str) -> tuple[str, str | None]:
    """``"bea:s1"`` -> ``("bea", "s1")``; plain names carry no strategy."""
    base, _, strategy = label.partition(":")
    if base not in BASE_ALGORITHMS:
        raise ValueError(f"unknown algorithm {label!r}; choose from {BASE_ALGORITHMS}")
    if strategy and (base != "bea" or strategy not in STRATEGIES):
        raise ValueError(f"invalid strategy suffix in {label!r}")
    return base, strategy or None


@dataclass(frozen=True)
class ExperimentSpec:
    functions: tuple[str, ...]
    algorithms: tuple[str, ...] = BASE_ALGORITHMS
    eval_times: tuple[float, ...] = (0.1, 1.0, 10.0)
    iters: int = 600
    repetitions: int = 10
    base_seed: int = 0
    dims: int = 20
    gamma: float = 0.1
    theta: float | None = None
    n_init: int = 10
    acq_samples: int = 1000
    acq_refine_steps: int = 100
    pop_size: int = 10
    switch_point: int = 250
    strategy: str = "s4"
    alpha: float = 1.03
    beta: float = 0.99
    top_percent: float = 50.0
    window: int = DEFAULT_WINDOW
    workers: int = 1
    clock: str = "wall"

    def validate(self) -> None:
        for name in self.functions:
            if name not in FUNCTIONS:
                raise ValueError(f"unknown function {name!r}; choose from {FUNCTIONS}")
        if not self.functions or not self.algorithms:
            raise ValueError("need at least one function and one algorithm")
        for label in self.algorithms:
            parse_algorithm(label)
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if any(te < 0 for te in self.eval_times):
            raise ValueError("evaluation times must be nonnegative")
        if self.iters < max(self.n_init, self.pop_size):
            raise ValueError("iters must cover the initial design / population")
        if any(parse_algorithm(a)[0] == "bea" for a in self.algorithms) and self.iters <= self.switch_point:
            raise ValueError("BEA needs iters > switch point")
        if self.clock not in ("wall", "tick"):
            raise ValueError("clock must be 'wall' or 'tick'")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def seeds(self) -> list[int]:
        return [self.base_seed + r for r in range(self.repetitions)]

    def bo_config(self, function: str, seed: int) -> BOConfig:
        theta = self.theta if self.theta is not None else DEFAULT_THETA[function]
        return BOConfig(
            theta=theta,
            gamma=self.gamma,
            n_init=self.n_init,
            acq_samples=self.acq_samples,
            acq_refine_steps=self.acq_refine_steps,
            seed=seed,
        )

    def ea_config(self, seed: int) -> EAConfig:
        return EAConfig(pop_size=self.pop_size, seed=seed)

    def bea_config(self, function: str, seed: int, strategy: str | None) -> BEAConfig:
        base = BEAConfig()
        return BEAConfig(
            bo=self.bo_config(function, seed),
            ea=replace(base.ea, pop_size=self.pop_size, seed=seed),
            switch_point=self.switch_point,
            alpha=self.alpha,
            beta=self.beta,
            window=self.window,
            strategy=TransferStrategy(strategy or self.strategy, self.top_percent),
            seed=seed,
        )

    def parameters(self) -> dict:
        """Flat description written next to the results."""
        out = {}
        for name in self.__dataclass_fields__:
            value = getattr(self, name)
            out[name] = list(value) if isinstance(value, tuple) else value
        return out


@dataclass
class RunResult:
    function: str
    algorithm: str
    seed: int
    trace: Trace | None
    switch_point: int | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.trace is not None and self.error is None

    def timestamps(self, t_e: float) -> np.ndarray:
        return timestamps(self.trace, t_e)

    def best_curve(self) -> np.ndarray:
        return self.trace.best_curve()

    def gain_series(self, t_e: float, window: int = DEFAULT_WINDOW) -> GainSeries:
        return gain_series(self.trace, window, t_e)

    def final_best(self) -> float:
        return float(self.best_curve()[-1])


def _timer(spec: ExperimentSpec) -> Callable[[], float]:
    return TickClock() if spec.clock == "tick" else time.perf_counter


def _run_group(spec: ExperimentSpec, function: str, seed: int) -> list[RunResult]:
    """All algorithms for one (function, seed); BEA reuses the BO run as its first stage."""
    fn = BenchmarkFunction(function, spec.dims)
    space = fn.domain()
    results = []
    bo_trace = None
    order = sorted(spec.algorithms, key=lambda a: parse_algorithm(a)[0] != "bo")
    for label in order:
        base, strategy = parse_algorithm(label)
        switch = None
        try:
            if base == "bo":
                trace = run_bo(fn.objective, space, spec.bo_config(function, seed), spec.iters, timer=_timer(spec))
                bo_trace = trace
            elif base == "ea":
                trace = run_ea(fn.objective, space, spec.ea_config(seed), spec.iters, timer=_timer(spec))
            else:
                cfg = spec.bea_config(function, seed, strategy)
                switch = cfg.switch_point
                if bo_trace is None:
                    bo_trace = run_bo(
                        fn.objective, space, spec.bo_config(function, seed), cfg.switch_point, timer=_timer(spec)
                    )
                trace = run_bea(fn.objective, space, cfg, spec.iters, timer=_timer(spec), bo_prefix=bo_trace)
            results.append(RunResult(function, label, seed, trace, switch))
        except Exception as exc:  # keep going; the failure is reported with its coordinates
            log.error("run failed: function=%s algorithm=%s seed=%s: %s", function, label, seed, exc)
            results.append(RunResult(function, label, seed, None, switch, error=f"{type(exc).__name__}: {exc}"))
    rank = {label: pos for pos, label in enumerate(spec.algorithms)}
    return sorted(results, key=lambda r: rank[r.algorithm])


def run_experiment(spec: ExperimentSpec) -> list[RunResult]:
    """One result per (function, algorithm, seed), ordered function > seed > algorithm."""
    spec.validate()
    groups = [(f, s) for f in spec.functions for s in spec.seeds()]
    if spec.workers > 1 and len(groups) > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            chunks = list(pool.map(_run_group, [spec] * len(groups), *zip(*groups)))
    else:
        chunks = [_run_group(spec, f, s) for f, s in groups]
    return [r for chunk in chunks for r in chunk]


def select(results: Iterable[RunResult], *, function: str | None = None, algorithm: str | None = None) -> list[RunResult]:
    return [
        r
        for r in results
        if r.ok and (function is None or r.function == function) and (algorithm is None or r.algorithm == algorithm)
    ]


def mean_series(results: Sequence[RunResult], t_e: float, window: int = DEFAULT_WINDOW) -> GainSeries:
    """Seed-averaged gain-per-second series."""
    return mean_gain_series(r.gain_series(t_e, window) for r in results)


def detect_switch_point(bo_series: GainSeries, ea_series: GainSeries, persistence: int = 3) -> int | None:
    """First iteration from which EA's time efficiency beats BO's for ``persistence`` entries."""
    if persistence < 1:
        raise ValueError("persistence must be >= 1")
    if bo_series.window != ea_series.window or not np.array_equal(bo_series.iterations, ea_series.iterations):
        raise ValueError("gain series must share window and iteration range")
    ahead = ea_series.efficiencies > bo_series.efficiencies
    run = 0
    for pos, flag in enumerate(ahead):
        run = run + 1 if flag else 0
        if run == persistence:
            return int(bo_series.iterations[pos - persistence + 1])
    return None


def switch_point_for(
    results: Sequence[RunResult],
    function: str,
    t_e: float,
    window: int = DEFAULT_WINDOW,
    persistence: int = 3,
    bo_label: str = "bo",
    ea_label: str = "ea",
) -> int | None:
    bo_runs = select(results, function=function, algorithm=bo_label)
    ea_runs = select(results, function=function, algorithm=ea_label)
    if not bo_runs or not ea_runs:
        raise ValueError(f"need both {bo_label} and {ea_label} runs for {function}")
    n = min(len(r.trace) for r in bo_runs + ea_runs)
    bo = mean_gain_series(gain_series(r.trace.head(n), window, t_e) for r in bo_runs)
    ea = mean_gain_series(gain_series(r.trace.head(n), window, t_e) for r in ea_runs)
    return detect_switch_point(bo, ea, persistence)
