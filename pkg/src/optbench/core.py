"""Search-space, trace and time-efficiency primitives.

Every optimizer in the package produces a :class:`Trace`. Evaluation time is
never measured; it is a simulation parameter ``t_e`` that is attached when a
trace is analysed, so the same run can be looked at under several evaluation
cost scenarios.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

DEFAULT_WINDOW = 10
TRACE_HEADER = ("iter", "f", "f_best", "overhead_s")


def fmt_float(value: float) -> str:
    """Render a float with 9 significant digits (the CSV convention)."""
    return format(float(value), ".9g")


@dataclass(frozen=True)
class SearchSpace:
    """Axis-aligned box ``[lower_j, upper_j]``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ValueError("lower and upper must be 1-d vectors of equal length")
        if lower.size < 1:
            raise ValueError("search space needs at least one dimension")
        if not np.all(lower < upper):
            raise ValueError("lower bound must be strictly below upper bound")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def box(cls, low: float, high: float, dims: int) -> "SearchSpace":
        return cls(np.full(dims, float(low)), np.full(dims, float(high)))

    @property
    def dims(self) -> int:
        return int(self.lower.size)

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, x: np.ndarray) -> bool:
        x = np.asarray(x, dtype=float)
        return x.shape == self.lower.shape and bool(
            np.all(x >= self.lower) and np.all(x <= self.upper)
        )

    def to_unit(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.lower) / self.width

    def from_unit(self, u: np.ndarray) -> np.ndarray:
        return self.lower + np.asarray(u, dtype=float) * self.width

    def sample(self, rng: np.random.Generator, n: int | None = None) -> np.ndarray:
        shape = (self.dims,) if n is None else (n, self.dims)
        return self.from_unit(rng.random(shape))

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)


@dataclass(frozen=True)
class IterationRecord:
    index: int
    x: np.ndarray
    f: float
    overhead: float
    eval_time: float = 0.0
    stage: str = ""
    sigma2: float | None = None

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError("iteration indices start at 1")
        if not self.overhead >= 0.0:
            raise ValueError(f"overhead time must be nonnegative, got {self.overhead}")
        x = np.array(self.x, dtype=float)
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "f", float(self.f))
        object.__setattr__(self, "overhead", float(self.overhead))


@dataclass(frozen=True)
class Trace:
    """Ordered per-iteration records of one optimizer run."""

    records: tuple[IterationRecord, ...]
    seed: int = 0
    algorithm: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        records = tuple(self.records)
        for pos, rec in enumerate(records, start=1):
            if rec.index != pos:
                raise ValueError(
                    f"record indices must be contiguous from 1; position {pos} has index {rec.index}"
                )
        object.__setattr__(self, "records", records)

    @classmethod
    def from_values(
        cls,
        f: Sequence[float],
        overheads: Sequence[float] | None = None,
        xs: Sequence[Sequence[float]] | None = None,
        *,
        seed: int = 0,
        algorithm: str = "",
    ) -> "Trace":
        n = len(f)
        if overheads is None:
            overheads = [0.0] * n
        if xs is None:
            xs = [[0.0]] * n
        if len(overheads) != n or len(xs) != n:
            raise ValueError("f, overheads and xs must have equal length")
        recs = tuple(
            IterationRecord(i + 1, xs[i], f[i], overheads[i]) for i in range(n)
        )
        return cls(recs, seed=seed, algorithm=algorithm)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def f(self) -> np.ndarray:
        return np.array([r.f for r in self.records], dtype=float)

    @property
    def overheads(self) -> np.ndarray:
        return np.array([r.overhead for r in self.records], dtype=float)

    @property
    def xs(self) -> np.ndarray:
        return np.array([r.x for r in self.records], dtype=float)

    @property
    def stages(self) -> list[str]:
        return [r.stage for r in self.records]

    def best_curve(self) -> np.ndarray:
        """Running maximum ``f'_1..f'_N``."""
        if not self.records:
            return np.empty(0)
        return np.maximum.accumulate(self.f)

    def head(self, n: int) -> "Trace":
        return Trace(self.records[:n], seed=self.seed, algorithm=self.algorithm, meta=dict(self.meta))


@dataclass(frozen=True)
class GainEntry:
    i: int
    gain: float
    cost: float
    efficiency: float


@dataclass(frozen=True)
class GainSeries:
    window: int
    entries: tuple[GainEntry, ...]

    @property
    def iterations(self) -> np.ndarray:
        return np.array([e.i for e in self.entries], dtype=int)

    @property
    def efficiencies(self) -> np.ndarray:
        return np.array([e.efficiency for e in self.entries], dtype=float)

    @property
    def gains(self) -> np.ndarray:
        return np.array([e.gain for e in self.entries], dtype=float)

    @property
    def costs(self) -> np.ndarray:
        return np.array([e.cost for e in self.entries], dtype=float)

    def __len__(self) -> int:
        return len(self.entries)


def _check_index(trace: Trace, i: int) -> None:
    if not 1 <= i <= len(trace):
        raise IndexError(f"iteration {i} outside 1..{len(trace)}")


def _check_interval(trace: Trace, k: int, i: int) -> None:
    if k >= i:
        raise ValueError(f"interval needs k < i, got k={k}, i={i}")
    _check_index(trace, k)
    _check_index(trace, i)


def best_so_far(trace: Trace, i: int) -> float:
    _check_index(trace, i)
    return max(r.f for r in trace.records[:i])


def gain(trace: Trace, k: int, i: int) -> float:
    """Increase of the best-so-far value from iteration ``k`` to ``i``."""
    _check_interval(trace, k, i)
    return best_so_far(trace, i) - best_so_far(trace, k)


def interval_cost(trace: Trace, k: int, i: int, t_e: float) -> float:
    """Computation time spent on iterations ``k+1..i``, i.e. ``t_i - t_k``."""
    if t_e < 0:
        raise ValueError("evaluation time must be nonnegative")
    _check_interval(trace, k, i)
    return math.fsum(r.overhead + t_e for r in trace.records[k:i])


def time_efficiency(trace: Trace, k: int, i: int, t_e: float) -> float:
    cost = interval_cost(trace, k, i, t_e)
    if cost <= 0.0:
        raise ZeroDivisionError(f"zero computation time between iterations {k} and {i}")
    return gain(trace, k, i) / cost


def timestamps(trace: Trace, t_e: float) -> np.ndarray:
    """Cumulative computation time ``t_1..t_N`` (``t_0 = 0`` is implicit)."""
    if t_e < 0:
        raise ValueError("evaluation time must be nonnegative")
    return np.cumsum(trace.overheads + t_e) if len(trace) else np.empty(0)


def gain_series(trace: Trace, window: int = DEFAULT_WINDOW, t_e: float = 1.0) -> GainSeries:
    """Windowed gains, costs and gain per second for ``i = w+1..N``, ``k = i - w``."""
    if window < 1:
        raise ValueError("window must be a positive integer")
    n = len(trace)
    if n <= window:
        raise ValueError(f"trace of length {n} too short for window {window}")
    if t_e < 0:
        raise ValueError("evaluation time must be nonnegative")
    best = trace.best_curve()
    stamps = timestamps(trace, t_e)
    entries = []
    for i in range(window + 1, n + 1):
        k = i - window
        delta = float(best[i - 1] - best[k - 1])
        cost = float(stamps[i - 1] - stamps[k - 1])
        if cost <= 0.0:
            raise ZeroDivisionError(f"zero computation time between iterations {k} and {i}")
        entries.append(GainEntry(i, delta, cost, delta / cost))
    return GainSeries(window, tuple(entries))


def mean_gain_series(series: Iterable[GainSeries]) -> GainSeries:
    """Average several gain series entry-wise (they must share window and range)."""
    series = list(series)
    if not series:
        raise ValueError("need at least one gain series")
    ref = series[0]
    for s in series[1:]:
        if s.window != ref.window or not np.array_equal(s.iterations, ref.iterations):
            raise ValueError("gain series differ in window or iteration range")
    gains = np.mean([s.gains for s in series], axis=0)
    costs = np.mean([s.costs for s in series], axis=0)
    effs = np.mean([s.efficiencies for s in series], axis=0)
    entries = tuple(
        GainEntry(int(i), float(g), float(c), float(e))
        for i, g, c, e in zip(ref.iterations, gains, costs, effs)
    )
    return GainSeries(ref.window, entries)


def write_trace_csv(trace: Trace, path: str | Path) -> Path:
    path = Path(path)
    best = trace.best_curve()
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(TRACE_HEADER)
            for rec, fb in zip(trace.records, best):
                writer.writerow([rec.index, fmt_float(rec.f), fmt_float(fb), fmt_float(rec.overhead)])
    except OSError as exc:
        raise OSError(f"cannot write trace file {path}: {exc}") from exc
    return path


def read_trace_csv(path: str | Path, *, seed: int = 0, algorithm: str = "") -> Trace:
    """Load a trace written by :func:`write_trace_csv`.

    Solutions are not part of the CSV schema, so records come back with an
    empty ``x``.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != TRACE_HEADER:
            raise ValueError(f"{path}: unexpected trace header {header}")
        records = [
            IterationRecord(int(row[0]), np.empty(0), float(row[1]), float(row[3]))
            for row in reader
            if row
        ]
    return Trace(tuple(records), seed=seed, algorithm=algorithm)
