"""Griewank, Rastrigin and (shifted) Schwefel test functions.

All three are minimisation problems with the global optimum 0 at the origin.
The optimizers in this package maximise, so callers go through
:meth:`BenchmarkFunction.objective`, which negates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SearchSpace

SCHWEFEL_SHIFT = 420.9687
SCHWEFEL_OFFSET = 418.9829

FUNCTIONS = ("griewank", "rastrigin", "schwefel")

_BOUNDS = {
    "griewank": (-600.0, 600.0),
    "rastrigin": (-5.12, 5.12),
    "schwefel": (-500.0 - SCHWEFEL_SHIFT, 500.0 - SCHWEFEL_SHIFT),
}


def griewank(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    j = np.arange(1, x.size + 1)
    return float(np.sum(x**2) / 4000.0 - np.prod(np.cos(x / np.sqrt(j))) + 1.0)


def rastrigin(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    return float(10.0 * x.size + np.sum(x**2 - 10.0 * np.cos(2.0 * np.pi * x)))


def schwefel(x: np.ndarray) -> float:
    # shifted so the classic optimizer 420.9687 sits at the origin
    z = np.asarray(x, dtype=float) + SCHWEFEL_SHIFT
    return float(SCHWEFEL_OFFSET * z.size - np.sum(z * np.sin(np.sqrt(np.abs(z)))))


_IMPL = {"griewank": griewank, "rastrigin": rastrigin, "schwefel": schwefel}


@dataclass(frozen=True)
class BenchmarkFunction:
    name: str
    dims: int = 20

    def __post_init__(self) -> None:
        if self.name not in _IMPL:
            raise ValueError(f"unknown benchmark function {self.name!r}; choose from {FUNCTIONS}")
        if self.dims < 1:
            raise ValueError("dims must be >= 1")

    def evaluate(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dims,):
            raise ValueError(f"{self.name} expects a vector of length {self.dims}, got shape {x.shape}")
        return _IMPL[self.name](x)

    def objective(self, x: np.ndarray) -> float:
        """Negated value, for maximizing optimizers."""
        return -self.evaluate(x)

    def domain(self) -> SearchSpace:
        low, high = _BOUNDS[self.name]
        return SearchSpace.box(low, high, self.dims)


def evaluate(fn: BenchmarkFunction, x: np.ndarray) -> float:
    return fn.evaluate(x)


def domain(fn: BenchmarkFunction) -> SearchSpace:
    return fn.domain()
