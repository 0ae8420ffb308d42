"""Bayesian optimization with a Matérn 5/2 GP and the GP-UCB acquisition."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import gp
from .core import IterationRecord, SearchSpace, Trace

Objective = Callable[[np.ndarray], float]
Timer = Callable[[], float]


@dataclass(frozen=True)
class BOConfig:
    theta: float = 0.1
    gamma: float = 0.1
    nu: float = 1.0
    n_init: int = 10
    acq_samples: int = 1000
    acq_refine_steps: int = 100
    refine_step: float = 0.05
    jitter: float = gp.DEFAULT_JITTER
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        if self.n_init < 1:
            raise ValueError("n_init must be >= 1")
        if self.acq_samples < 1 or self.acq_refine_steps < 0:
            raise ValueError("acq_samples must be >= 1 and acq_refine_steps >= 0")
        if not self.theta > 0:
            raise ValueError("theta must be positive")


def exploration_weight(t: int, d: int, gamma: float) -> float:
    """``tau_t = 2 log(t^(d/2+2) pi^2 / (3 gamma))``, computed in log space."""
    if t < 1:
        raise ValueError("t counts evaluations and must be >= 1")
    tau = 2.0 * ((d / 2.0 + 2.0) * math.log(t) + math.log(math.pi**2 / (3.0 * gamma)))
    if tau <= 0:
        raise ValueError(f"non-positive exploration weight tau={tau}")
    return tau


def ucb(mu, sigma, t: int, d: int, gamma: float, nu: float = 1.0):
    """GP-UCB value ``mu + sqrt(nu * tau_t) * sigma``; broadcasts over arrays."""
    if np.any(np.asarray(sigma) < 0):
        raise ValueError("sigma must be nonnegative")
    return mu + math.sqrt(nu * exploration_weight(t, d, gamma)) * sigma


def propose(model: gp.GPModel, cfg: BOConfig, t: int, rng: np.random.Generator) -> np.ndarray:
    """Maximize GP-UCB over the unit cube; returns a point in normalized coordinates.

    Random search over ``acq_samples`` uniform candidates, then a (1+1)
    Gaussian hill climb from the winner.
    """
    d = model.dims
    weight = math.sqrt(cfg.nu * exploration_weight(t, d, cfg.gamma))

    def acq(S: np.ndarray) -> np.ndarray:
        mu, var = model.predict(S)
        return mu + weight * np.sqrt(var)

    cand = rng.random((cfg.acq_samples, d))
    values = acq(cand)
    best = int(np.argmax(values))
    x, fx = cand[best], float(values[best])

    step = cfg.refine_step
    failures = 0
    for _ in range(cfg.acq_refine_steps):
        y = np.clip(x + step * rng.standard_normal(d), 0.0, 1.0)
        mu, var = model.predict_point(y)
        fy = mu + weight * math.sqrt(var)
        if fy > fx:
            x, fx = y, fy
            failures = 0
        else:
            failures += 1
            if failures == 10:
                step *= 0.5
                failures = 0
    return x


def _standardize(f: np.ndarray) -> np.ndarray:
    sd = f.std()
    return (f - f.mean()) / (sd if sd > 0 else 1.0)


def fit_surrogate(U: np.ndarray, f: np.ndarray, cfg: BOConfig) -> gp.GPModel:
    """Fit the GP on normalized inputs and standardized targets, growing jitter on failure."""
    jitter = cfg.jitter
    y = _standardize(np.asarray(f, dtype=float))
    for _ in range(6):
        try:
            return gp.fit(U, y, gp.KernelParams(cfg.theta), jitter)
        except gp.NotPositiveDefiniteError:
            jitter *= 10.0
    return gp.fit(U, y, gp.KernelParams(cfg.theta), jitter)


def _evaluate(objective: Objective, x: np.ndarray, index: int) -> float:
    try:
        return float(objective(x))
    except Exception as exc:
        raise RuntimeError(f"objective evaluation failed at iteration {index}: {exc}") from exc


def bo_steps(
    objective: Objective,
    space: SearchSpace,
    cfg: BOConfig,
    iters: int,
    rng: np.random.Generator,
    timer: Timer = time.perf_counter,
) -> list[IterationRecord]:
    """Records for ``iters`` BO iterations (random initial design first)."""
    if iters < cfg.n_init:
        raise ValueError(f"iters ({iters}) must be >= n_init ({cfg.n_init})")
    records: list[IterationRecord] = []
    U: list[np.ndarray] = []
    fs: list[float] = []
    for i in range(1, iters + 1):
        start = timer()
        if i <= cfg.n_init:
            u = rng.random(space.dims)
        else:
            model = fit_surrogate(np.array(U), np.array(fs), cfg)
            u = propose(model, cfg, len(fs), rng)
        x = space.from_unit(u)
        overhead = timer() - start
        fx = _evaluate(objective, x, i)
        U.append(u)
        fs.append(fx)
        records.append(IterationRecord(i, x, fx, max(overhead, 0.0), stage="bo"))
    return records


def run_bo(
    objective: Objective,
    space: SearchSpace,
    cfg: BOConfig,
    iters: int,
    timer: Timer = time.perf_counter,
) -> Trace:
    rng = np.random.default_rng(cfg.seed)
    records = bo_steps(objective, space, cfg, iters, rng, timer)
    return Trace(
        tuple(records),
        seed=cfg.seed,
        algorithm="bo",
        meta={"gamma": cfg.gamma, "theta": cfg.theta, "nu": cfg.nu, "n_init": cfg.n_init},
    )
