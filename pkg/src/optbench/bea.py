"""Bayesian-Evolutionary Algorithm: BO first, then a gain-aware EA seeded from BO's archive."""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .bo import BOConfig, bo_steps
from .core import DEFAULT_WINDOW, IterationRecord, SearchSpace, Trace
from .ea import (
    EAConfig,
    Individual,
    _Loop,
    _spread_overhead,
    make_offspring,
    mutate_step_sizes,
    new_individual,
    survivors,
)
from .kmeans import kmeans

Objective = Callable[[np.ndarray], float]
Timer = Callable[[], float]

SIGMA2_MIN = 1e-3
SIGMA2_MAX = 1e3
MAX_RESAMPLES = 100


class Strategy(str, enum.Enum):
    S1 = "s1"  # last p solutions
    S2 = "s2"  # best p solutions
    S3 = "s3"  # best of each of p k-means clusters
    S4 = "s4"  # as S3, restricted to the top d% solutions


@dataclass(frozen=True)
class TransferStrategy:
    tag: Strategy = Strategy.S4
    d_percent: float = 50.0

    def __post_init__(self) -> None:
        if not isinstance(self.tag, Strategy):
            object.__setattr__(self, "tag", Strategy(str(self.tag).lower()))
        if not 0.0 < self.d_percent <= 100.0:
            raise ValueError(f"d_percent must lie in (0, 100], got {self.d_percent}")


@dataclass(frozen=True)
class BEAConfig:
    bo: BOConfig = field(default_factory=BOConfig)
    # exploitation-leaning EA: low crossover and small initial steps around BO's solutions
    ea: EAConfig = field(default_factory=lambda: EAConfig(crossover_rate=0.1, sigma_init_frac=0.01))
    switch_point: int = 250
    alpha: float = 1.03
    beta: float = 0.99
    window: int = DEFAULT_WINDOW
    strategy: TransferStrategy = field(default_factory=TransferStrategy)
    seed: int = 0
    sigma2_per_generation: bool = True

    def __post_init__(self) -> None:
        if not self.alpha > 1.0 or not self.beta < 1.0:
            raise ValueError("need alpha > 1 and beta < 1")
        if not self.beta > 0.0:
            raise ValueError("beta must be positive")
        if self.switch_point < self.bo.n_init:
            raise ValueError("switch point must not precede the initial BO design")
        if self.window < 1:
            raise ValueError("window must be >= 1")


@dataclass(frozen=True)
class GainAwareState:
    sigma2: float = 1.0

    def __post_init__(self) -> None:
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")


def update_sigma2(
    state: GainAwareState,
    delta: float,
    alpha: float,
    beta: float,
    bounds: tuple[float, float] = (SIGMA2_MIN, SIGMA2_MAX),
) -> GainAwareState:
    """Grow the global step scale on a zero-gain window, shrink it otherwise."""
    if delta < 0:
        raise ValueError("gain cannot be negative")
    factor = alpha if delta == 0 else beta
    lo, hi = bounds
    return GainAwareState(min(max(state.sigma2 * factor, lo), hi))


def gain_aware_mutate(
    ind: Individual,
    state: GainAwareState,
    cfg: EAConfig,
    space: SearchSpace,
    rng,
) -> Individual:
    """Self-adaptive mutation scaled by ``state.sigma2``.

    Coordinates that leave the box are redrawn around the violated bound with
    the coordinate's own step size until they land strictly inside.
    """
    tau, tau_prime = cfg.learning_rates(ind.x.size)
    eps0 = cfg.epsilon0(space)
    sigmas = mutate_step_sizes(ind.sigmas, tau, tau_prime, eps0, rng)
    x = ind.x + sigmas * rng.standard_normal(ind.x.size) * state.sigma2
    lower, upper = space.lower, space.upper
    for j in np.flatnonzero((x <= lower) | (x >= upper)):
        x[j] = _resample(float(x[j]), lower[j], upper[j], sigmas[j], eps0[j], rng)
    return Individual(x, sigmas)


def _resample(v: float, lo: float, hi: float, sigma: float, eps0: float, rng) -> float:
    for _ in range(MAX_RESAMPLES):
        if v <= lo:
            v = lo + sigma * float(rng.standard_normal())
        elif v >= hi:
            v = hi + sigma * float(rng.standard_normal())
        else:
            return v
    if lo < v < hi:
        return v
    # give up on the loop: pull inside by eps0, but never past the midpoint
    nudge = min(eps0, 0.5 * (hi - lo))
    return lo + nudge if v <= lo else hi - nudge


def _top_indices(f: np.ndarray, count: int) -> np.ndarray:
    # stable sort on -f keeps the earlier iteration first among ties
    return np.argsort(-f, kind="stable")[:count]


def _best_per_cluster(idx: np.ndarray, labels: np.ndarray, f: np.ndarray, k: int) -> list[int]:
    chosen = []
    for c in range(k):
        members = idx[labels == c]
        # earliest index wins ties
        chosen.append(int(members[np.argmax(f[members])]))
    return chosen


def select_transfer_population(
    archive: Trace,
    strategy: TransferStrategy,
    p: int,
    rng: np.random.Generator,
    space: SearchSpace | None = None,
    ea_cfg: EAConfig | None = None,
) -> list[Individual]:
    """Pick ``p`` archive solutions to seed the EA.

    Returned individuals keep their archive fitness and receive fresh step
    sizes (``ea_cfg.sigma_init``); without a space, step sizes default to 0.1.
    """
    n = len(archive)
    if n < p:
        raise ValueError(f"archive of {n} records cannot supply {p} individuals")
    X = archive.xs
    f = archive.f
    tag = strategy.tag
    if tag is Strategy.S1:
        chosen = list(range(n - p, n))
    elif tag is Strategy.S2:
        chosen = [int(i) for i in _top_indices(f, p)]
    else:
        if tag is Strategy.S4:
            top = math.ceil(n * strategy.d_percent / 100.0)
            if top < p:
                raise ValueError(
                    f"top {strategy.d_percent}% of {n} records is {top} < population size {p}"
                )
            idx = np.sort(_top_indices(f, top))
        else:
            idx = np.arange(n)
        pts = space.to_unit(X[idx]) if space is not None else X[idx]
        labels = kmeans(pts, p, rng)
        chosen = _best_per_cluster(idx, labels, f, p)

    out = []
    for i in chosen:
        if space is not None and ea_cfg is not None:
            ind = new_individual(X[i], ea_cfg, space, fitness=f[i])
        else:
            ind = Individual(X[i], np.full(X.shape[1], 0.1), f[i])
        out.append(ind)
    return out


def run_bea(
    objective: Objective,
    space: SearchSpace,
    cfg: BEAConfig,
    iters: int,
    timer: Timer = time.perf_counter,
    bo_prefix: Trace | None = None,
) -> Trace:
    """Run BO for ``switch_point`` iterations, transfer, then the gain-aware EA.

    ``sigma2`` is updated from the gain over the trailing ``window``
    evaluations, once at the start of every generation (or before every
    offspring when ``sigma2_per_generation`` is off).

    The BO stage draws from the same stream as :func:`optbench.bo.run_bo` with
    ``seed=cfg.seed``, so a BO trace of the same seed can be passed as
    ``bo_prefix`` to skip recomputing the first stage.
    """
    ns = cfg.switch_point
    if iters <= ns:
        raise ValueError(f"iters ({iters}) must exceed the switch point ({ns})")
    if bo_prefix is not None:
        if len(bo_prefix) < ns:
            raise ValueError("bo_prefix shorter than the switch point")
        bo_records = [replace(r, stage="bo") for r in bo_prefix.records[:ns]]
    else:
        bo_cfg = replace(cfg.bo, seed=cfg.seed)
        bo_records = bo_steps(objective, space, bo_cfg, ns, np.random.default_rng(cfg.seed), timer)
    archive = Trace(tuple(bo_records))

    ea_cfg = cfg.ea
    p = ea_cfg.pop_size
    rng = np.random.default_rng([cfg.seed, 1])
    start = timer()
    pop = select_transfer_population(archive, cfg.strategy, p, rng, space, ea_cfg)
    # the transfer happens at the switch point, so its cost lands on that record
    last = bo_records[-1]
    bo_records[-1] = replace(last, overhead=last.overhead + max(timer() - start, 0.0))

    best = list(archive.best_curve())
    loop = _Loop(objective, timer, ns + 1, "ea")
    state = GainAwareState()
    w = cfg.window

    def window_gain() -> float:
        i = len(best)  # last completed iteration
        return max(best[i - 1] - best[max(i - w, 1) - 1], 0.0)

    while len(loop.records) < iters - ns:
        offspring, pending = [], []
        for j in range(min(p, iters - ns - len(loop.records))):
            start = timer()
            if j == 0 or not cfg.sigma2_per_generation:
                state = update_sigma2(state, window_gain(), cfg.alpha, cfg.beta)
            mut_state = state
            child = make_offspring(
                pop, ea_cfg, rng, lambda ind: gain_aware_mutate(ind, mut_state, ea_cfg, space, rng)
            )
            pending.append(timer() - start)
            child = loop.evaluate(child, 0.0, sigma2=state.sigma2)
            best.append(max(best[-1], child.fitness))
            offspring.append(child)
        start = timer()
        pop = survivors(pop, offspring, p)
        _spread_overhead(loop.records, pending, timer() - start)

    return Trace(
        tuple(bo_records) + tuple(loop.records),
        seed=cfg.seed,
        algorithm="bea",
        meta={
            "switch_point": ns,
            "strategy": cfg.strategy.tag.value,
            "alpha": cfg.alpha,
            "beta": cfg.beta,
            "gamma": cfg.bo.gamma,
            "theta": cfg.bo.theta,
            "sigma2_final": state.sigma2,
        },
    )
