"""Real-valued evolutionary algorithm with self-adaptive Gaussian mutation.

Random number generators only need ``random()``, ``integers()``,
``choice()`` and ``standard_normal()``, so tests can pass a stub in place of
:class:`numpy.random.Generator`.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .core import IterationRecord, SearchSpace, Trace

Objective = Callable[[np.ndarray], float]
Timer = Callable[[], float]


@dataclass(frozen=True)
class Individual:
    x: np.ndarray
    sigmas: np.ndarray
    fitness: float | None = None

    def __post_init__(self) -> None:
        x = np.array(self.x, dtype=float)
        sigmas = np.array(self.sigmas, dtype=float)
        if x.shape != sigmas.shape:
            raise ValueError("x and sigmas must have the same length")
        x.setflags(write=False)
        sigmas.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "sigmas", sigmas)

    def with_fitness(self, fitness: float) -> "Individual":
        return replace(self, fitness=float(fitness))


@dataclass(frozen=True)
class EAConfig:
    pop_size: int = 10
    tournament_size: int = 2
    mutation_rate: float = 0.8
    crossover_rate: float = 0.7
    sigma_init_frac: float = 0.1
    epsilon0_frac: float = 1e-4
    tau: float | None = None
    tau_prime: float | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.pop_size < 2:
            raise ValueError("pop_size must be >= 2")
        if not 1 <= self.tournament_size <= self.pop_size:
            raise ValueError("tournament_size must lie in 1..pop_size")
        for name in ("mutation_rate", "crossover_rate"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {rate}")

    def learning_rates(self, n: int) -> tuple[float, float]:
        """``(tau, tau_prime)``: coordinate-wise and global learning rates."""
        tau = self.tau if self.tau is not None else 1.0 / math.sqrt(2.0 * math.sqrt(n))
        tau_prime = self.tau_prime if self.tau_prime is not None else 1.0 / math.sqrt(2.0 * n)
        return tau, tau_prime

    def sigma_init(self, space: SearchSpace) -> np.ndarray:
        return self.sigma_init_frac * space.width

    def epsilon0(self, space: SearchSpace) -> np.ndarray:
        return self.epsilon0_frac * space.width


def new_individual(x: np.ndarray, cfg: EAConfig, space: SearchSpace, fitness: float | None = None) -> Individual:
    return Individual(x, cfg.sigma_init(space), fitness)


def tournament_select(pop: Sequence[Individual], size: int, rng) -> Individual:
    """Best of ``size`` members drawn without replacement."""
    if not pop:
        raise ValueError("cannot select from an empty population")
    if not 1 <= size <= len(pop):
        raise ValueError(f"tournament size {size} invalid for population of {len(pop)}")
    picks = rng.choice(len(pop), size=size, replace=False)
    # ties go to the earliest draw
    return max((pop[int(i)] for i in picks), key=lambda ind: ind.fitness)


def arithmetic_crossover(a: Individual, b: Individual, rng=None) -> Individual:
    """Midpoint of both the positions and the step sizes."""
    if a.x.shape != b.x.shape:
        raise ValueError("parents differ in dimension")
    return Individual(0.5 * a.x + 0.5 * b.x, 0.5 * a.sigmas + 0.5 * b.sigmas)


def mutate_step_sizes(sigmas: np.ndarray, tau: float, tau_prime: float, eps0: np.ndarray, rng) -> np.ndarray:
    n = sigmas.size
    common = tau_prime * float(rng.standard_normal())
    new = sigmas * np.exp(common + tau * rng.standard_normal(n))
    return np.maximum(new, eps0)


def self_adaptive_mutate(ind: Individual, cfg: EAConfig, space: SearchSpace, rng) -> Individual:
    """Log-normal step-size update then Gaussian perturbation; clamps at the bounds."""
    tau, tau_prime = cfg.learning_rates(ind.x.size)
    sigmas = mutate_step_sizes(ind.sigmas, tau, tau_prime, cfg.epsilon0(space), rng)
    x = ind.x + sigmas * rng.standard_normal(ind.x.size)
    return Individual(space.clip(x), sigmas)


def survivors(parents: Sequence[Individual], offspring: Sequence[Individual], p: int) -> list[Individual]:
    """(mu + lambda): best ``p`` of parents and offspring; parents win ties."""
    pool = list(parents) + list(offspring)
    order = sorted(range(len(pool)), key=lambda i: (-pool[i].fitness, i))
    return [pool[i] for i in order[:p]]


@dataclass
class _Loop:
    """Bookkeeping shared by the plain and the gain-aware generation loops."""

    objective: Objective
    timer: Timer
    start_index: int
    stage: str
    records: list[IterationRecord] = field(default_factory=list)

    def evaluate(self, ind: Individual, overhead: float, sigma2: float | None = None) -> Individual:
        index = self.start_index + len(self.records)
        try:
            fx = float(self.objective(ind.x))
        except Exception as exc:
            raise RuntimeError(f"objective evaluation failed at iteration {index}: {exc}") from exc
        self.records.append(
            IterationRecord(index, ind.x, fx, max(overhead, 0.0), stage=self.stage, sigma2=sigma2)
        )
        return ind.with_fitness(fx)


def make_offspring(pop: Sequence[Individual], cfg: EAConfig, rng, mutate: Callable[[Individual], Individual]) -> Individual:
    a = tournament_select(pop, cfg.tournament_size, rng)
    if rng.random() < cfg.crossover_rate:
        b = tournament_select(pop, cfg.tournament_size, rng)
        child = arithmetic_crossover(a, b)
    else:
        child = Individual(a.x, a.sigmas)
    if rng.random() < cfg.mutation_rate:
        child = mutate(child)
    return child


def evaluate_initial(loop: _Loop, seeds: Sequence[Individual], limit: int, timer: Timer) -> list[Individual]:
    pop = []
    for ind in seeds:
        if ind.fitness is not None:
            pop.append(ind)
        elif len(loop.records) < limit:
            start = timer()
            ind = Individual(ind.x, ind.sigmas)
            pop.append(loop.evaluate(ind, timer() - start))
    return pop


def run_ea(
    objective: Objective,
    space: SearchSpace,
    cfg: EAConfig,
    iters: int,
    initial_pop: Sequence[Individual] | None = None,
    timer: Timer = time.perf_counter,
) -> Trace:
    """Generational EA with (mu+lambda) survivor selection.

    Stops after exactly ``iters`` objective evaluations. Members of
    ``initial_pop`` whose fitness is already set are not re-evaluated.
    """
    p = cfg.pop_size
    if initial_pop is None and iters < p:
        raise ValueError(f"iters ({iters}) must be >= pop_size ({p})")
    rng = np.random.default_rng(cfg.seed)
    loop = _Loop(objective, timer, 1, "ea")
    if initial_pop is None:
        initial_pop = []
        for _ in range(p):
            start = timer()
            ind = new_individual(space.sample(rng), cfg, space)
            initial_pop.append(loop.evaluate(ind, timer() - start))
        pop = initial_pop
    else:
        pop = evaluate_initial(loop, initial_pop, iters, timer)
    if not pop:
        raise ValueError("empty initial population")

    def mutate(ind: Individual) -> Individual:
        return self_adaptive_mutate(ind, cfg, space, rng)

    while len(loop.records) < iters:
        offspring = []
        pending = []
        for _ in range(min(p, iters - len(loop.records))):
            start = timer()
            child = make_offspring(pop, cfg, rng, mutate)
            pending.append(timer() - start)
            offspring.append(loop.evaluate(child, 0.0))
        start = timer()
        pop = survivors(pop, offspring, p)
        _spread_overhead(loop.records, pending, timer() - start)
    return Trace(tuple(loop.records), seed=cfg.seed, algorithm="ea")


def _spread_overhead(records: list[IterationRecord], own: list[float], shared: float) -> None:
    """Write per-offspring overhead plus an even share of the survivor-selection time."""
    share = max(shared, 0.0) / len(own)
    base = len(records) - len(own)
    for j, t in enumerate(own):
        records[base + j] = replace(records[base + j], overhead=max(t, 0.0) + share)
