"""Real-coded genetic algorithm with elitism and mutation scaling.

Organisms are vectors in ``[0, 1]^n``.  Each generation keeps the elite
unchanged, fills the remaining slots with offspring of binary-tournament
parents (positionwise swap crossover followed by mutation), and adapts the
mutation scale ``s``: multiply by ``scale_up`` (capped at 1) when the
generation improved on the best fitness so far, divide by ``scale_down``
otherwise, and reset to 1 once it falls below ``scale_floor``.

Offspring for slot ``k`` of generation ``g`` draw their random numbers from
a generator seeded with ``(seed, g, k)``, so a run is reproducible no matter
how fitness evaluations are scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from typing import Callable, Sequence

import numpy as np

from . import tolerances as tol

FitnessFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 25
    elite_count: int = 3
    generations: int = 200
    seed: int = 0
    mutation_rate: float = 0.1
    crossover_rate: float = 0.7
    scale_floor: float = 1e-9
    scale_up: float = 1.1
    scale_down: float = 1.05

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if not 0 <= self.elite_count < self.population_size:
            raise ValueError("elite_count must be in [0, population_size)")
        if self.generations < 0:
            raise ValueError("generations must be nonnegative")
        for name in ("mutation_rate", "crossover_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SearchState:
    population: np.ndarray
    fitnesses: np.ndarray
    best_genome: np.ndarray
    best_fitness: float
    scale: float = 1.0
    generation: int = 0
    history: list[tuple[int, float, float]] = field(default_factory=list)


def mutation_scale_update(s: float, improved: bool, up: float = 1.1, down: float = 1.05,
                          floor: float = 1e-9) -> float:
    """Adapt the mutation scale after one generation."""
    s = min(1.0, s * up) if improved else s / down
    return 1.0 if s < floor else s


def mutate(genome: np.ndarray, s: float, rate: float, rng: np.random.Generator) -> np.ndarray:
    """Add ``s (1 - 2r)`` to each gene selected with probability ``rate``, then clamp."""
    g = np.array(genome, dtype=float)
    mask = rng.random(g.shape) < rate
    r = rng.random(g.shape)
    g[mask] += s * (1.0 - 2.0 * r[mask])
    return np.clip(g, 0.0, 1.0)


def crossover(a: np.ndarray, b: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Swap each position between the parents independently with probability 1/2."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"parent lengths differ: {a.shape} vs {b.shape}")
    swap = rng.random(a.shape) < 0.5
    return np.where(swap, b, a), np.where(swap, a, b)


def _tournament(fit: np.ndarray, rng: np.random.Generator) -> int:
    i, j = rng.integers(len(fit), size=2)
    return int(i if fit[i] >= fit[j] else j)


def _as_fitness(values) -> np.ndarray:
    f = np.asarray(values, dtype=float).reshape(-1)
    return np.where(np.isnan(f), -np.inf, f)


def initial_state(fitness: FitnessFn, n_genes: int, config: GAConfig,
                  seeds: Sequence[np.ndarray] = ()) -> SearchState:
    rng = np.random.default_rng([config.seed, 0])
    pop = rng.random((config.population_size, n_genes))
    for k, g in enumerate(list(seeds)[: config.population_size]):
        pop[k] = np.clip(np.asarray(g, dtype=float), 0.0, 1.0)
    fit = _as_fitness(fitness(pop))
    b = int(np.argmax(fit))
    state = SearchState(pop, fit, pop[b].copy(), float(fit[b]))
    state.history.append((0, state.best_fitness, state.scale))
    return state


def step(state: SearchState, fitness: FitnessFn, config: GAConfig) -> SearchState:
    """Advance one generation in place and return the state."""
    g = state.generation + 1
    P, E = config.population_size, config.elite_count
    order = np.argsort(-state.fitnesses, kind="stable")
    new_pop = np.empty_like(state.population)
    new_pop[:E] = state.population[order[:E]]
    slot = E
    k = 0
    while slot < P:
        rng = np.random.default_rng([config.seed, g, k])
        pa = state.population[_tournament(state.fitnesses, rng)]
        pb = state.population[_tournament(state.fitnesses, rng)]
        if rng.random() < config.crossover_rate:
            ca, cb = crossover(pa, pb, rng)
        else:
            ca, cb = pa.copy(), pb.copy()
        for child in (ca, cb):
            if slot < P:
                new_pop[slot] = mutate(child, state.scale, config.mutation_rate, rng)
                slot += 1
        k += 1
    new_fit = np.empty(P)
    new_fit[:E] = state.fitnesses[order[:E]]
    new_fit[E:] = _as_fitness(fitness(new_pop[E:]))

    b = int(np.argmax(new_fit))
    improved = new_fit[b] > state.best_fitness + tol.IMPROVEMENT
    if improved:
        state.best_fitness = float(new_fit[b])
        state.best_genome = new_pop[b].copy()
    state.scale = mutation_scale_update(state.scale, improved, config.scale_up,
                                        config.scale_down, config.scale_floor)
    state.population, state.fitnesses, state.generation = new_pop, new_fit, g
    state.history.append((g, state.best_fitness, state.scale))
    return state


def evolve(fitness: FitnessFn, n_genes: int, config: GAConfig,
           seeds: Sequence[np.ndarray] = (),
           on_generation: Callable[[SearchState], None] | None = None) -> SearchState:
    """Maximize ``fitness`` over ``[0, 1]^n_genes``.

    ``fitness`` maps a ``(P, n)`` array of genomes to ``P`` values.  Genomes
    in ``seeds`` replace the first members of the random initial population.
    """
    state = initial_state(fitness, n_genes, config, seeds)
    if on_generation is not None:
        on_generation(state)
    for _ in range(config.generations):
        step(state, fitness, config)
        if on_generation is not None:
            on_generation(state)
    return state
