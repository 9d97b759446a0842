"""Genetic search for violations: genome layout, decoding and the driver loop.

A genome is laid out as ``[state | Alice bases | Bob bases | extras]``.

* state, ``pure`` mode: ``2 * n`` genes, mapped to amplitudes ``2g - 1``
  (real and imaginary parts) and normalized, with ``n = d*d`` for a shared
  state or ``n = d`` for Bob alone;
* state, ``mixed`` mode: a pure state on ``system (x) ancilla`` with an
  ancilla as large as the system, traced over the ancilla;
* each basis: ``d*d`` genes decoded by :func:`unitary_from_unit_vector`,
  columns are the basis vectors;
* extras: one gene for a free Renyi order, ``alpha = 10 ** (lo + g (hi - lo))``.

Fitness is ``-slack`` of the target relation, so a positive fitness is a
violation.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import coefficients as co
from . import ga
from . import tolerances as tol
from .qcore import unitary_from_unit_vector
from .relations import (
    OPTIMIZED_RELATIONS, RELATIONS, SHAPES, MeasurementScenario, RelationReport, evaluate,
)

MODES = ("pure", "mixed")


@dataclass(frozen=True)
class ScenarioCodec:
    dim: int
    mode: str = "pure"
    n_alice: int = 1
    n_bob: int = 2
    free_alpha: bool = False
    log10_alpha_range: tuple[float, float] = (-1.0, 2.0)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.dim < 1:
            raise ValueError("dimension must be positive")

    @classmethod
    def for_relation(cls, relation: str, dim: int, mode: str = "pure", free_alpha: bool = False):
        if relation not in RELATIONS:
            raise KeyError(f"unknown relation {relation!r}")
        n_alice, n_bob = SHAPES[relation]
        return cls(dim, mode, n_alice, n_bob, free_alpha and relation == "renyi")

    @property
    def system_dim(self) -> int:
        return self.dim if self.n_alice == 0 else self.dim ** 2

    @property
    def state_genes(self) -> int:
        n = self.system_dim
        return 2 * n if self.mode == "pure" else 2 * n * n

    @property
    def length(self) -> int:
        return self.state_genes + (self.n_alice + self.n_bob) * self.dim ** 2 + int(self.free_alpha)

    def offsets(self) -> dict[str, tuple[int, int]]:
        out = {"state": (0, self.state_genes)}
        pos = self.state_genes
        d2 = self.dim ** 2
        for k in range(self.n_alice):
            out[f"alice{k}"] = (pos, pos + d2)
            pos += d2
        for k in range(self.n_bob):
            out[f"bob{k}"] = (pos, pos + d2)
            pos += d2
        if self.free_alpha:
            out["alpha"] = (pos, pos + 1)
        return out


def _amplitudes(genes: np.ndarray) -> np.ndarray:
    half = genes.shape[0] // 2
    v = (2 * genes[:half] - 1) + 1j * (2 * genes[half:] - 1)
    n = np.linalg.norm(v)
    if n < 1e-12:
        v = np.zeros(half, dtype=complex)
        v[0] = 1.0
        return v
    return v / n


def decode_state(genes: np.ndarray, codec: ScenarioCodec) -> np.ndarray:
    n = codec.system_dim
    if codec.mode == "pure":
        return _amplitudes(genes)
    m = _amplitudes(genes).reshape(n, n)  # system x ancilla
    return m @ m.conj().T


def decode_alpha(gene: float, codec: ScenarioCodec) -> float:
    lo, hi = codec.log10_alpha_range
    return float(10 ** (lo + float(np.clip(gene, 0, 1)) * (hi - lo)))


def decode_scenario(genome: np.ndarray, codec: ScenarioCodec, fixed: dict | None = None) -> MeasurementScenario:
    """Build a scenario from a genome; entries of ``fixed`` override decoded parts.

    ``fixed`` may hold ``state``, ``alice_bases``, ``bob_bases`` and any
    relation parameter (``alpha``, ``p``).
    """
    g = np.clip(np.asarray(genome, dtype=float), 0.0, 1.0)
    if g.shape != (codec.length,):
        raise ValueError(f"genome of length {g.shape} does not match codec length {codec.length}")
    fixed = dict(fixed or {})
    off = codec.offsets()
    d = codec.dim
    state = fixed.pop("state", None)
    if state is None:
        state = decode_state(g[slice(*off["state"])], codec)
    alice = fixed.pop("alice_bases", None)
    if alice is None:
        alice = tuple(unitary_from_unit_vector(g[slice(*off[f"alice{k}"])]) for k in range(codec.n_alice))
    bob = fixed.pop("bob_bases", None)
    if bob is None:
        bob = tuple(unitary_from_unit_vector(g[slice(*off[f"bob{k}"])]) for k in range(codec.n_bob))
    params = fixed
    if codec.free_alpha:
        params = {**params, "alpha": decode_alpha(g[off["alpha"][0]], codec)}
    return MeasurementScenario(d, state, tuple(alice), tuple(bob), label="decoded", params=params)


def fitness_of(report: RelationReport) -> float:
    if report.degenerate:
        return -math.inf
    return -report.slack


@dataclass
class SearchRecord:
    relation: str
    dim: int
    mode: str
    config: ga.GAConfig
    history: list[tuple[int, float, float]]
    best_genome: np.ndarray
    best_fitness: float
    best_scenario: MeasurementScenario
    report: RelationReport
    coefficient: str
    wall_time: float = 0.0
    reverified: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def violation(self) -> bool:
        return self.report.violated


class _Objective:
    """Batched fitness: decodes each organism and evaluates the relation."""

    def __init__(self, relation, codec, fixed, coefficient, budget, workers):
        self.relation, self.codec, self.fixed = relation, codec, fixed
        self.coefficient, self.budget, self.workers = coefficient, budget, workers
        self.reverified = 0

    def one(self, genome: np.ndarray) -> float:
        s = decode_scenario(genome, self.codec, self.fixed)
        rep = evaluate(self.relation, s, budget=self.budget, coefficient=self.coefficient)
        f = fitness_of(rep)
        if (self.relation in OPTIMIZED_RELATIONS and rep.method.startswith(co.OPTIMIZED)
                and f > tol.NEAR_VIOLATION and self.budget is not None):
            # near-violation with a GA-estimated coefficient: spend 10x before trusting it
            self.reverified += 1
            rep = evaluate(self.relation, s, budget=self.budget.scaled(10), coefficient=self.coefficient)
            f = fitness_of(rep)
        return f

    def __call__(self, pop: np.ndarray) -> np.ndarray:
        if self.workers > 1:
            with ThreadPoolExecutor(self.workers) as ex:
                return np.array(list(ex.map(self.one, pop)))
        return np.array([self.one(g) for g in pop])


def verify(relation: str, scenario: MeasurementScenario, coefficient: str,
           budget: co.OptimizerBudget | None) -> RelationReport:
    """Independent re-evaluation of a search result.

    Optimized coefficients are recomputed by the multi-start GA at ten
    times the budget, whatever route the search itself used.
    """
    if relation in OPTIMIZED_RELATIONS:
        b = (budget or co.OptimizerBudget()).scaled(10)
        return evaluate(relation, scenario, budget=b, coefficient=co.OPTIMIZED)
    return evaluate(relation, scenario)


def run_search(relation: str, config: ga.GAConfig, codec: ScenarioCodec, *,
               fixed: dict | None = None, coefficient: str | None = None,
               budget: co.OptimizerBudget | None = None, workers: int = 1,
               on_generation=None) -> SearchRecord:
    """Maximize the violation of ``relation`` over scenarios decoded by ``codec``.

    ``coefficient`` selects how ``c'`` is obtained during the search
    (``"analytic"`` by default for ``two-vs-two``, ``"optimized"`` for
    ``two-vs-two-sum``); the final best scenario is always re-checked by
    :func:`verify`.
    """
    if relation not in RELATIONS:
        raise KeyError(f"unknown relation {relation!r}; choose from {sorted(RELATIONS)}")
    if relation == "two-vs-two-fixed-v":
        raise ValueError("'two-vs-two-fixed-v' needs a fixed V and a matching state; search 'two-vs-two' instead")
    if coefficient is None:
        coefficient = co.ANALYTIC if relation == "two-vs-two" else co.OPTIMIZED
    if relation in OPTIMIZED_RELATIONS and coefficient == co.OPTIMIZED and budget is None:
        budget = co.OptimizerBudget(generations=20)
    t0 = time.perf_counter()
    obj = _Objective(relation, codec, fixed, coefficient, budget, workers)
    state = ga.evolve(obj, codec.length, config, on_generation=on_generation)
    best = decode_scenario(state.best_genome, codec, fixed)
    report = verify(relation, best, coefficient, budget)
    rec = SearchRecord(relation, codec.dim, codec.mode, config, list(state.history),
                       state.best_genome.copy(), state.best_fitness, best, report, coefficient,
                       time.perf_counter() - t0, obj.reverified)
    if state.best_fitness > -tol.OPTIMIZED_RHS and not report.violated:
        rec.notes.append("search fitness suggested a violation that verification did not confirm")
    return rec
