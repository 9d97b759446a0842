"""Overlap-derived coefficients appearing on the bound side of the relations.

Bases are ``d x d`` arrays with the basis vectors as columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import ga
from .qcore import unitary_from_unit_vector

EXACT = "exact"
OPTIMIZED = "optimized"
ANALYTIC = "analytic"

_DEGENERATE_OVERLAP = 1e-12


@dataclass(frozen=True)
class OptimizerBudget:
    """Inner-optimizer effort for the max over ``V``.

    Each restart is a GA run of ``generations`` steps around a fixed start
    unitary; the first three starts are ``I``, ``U`` and the eigenvector
    matrix of ``U^T``, the others are random unitaries drawn from ``seed``.
    """

    generations: int = 60
    restarts: int = 8
    seed: int = 0
    population_size: int = 25
    elite_count: int = 3

    def __post_init__(self):
        if self.generations <= 0 or self.restarts <= 0:
            raise ValueError("optimizer budget must be positive")

    def scaled(self, factor: int) -> "OptimizerBudget":
        return OptimizerBudget(self.generations * factor, self.restarts, self.seed,
                               self.population_size, self.elite_count)


@dataclass
class CoefficientResult:
    value: float
    method: str = EXACT
    witness: dict = field(default_factory=dict)
    budget: OptimizerBudget | None = None
    degenerate: bool = False


def _pair(b1: np.ndarray, b2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    b1 = np.asarray(b1, dtype=complex)
    b2 = np.asarray(b2, dtype=complex)
    if b1.shape != b2.shape or b1.ndim != 2:
        raise ValueError(f"basis shapes differ: {b1.shape} vs {b2.shape}")
    return b1, b2


def overlap_matrix(b1: np.ndarray, b2: np.ndarray) -> np.ndarray:
    """``c[i, j] = |<b1_i|b2_j>|^2``; bistochastic for two orthonormal bases."""
    b1, b2 = _pair(b1, b2)
    return np.abs(b1.conj().T @ b2) ** 2


def coeff_a(c: np.ndarray) -> float:
    """Largest squared overlap."""
    return float(np.max(c))


def d_largest_sum(c: np.ndarray) -> float:
    d = c.shape[0]
    return float(np.sum(np.sort(np.ravel(c))[::-1][:d]))


def coeff_c(c: np.ndarray) -> float:
    """Sum of the ``d`` largest squared overlaps."""
    return d_largest_sum(np.asarray(c))


def sum_sq(c: np.ndarray) -> float:
    return float(np.sum(np.asarray(c) ** 2))


def alignment_unitary(a1: np.ndarray, a2: np.ndarray) -> np.ndarray:
    """``U = sum_k |a2_k><a1_k|``, so that ``U^dag |a2_k> = |a1_k>``."""
    a1, a2 = _pair(a1, a2)
    return a2 @ a1.conj().T


def conjugated_overlaps(b1: np.ndarray, b2: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``|<b1_i| V U^T V^dag |b2_j>|^2``; ``v`` may carry leading batch axes."""
    w = v @ u.T @ np.conj(np.swapaxes(v, -1, -2))
    return np.abs(b1.conj().T @ w @ b2) ** 2


def coeff_c_tilde_prime(b1: np.ndarray, b2: np.ndarray, u: np.ndarray, v: np.ndarray) -> CoefficientResult:
    """Exact max over index pairs for one fixed ``V``."""
    b1, b2 = _pair(b1, b2)
    c = conjugated_overlaps(b1, b2, np.asarray(u), np.asarray(v))
    i, j = np.unravel_index(int(np.argmax(c)), c.shape)
    return CoefficientResult(float(c[i, j]), EXACT, {"i": int(i), "j": int(j)})


def _start_unitaries(u: np.ndarray, budget: OptimizerBudget, extra: Sequence[np.ndarray]) -> list[np.ndarray]:
    d = u.shape[0]
    _, eig = np.linalg.eig(u.T)
    q, _ = np.linalg.qr(eig)
    starts = [np.eye(d, dtype=complex), np.asarray(u, dtype=complex), q]
    rng = np.random.default_rng([budget.seed, 7919])
    while len(starts) < budget.restarts:
        starts.append(unitary_from_unit_vector(rng.random(d * d)))
    return list(extra) + starts[: budget.restarts]


def _maximize_over_v(b1, b2, u, budget: OptimizerBudget, reduce, extra: Sequence[np.ndarray]):
    """Multi-start GA over ``V = V0 * decode(x)``; ``x = 0`` is the start itself."""
    d = u.shape[0]
    best_val, best_v, best_restart = -np.inf, None, -1
    cfg_base = dict(population_size=budget.population_size, elite_count=budget.elite_count,
                    generations=budget.generations)
    for r, v0 in enumerate(_start_unitaries(u, budget, extra)):
        def fitness(pop, v0=v0):
            vs = v0 @ unitary_from_unit_vector(pop)
            return reduce(conjugated_overlaps(b1, b2, u, vs))

        cfg = ga.GAConfig(seed=budget.seed * 1000 + r, **cfg_base)
        st = ga.evolve(fitness, d * d, cfg, seeds=[np.zeros(d * d)])
        if st.best_fitness > best_val:
            best_val = st.best_fitness
            best_v = v0 @ unitary_from_unit_vector(st.best_genome)
            best_restart = r
    return best_val, best_v, best_restart


def _max_entry(c: np.ndarray) -> np.ndarray:
    return c.reshape(c.shape[:-2] + (-1,)).max(axis=-1)


def _d_largest(c: np.ndarray) -> np.ndarray:
    d = c.shape[-1]
    flat = np.sort(c.reshape(c.shape[:-2] + (-1,)), axis=-1)
    return flat[..., -d:].sum(axis=-1)


def coeff_c_prime(b1: np.ndarray, b2: np.ndarray, u: np.ndarray,
                  budget: OptimizerBudget | None = None,
                  extra_starts: Sequence[np.ndarray] = ()) -> CoefficientResult:
    """Lower bound on ``max_V max_ij |<b1_i|V U^T V^dag|b2_j>|^2`` by multi-start GA.

    The result never decreases when ``budget.generations`` grows.
    """
    budget = budget or OptimizerBudget()
    b1, b2 = _pair(b1, b2)
    u = np.asarray(u, dtype=complex)
    val, v, r = _maximize_over_v(b1, b2, u, budget, _max_entry, extra_starts)
    return CoefficientResult(float(val), OPTIMIZED, {"V": v, "restart": r}, budget)


def coeff_c_tripleprime(b1: np.ndarray, b2: np.ndarray, u: np.ndarray,
                        budget: OptimizerBudget | None = None,
                        extra_starts: Sequence[np.ndarray] = ()) -> CoefficientResult:
    """Lower bound on ``max_V`` of the sum of the ``d`` largest conjugated overlaps."""
    budget = budget or OptimizerBudget()
    b1, b2 = _pair(b1, b2)
    u = np.asarray(u, dtype=complex)
    val, v, r = _maximize_over_v(b1, b2, u, budget, _d_largest, extra_starts)
    return CoefficientResult(float(val), OPTIMIZED, {"V": v, "restart": r}, budget)


def spectral_gap_radius(u: np.ndarray) -> float:
    """Distance from the origin to the convex hull of the eigenvalues of ``u``."""
    lam = np.linalg.eigvals(np.asarray(u))
    ang = np.sort(np.mod(np.angle(lam), 2 * np.pi))
    gaps = np.diff(np.concatenate([ang, ang[:1] + 2 * np.pi]))
    widest = float(gaps.max())
    if widest <= np.pi:
        return 0.0
    # eigenvalues sit on an arc of length 2 pi - widest; the nearest hull
    # point is the midpoint of the chord joining the arc ends
    return float(np.cos((2 * np.pi - widest) / 2))


def coeff_c_prime_closed_form(b1: np.ndarray, b2: np.ndarray, u: np.ndarray) -> CoefficientResult:
    """Closed-form value of the max over ``V`` of the largest conjugated overlap.

    With ``t = sqrt(a)`` the largest plain overlap modulus and ``r`` the
    distance from 0 to the convex hull of the spectrum of ``U``, the optimum
    is ``1`` when ``t >= r`` and ``cos(arccos t - arccos r)^2`` otherwise.
    Used as an independent check of :func:`coeff_c_prime` and as a cheap
    bound inside searches.
    """
    b1, b2 = _pair(b1, b2)
    t = float(np.sqrt(min(1.0, coeff_a(overlap_matrix(b1, b2)))))
    r = spectral_gap_radius(u)
    if t >= r:
        val = 1.0
    else:
        val = float(np.cos(np.arccos(t) - np.arccos(r)) ** 2)
    return CoefficientResult(min(val, 1.0), ANALYTIC, {"hull_distance": r, "max_overlap": t * t})


def coeff_c_doubleprime(a1: np.ndarray, a2: np.ndarray, b1: np.ndarray, b2: np.ndarray,
                        p: float = 0.5) -> CoefficientResult:
    """``sum_ijkl |<a1_i|a2_j>|^p / |<b1_k|b2_l>|^p`` via its product factorization.

    Vanishing Bob overlaps make the sum singular; the result is then ``inf``
    and flagged degenerate.
    """
    a1, a2 = _pair(a1, a2)
    b1, b2 = _pair(b1, b2)
    num = np.abs(a1.conj().T @ a2)
    den = np.abs(b1.conj().T @ b2)
    if np.min(den) < _DEGENERATE_OVERLAP:
        return CoefficientResult(float("inf"), EXACT, {"p": p}, degenerate=True)
    val = float(np.sum(num ** p) * np.sum(den ** (-p)))
    return CoefficientResult(val, EXACT, {"p": p})
