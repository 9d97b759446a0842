"""Outcome distributions and the entropic functionals built on them.

All entropies are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import tolerances as tol
from .qcore import as_density

#: sentinel order for the min-entropy
INF = float("inf")


def clean_probs(p: np.ndarray) -> np.ndarray:
    """Validate a probability array and zero out rounding-level entries."""
    p = np.asarray(np.real(p), dtype=float)
    if np.any(p < -tol.PROB_SUM):
        raise ValueError(f"negative probability {p.min():.3e}")
    if abs(p.sum() - 1.0) > tol.PROB_SUM:
        raise ValueError(f"probabilities sum to {p.sum():.12g}")
    return np.where(p < tol.PROB_CLAMP, 0.0, p)


def _h(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz))) + 0.0


def shannon_entropy(p: Sequence[float] | np.ndarray) -> float:
    """``-sum p log2 p`` with ``0 log 0 = 0``."""
    return _h(clean_probs(p).ravel())


def renyi_entropy(p: Sequence[float] | np.ndarray, alpha: float) -> float:
    """Renyi entropy of order ``alpha`` in bits.

    ``alpha = INF`` gives the min-entropy ``-log2 max p``; orders within
    1e-6 of one fall back to the Shannon entropy.
    """
    if not alpha > 0:
        raise ValueError(f"Renyi order must be positive, got {alpha}")
    q = clean_probs(p).ravel()
    if alpha == INF:
        return float(-np.log2(q.max())) + 0.0
    if abs(alpha - 1.0) < 1e-6:
        return _h(q)
    nz = q[q > 0]
    return float(np.log2(np.sum(nz ** alpha)) / (1.0 - alpha)) + 0.0


def outcome_distribution(rho: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Born-rule probabilities ``<b_j| rho |b_j>`` for the columns of ``basis``."""
    rho = as_density(rho)
    basis = np.asarray(basis, dtype=complex)
    if rho.shape[0] != basis.shape[0]:
        raise ValueError(f"state of dim {rho.shape[0]} vs basis of dim {basis.shape[0]}")
    p = np.real(np.einsum("ij,ik,kj->j", basis.conj(), rho, basis))
    return np.clip(p, 0.0, None)


def joint_distribution(rho: np.ndarray, basis_a: np.ndarray, basis_b: np.ndarray) -> np.ndarray:
    """``p[k, j] = Tr[rho (P_k (x) Q_j)]`` for a bipartite state.

    ``rho`` may be a ket of length ``dA*dB`` or a density matrix.
    """
    basis_a = np.asarray(basis_a, dtype=complex)
    basis_b = np.asarray(basis_b, dtype=complex)
    da, db = basis_a.shape[0], basis_b.shape[0]
    state = np.asarray(rho, dtype=complex)
    if state.ndim == 1:
        if state.shape[0] != da * db:
            raise ValueError(f"ket of length {state.shape[0]} does not match {da}x{db}")
        amp = basis_a.conj().T @ state.reshape(da, db) @ basis_b.conj()
        p = np.abs(amp) ** 2
    else:
        if state.shape != (da * db, da * db):
            raise ValueError(f"state of shape {state.shape} does not match {da}x{db}")
        w = np.kron(basis_a, basis_b)
        p = np.real(np.einsum("ij,ik,kj->j", w.conj(), state, w)).reshape(da, db)
    p = np.clip(p, 0.0, None)
    return p


def mutual_information(p: np.ndarray) -> float:
    """``S(A) + S(B) - S(AB)`` of a joint table ``p[k, j]``, clamped at zero."""
    p = clean_probs(p)
    if p.ndim != 2:
        raise ValueError("joint distribution must be a 2-D table")
    mi = _h(p.sum(axis=1)) + _h(p.sum(axis=0)) - _h(p.ravel())
    return max(mi, 0.0)


@dataclass(frozen=True)
class Ensemble:
    """States ``rho_i`` prepared with probabilities ``p_i``."""

    weights: np.ndarray
    states: tuple[np.ndarray, ...]

    def __post_init__(self):
        w = clean_probs(self.weights)
        sts = tuple(as_density(s) for s in self.states)
        if len(sts) != len(w):
            raise ValueError("one weight per state required")
        if len({s.shape for s in sts}) != 1:
            raise ValueError("ensemble states must share a dimension")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", sts)

    @property
    def dim(self) -> int:
        return self.states[0].shape[0]

    def average(self) -> np.ndarray:
        return sum(w * s for w, s in zip(self.weights, self.states))

    def joint(self, basis: np.ndarray) -> np.ndarray:
        """Table ``p(i, j) = p_i Tr[rho_i Q_j]``."""
        return np.array([w * outcome_distribution(s, basis) for w, s in zip(self.weights, self.states)])


def accessible_information(ensemble: Ensemble, basis: np.ndarray) -> float:
    """``S(B)_rho - sum_i p_i S(B)_rho_i`` for a measurement in ``basis``."""
    if np.asarray(basis).shape[0] != ensemble.dim:
        raise ValueError("basis and ensemble dimensions differ")
    avg = shannon_entropy(_renorm(outcome_distribution(ensemble.average(), basis)))
    cond = sum(
        w * shannon_entropy(_renorm(outcome_distribution(s, basis)))
        for w, s in zip(ensemble.weights, ensemble.states)
    )
    return max(avg - cond, 0.0)


def _renorm(p: np.ndarray) -> np.ndarray:
    return p / p.sum()
