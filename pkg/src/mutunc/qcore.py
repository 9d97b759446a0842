"""Dense linear algebra and state constructors for small bipartite systems.

Conventions
-----------
* Operators and kets are plain complex ``numpy`` arrays.
* A basis is a ``d x d`` array whose *columns* are the basis vectors.
* Bipartite index order: ``|i>_A |j>_B`` sits at flat index ``i * dB + j``,
  which is the order produced by :func:`numpy.kron`.
* Transposes and complex conjugates are taken in the computational basis.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import tolerances as tol


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, left factor outermost."""
    return np.kron(np.asarray(a), np.asarray(b))


def ket_to_density(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return np.outer(psi, psi.conj())


def as_density(state: np.ndarray) -> np.ndarray:
    """Accept a ket or a density matrix and return a density matrix."""
    arr = np.asarray(state, dtype=complex)
    if arr.ndim == 1 or (arr.ndim == 2 and 1 in arr.shape):
        return ket_to_density(arr)
    return arr


def check_density(rho: np.ndarray) -> None:
    """Raise ``ValueError`` unless ``rho`` is Hermitian, unit-trace and PSD."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density operator must be square, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise ValueError("density operator has non-finite entries")
    if np.max(np.abs(rho - rho.conj().T), initial=0.0) > tol.ALGEBRAIC:
        raise ValueError("density operator is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol.ALGEBRAIC:
        raise ValueError(f"density operator has trace {tr.real:.12g}, expected 1")
    lo = np.linalg.eigvalsh(rho).min()
    if lo < -tol.PSD:
        raise ValueError(f"density operator has negative eigenvalue {lo:.3e}")


def check_basis(basis: np.ndarray, atol: float = tol.STRUCTURAL) -> None:
    basis = np.asarray(basis)
    if basis.ndim != 2 or basis.shape[0] != basis.shape[1]:
        raise ValueError(f"basis must be a square matrix of column vectors, got {basis.shape}")
    gram = basis.conj().T @ basis
    err = np.max(np.abs(gram - np.eye(basis.shape[0])), initial=0.0)
    if err > atol:
        raise ValueError(f"basis is not orthonormal (Gram error {err:.3e})")


def check_unitary(u: np.ndarray, atol: float = tol.STRUCTURAL) -> None:
    check_basis(u, atol)


def unitarity_error(u: np.ndarray) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def partial_trace(rho: np.ndarray, dims: tuple[int, int], trace_out: str = "A") -> np.ndarray:
    """Trace out party ``"A"`` or ``"B"`` of a bipartite operator.

    >>> bell = maximally_entangled(2)
    >>> np.allclose(partial_trace(ket_to_density(bell), (2, 2), "A"), np.eye(2) / 2)
    True
    """
    da, db = dims
    rho = np.asarray(rho)
    if rho.shape != (da * db, da * db):
        raise ValueError(f"operator of shape {rho.shape} does not match dims {dims}")
    t = rho.reshape(da, db, da, db)
    if trace_out == "A":
        return np.einsum("ijil->jl", t)
    if trace_out == "B":
        return np.einsum("ijkj->ik", t)
    raise ValueError(f"trace_out must be 'A' or 'B', got {trace_out!r}")


def projector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    n = np.linalg.norm(v)
    if n < tol.ALGEBRAIC:
        raise ValueError("cannot build a projector from the zero vector")
    if abs(n - 1.0) > tol.ALGEBRAIC:
        raise ValueError(f"projector needs a unit vector, got norm {n:.12g}")
    return np.outer(v, v.conj())


def computational_basis(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex)


def maximally_entangled(d: int, v: np.ndarray | None = None) -> np.ndarray:
    """Return ``(I (x) V) |Phi+>`` with ``|Phi+> = sum_i |ii> / sqrt(d)``."""
    phi = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    if v is None:
        return phi
    v = np.asarray(v, dtype=complex)
    if v.shape != (d, d):
        raise ValueError(f"V must be {d}x{d}, got {v.shape}")
    return np.kron(np.eye(d), v) @ phi


def schmidt_state(
    coeffs: Sequence[float],
    basis_a: np.ndarray | None = None,
    basis_b: np.ndarray | None = None,
) -> np.ndarray:
    """Pure state ``sum_i sqrt(lam_i) |a_i> |b_i>`` from Schmidt weights ``lam``.

    The weights are probabilities (they sum to one); bases default to the
    computational one of dimension ``len(coeffs)``.
    """
    lam = np.asarray(coeffs, dtype=float)
    if np.any(lam < 0):
        raise ValueError("Schmidt weights must be nonnegative")
    if abs(lam.sum() - 1.0) > tol.ALGEBRAIC:
        raise ValueError(f"Schmidt weights sum to {lam.sum():.12g}, expected 1")
    d = len(lam) if basis_a is None else np.asarray(basis_a).shape[0]
    if len(lam) > d:
        raise ValueError("more Schmidt weights than the local dimension")
    ba = computational_basis(d) if basis_a is None else np.asarray(basis_a, dtype=complex)
    bb = computational_basis(d) if basis_b is None else np.asarray(basis_b, dtype=complex)
    psi = np.zeros(d * d, dtype=complex)
    for i, w in enumerate(lam):
        psi += np.sqrt(w) * np.kron(ba[:, i], bb[:, i])
    return psi


def unitary_from_unit_vector(x: np.ndarray) -> np.ndarray:
    """Decode genes in ``[0, 1]^(d*d)`` into a ``d x d`` unitary.

    Recursive Hurwitz-style composition ``U_k = D_k R_k (1 (+) U_(k-1))``
    where ``R_k`` is a chain of two-level rotations whose angles obey
    ``sin(phi_j) = xi_j ** (1 / (2 (k - j)))`` and ``D_k`` is a diagonal
    of phases ``exp(2 pi i x)``.  The first column of ``U_k`` is then
    uniform on the unit sphere, so uniform genes give Haar-distributed
    unitaries.  Level ``k`` consumes ``2k - 1`` genes, levels are laid out
    ``k = 1, 2, ..., d``.

    Accepts a batch of shape ``(..., d*d)`` and returns ``(..., d, d)``.
    Out-of-range genes are clamped; the all-zero vector decodes to ``I``.
    """
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    n = x.shape[-1]
    d = int(round(np.sqrt(n)))
    if d * d != n or n == 0:
        raise ValueError(f"gene vector length {n} is not a perfect square")
    batch = x.shape[:-1]
    u = np.exp(2j * np.pi * x[..., 0:1])[..., None]  # (..., 1, 1)
    pos = 1
    for k in range(2, d + 1):
        m = np.zeros(batch + (k, k), dtype=complex)
        m[..., 0, 0] = 1.0
        m[..., 1:, 1:] = u
        for j in range(1, k):
            sn = np.power(x[..., pos], 1.0 / (2 * (k - j)))
            c = np.sqrt(1.0 - sn * sn)[..., None]
            sn = sn[..., None]
            pos += 1
            r = j - 1
            top = m[..., r, :].copy()
            bot = m[..., r + 1, :]
            m[..., r, :] = c * top - sn * bot
            m[..., r + 1, :] = sn * top + c * bot
        phases = np.exp(2j * np.pi * x[..., pos:pos + k])
        pos += k
        u = m * phases[..., :, None]
    return u


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_from_unit_vector(rng.random(d * d))


def gram_schmidt(vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Orthonormalize ``vectors`` in order; returns a basis with columns.

    Uses two passes of modified Gram-Schmidt.  Raises ``ValueError`` when a
    pivot norm drops below 1e-10 (rank deficiency).
    """
    vs = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
    if not vs:
        raise ValueError("no vectors given")
    d = vs[0].shape[0]
    if len(vs) != d or any(v.shape[0] != d for v in vs):
        raise ValueError(f"need {d} vectors of length {d}")
    out: list[np.ndarray] = []
    for v in vs:
        w = v.copy()
        for _ in range(2):
            for q in out:
                w = w - np.vdot(q, w) * q
        n = np.linalg.norm(w)
        if n < tol.ALGEBRAIC:
            raise ValueError("vectors are linearly dependent")
        out.append(w / n)
    return np.column_stack(out)


def eigenbasis(h: np.ndarray) -> np.ndarray:
    """Eigenbasis of a Hermitian observable, columns ordered by descending eigenvalue.

    Degenerate spectra are rejected since outcome labels would be ambiguous.
    """
    h = np.asarray(h, dtype=complex)
    if np.max(np.abs(h - h.conj().T), initial=0.0) > tol.ALGEBRAIC:
        raise ValueError("observable is not Hermitian")
    w, v = np.linalg.eigh(h)
    if h.shape[0] > 1 and np.min(np.diff(w)) < tol.STRUCTURAL:
        raise ValueError("observable has a degenerate spectrum")
    return v[:, ::-1]


def fourier_basis(d: int) -> np.ndarray:
    k = np.arange(d)
    return np.exp(2j * np.pi * np.outer(k, k) / d) / np.sqrt(d)


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
