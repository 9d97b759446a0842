"""Concrete states and measurement families, with pinned expectations.

Each :class:`NamedScenario` may carry :class:`Expectation` entries that the
``repro`` command checks.  Expectation keys are either ``"<relation>.<field>"``
(field one of ``lhs``, ``rhs``, ``slack``, ``violated``) or one of the
scenario-level quantities in :data:`QUANTITIES`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import coefficients as co
from .infomeasures import Ensemble, joint_distribution, mutual_information
from .qcore import (
    PAULI_X, PAULI_Z, computational_basis, eigenbasis, fourier_basis, ket_to_density,
    maximally_entangled, random_unitary, schmidt_state,
)
from .relations import EnsembleScenario, MeasurementScenario, evaluate

PUBLISHED = "published"
COMPUTED = "computed"
IDENTITY = "identity"


@dataclass(frozen=True)
class Expectation:
    key: str
    value: float | bool
    tolerance: float = 1e-9
    source: str = PUBLISHED


@dataclass
class NamedScenario:
    id: str
    scenario: MeasurementScenario | EnsembleScenario
    expected: tuple[Expectation, ...] = ()
    notes: str = ""
    meta: dict = field(default_factory=dict)


# -- scenario-level quantities ---------------------------------------------

def _mi_first_pair(s: MeasurementScenario) -> float:
    return mutual_information(joint_distribution(s.state, s.alice_bases[0], s.bob_bases[0]))


def _mi_on_phi_plus(s: MeasurementScenario) -> float:
    return mutual_information(joint_distribution(maximally_entangled(s.dim), s.alice_bases[0], s.bob_bases[0]))


def _mi_second_pair(s: MeasurementScenario) -> float:
    a = s.alice_bases[-1]
    return mutual_information(joint_distribution(s.state, a, s.bob_bases[1]))


QUANTITIES: dict[str, Callable] = {
    "mi": _mi_first_pair,
    "mi_second": _mi_second_pair,
    "mi_phi_plus": _mi_on_phi_plus,
    "coeff_a": lambda s: co.coeff_a(co.overlap_matrix(*s.bob_bases[:2])),
    "coeff_c": lambda s: co.coeff_c(co.overlap_matrix(*s.bob_bases[:2])),
    "sum_sq": lambda s: co.sum_sq(co.overlap_matrix(*s.bob_bases[:2])),
}


def measure(named: NamedScenario, key: str, **opts) -> float | bool:
    """Compute the quantity an expectation refers to."""
    if key in QUANTITIES:
        return QUANTITIES[key](named.scenario)
    relation, _, attr = key.rpartition(".")
    report = evaluate(relation, named.scenario, **opts)
    return getattr(report, attr)


def check_expectations(named: NamedScenario, **opts) -> list[tuple[Expectation, float | bool, bool]]:
    out = []
    for e in named.expected:
        got = measure(named, e.key, **opts)
        if isinstance(e.value, bool):
            ok = bool(got) == e.value
        else:
            ok = abs(float(got) - float(e.value)) <= e.tolerance
        out.append((e, got, ok))
    return out


# -- families ------------------------------------------------------------------

def shared_eigenvector_bases(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Computational basis and ``{|0>, |j~>}`` with ``|j~>`` the ``(d-1)``-point Fourier vectors on ``|1>..|d-1>``."""
    b2 = np.zeros((d, d), dtype=complex)
    b2[0, 0] = 1.0
    b2[1:, 1:] = fourier_basis(d - 1)
    return computational_basis(d), b2


def shared_eigenvector_family(d: int, weights=None) -> NamedScenario:
    """Correlated diagonal state ``sum p_i |ii><ii|`` with Bob's bases sharing ``|0>``.

    ``weights`` default to uniform (the lhs is not pinned for other choices).
    """
    if d < 3:
        raise ValueError("the shared-eigenvector family needs d >= 3")
    p = np.full(d, 1.0 / d) if weights is None else np.asarray(weights, dtype=float)
    b1, b2 = shared_eigenvector_bases(d)
    rho = sum(p[i] * np.kron(ket_to_density(b1[:, i]), ket_to_density(b1[:, i])) for i in range(d))
    s = MeasurementScenario(d, rho, (computational_basis(d),), (b1, b2), label=f"shared eigenvector d={d}")
    lg = math.log2(d)
    expected = (
        Expectation("coeff_c", 2.0, 1e-12),
        Expectation("one-vs-two.rhs", lg + 1.0, 1e-12),
        Expectation("hall.rhs", 2 * lg, 1e-12),
        Expectation("one-vs-two.violated", False),
    )
    return NamedScenario(f"shared_eigenvector_d{d}", s, expected,
                         notes="uniform weights chosen by default", meta={"weights": "uniform"})


def shared_eigenvector_ensemble(d: int, weights=None) -> EnsembleScenario:
    """Alice's computational measurement on the correlated state steers ``{p_i, |i><i|}``."""
    p = np.full(d, 1.0 / d) if weights is None else np.asarray(weights, dtype=float)
    b1, b2 = shared_eigenvector_bases(d)
    states = tuple(ket_to_density(b1[:, i]) for i in range(d))
    return EnsembleScenario(Ensemble(p, states), (b1, b2), label=f"shared eigenvector ensemble d={d}")


def example_bases() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The qutrit bases of the worked counterexample: ``A``, ``B1`` computational, ``B2`` explicit."""
    r = 1 / math.sqrt(2)
    b2 = np.array([[r, r, 0], [0.5, -0.5, r], [-0.5, 0.5, r]], dtype=complex).T
    return computational_basis(3), computational_basis(3), b2


def example_sec4() -> NamedScenario:
    """Qutrit state ``(|a1>|b1_3> + |a2>|b2_1>)/sqrt 2`` violating the sum-of-squares bound."""
    a, b1, b2 = example_bases()
    psi = (np.kron(a[:, 0], b1[:, 2]) + np.kron(a[:, 1], b2[:, 0])) / math.sqrt(2)
    s = MeasurementScenario(3, psi, (a,), (b1, b2), label="qutrit counterexample")
    expected = (
        Expectation("sum-sq.lhs", 2.0),
        Expectation("sum-sq.rhs", math.log2(15 / 4)),
        Expectation("sum-sq.violated", True),
        Expectation("one-vs-two.rhs", math.log2(9 / 2), source=COMPUTED),
        Expectation("one-vs-two.violated", False),
        Expectation("mi", 1.0, 1e-12, COMPUTED),
        Expectation("mi_second", 1.0, 1e-12, COMPUTED),
        Expectation("coeff_c", 1.5, 1e-12, COMPUTED),
        Expectation("sum_sq", 1.25, 1e-12),
    )
    return NamedScenario("example_sec4", s, expected)


def xz_bases() -> tuple[np.ndarray, np.ndarray]:
    """Eigenbases of ``X + Z`` (Alice) and ``X - Z`` (Bob), descending eigenvalue order."""
    return eigenbasis(PAULI_X + PAULI_Z), eigenbasis(PAULI_X - PAULI_Z)


def nonmaximal_xz() -> NamedScenario:
    """``sqrt(0.0332)|00> + sqrt(0.9668)|11>`` measured in the ``X+Z`` / ``X-Z`` eigenbases."""
    a, b = xz_bases()
    psi = schmidt_state([0.0332, 0.9668])
    s = MeasurementScenario(2, psi, (a,), (b,), label="nonmaximally entangled qubits")
    expected = (
        Expectation("mi", 0.049, 1e-3),
        Expectation("mi_phi_plus", 0.0, 1e-9),
    )
    return NamedScenario("nonmaximal_xz", s, expected)


def lemma1_family(d: int, seed: int, correlated: bool = False) -> NamedScenario:
    """State ``sum_ki p_ki P_k (x) Q1_i`` diagonal in Alice's and Bob's first basis.

    With ``correlated=True`` the weights are diagonal, ``sum_i p_i P_i (x) Q1_i``.
    """
    if d < 2:
        raise ValueError("d >= 2 required")
    rng = np.random.default_rng([seed, d, 1])
    a, b1, b2 = (random_unitary(d, rng) for _ in range(3))
    if correlated:
        p = np.diag(rng.dirichlet(np.ones(d)))
    else:
        p = rng.dirichlet(np.ones(d * d)).reshape(d, d)
    rho = np.zeros((d * d, d * d), dtype=complex)
    for k in range(d):
        pk = ket_to_density(a[:, k])
        for i in range(d):
            if p[k, i] > 0:
                rho += p[k, i] * np.kron(pk, ket_to_density(b1[:, i]))
    s = MeasurementScenario(d, rho, (a,), (b1, b2), label=f"diagonal state d={d} seed={seed}",
                            params={"weights": p})
    return NamedScenario(f"lemma1_d{d}_s{seed}", s, meta={"correlated": correlated})


def theorem2_family(d: int, seed: int) -> NamedScenario:
    """Maximally entangled ``(I (x) V)|Phi+>`` with random ``V`` and four random bases."""
    rng = np.random.default_rng([seed, d, 2])
    v = random_unitary(d, rng)
    a1, a2, b1, b2 = (random_unitary(d, rng) for _ in range(4))
    s = MeasurementScenario(d, maximally_entangled(d, v), (a1, a2), (b1, b2),
                            label=f"maximally entangled d={d} seed={seed}", params={"V": v})
    return NamedScenario(f"theorem2_d{d}_s{seed}", s)


def random_state(dim: int, mode: str, rng: np.random.Generator) -> np.ndarray:
    """Random ket (``pure``) or Hilbert-Schmidt density matrix (``mixed``)."""
    if mode == "pure":
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        return v / np.linalg.norm(v)
    if mode == "mixed":
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        rho = g @ g.conj().T
        return rho / np.trace(rho).real
    raise ValueError(f"mode must be 'pure' or 'mixed', got {mode!r}")


def random_scenario(d: int, mode: str = "pure", seed: int = 0, n_alice: int = 2,
                    n_bob: int = 2) -> NamedScenario:
    """Haar-random bases and a random shared state (fuzzing source)."""
    if not 1 <= d <= 16:
        raise ValueError("d must be between 1 and 16")
    rng = np.random.default_rng([seed, d, 3])
    alice = tuple(random_unitary(d, rng) for _ in range(n_alice))
    bob = tuple(random_unitary(d, rng) for _ in range(n_bob))
    dim = d if n_alice == 0 else d * d
    state = random_state(dim, mode, rng)
    s = MeasurementScenario(d, state, alice, bob, label=f"random d={d} {mode} seed={seed}")
    return NamedScenario(f"random_d{d}_{mode}_s{seed}", s)


# -- small saturation cases ------------------------------------------------

def qubit_mub_saturation() -> NamedScenario:
    z, x = computational_basis(2), eigenbasis(PAULI_X)
    s = MeasurementScenario(2, np.array([1, 0], dtype=complex), (), (z, x), label="|0> in Z/X")
    return NamedScenario("qubit_mub_saturation", s, (
        Expectation("mu.lhs", 1.0, 1e-12, IDENTITY),
        Expectation("mu.rhs", 1.0, 1e-12, IDENTITY),
        Expectation("mu.slack", 0.0, 1e-12, IDENTITY),
    ))


def phi_plus_aligned(d: int = 2) -> NamedScenario:
    """``|Phi+>`` with all four bases computational: two-vs-two saturates."""
    e = computational_basis(d)
    s = MeasurementScenario(d, maximally_entangled(d), (e, e), (e, e), label=f"Phi+ aligned d={d}",
                            params={"V": np.eye(d, dtype=complex)})
    lg = math.log2(d)
    return NamedScenario(f"phi_plus_aligned_d{d}", s, (
        Expectation("two-vs-two.lhs", 2 * lg, 1e-12, IDENTITY),
        Expectation("two-vs-two.rhs", 2 * lg, 1e-9, IDENTITY),
        Expectation("two-vs-two-fixed-v.slack", 0.0, 1e-12, IDENTITY),
    ))


def qubit_mub_exotic() -> NamedScenario:
    """Alice and Bob both use the Z/X pair; ``c'' = 16`` at ``p = 1/2``."""
    z, x = computational_basis(2), eigenbasis(PAULI_X)
    s = MeasurementScenario(2, maximally_entangled(2), (z, x), (z, x), label="Z/X everywhere",
                            params={"p": 0.5})
    return NamedScenario("qubit_mub_exotic", s, (
        Expectation("exotic.rhs", 2.0, 1e-12, COMPUTED),
    ))


REGISTRY: dict[str, Callable[[], NamedScenario]] = {
    "example_sec4": example_sec4,
    "nonmaximal_xz": nonmaximal_xz,
    "qubit_mub_saturation": qubit_mub_saturation,
    "qubit_mub_exotic": qubit_mub_exotic,
    "phi_plus_aligned_d2": lambda: phi_plus_aligned(2),
    "phi_plus_aligned_d3": lambda: phi_plus_aligned(3),
    **{f"shared_eigenvector_d{d}": (lambda d=d: shared_eigenvector_family(d)) for d in range(3, 9)},
}


def get(scenario_id: str) -> NamedScenario:
    try:
        return REGISTRY[scenario_id]()
    except KeyError:
        raise KeyError(f"unknown scenario id {scenario_id!r}; known: {', '.join(sorted(REGISTRY))}") from None
