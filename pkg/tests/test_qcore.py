import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from mutunc.qcore import (
    as_density, check_basis, check_density, computational_basis, eigenbasis, fourier_basis,
    gram_schmidt, ket_to_density, maximally_entangled, partial_trace, projector, random_unitary,
    schmidt_state, tensor_product, unitarity_error, unitary_from_unit_vector,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_tensor_index_order_matches_brute_force():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    b = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
    out = tensor_product(a, b)
    for i in range(2):
        for j in range(4):
            for k in range(3):
                for m in range(2):
                    assert np.isclose(out[i * 4 + j, k * 2 + m], a[i, k] * b[j, m], rtol=0, atol=1e-14)


def test_partial_trace_product_state():
    rho_a = np.diag([0.25, 0.75]).astype(complex)
    rho_b = np.array([[0.5, 0.5j], [-0.5j, 0.5]])
    rho = np.kron(rho_a, rho_b)
    assert np.allclose(partial_trace(rho, (2, 2), "A"), rho_b)
    assert np.allclose(partial_trace(rho, (2, 2), "B"), rho_a)


def test_partial_trace_unequal_dims():
    rho_a = ket_to_density(np.array([1, 1j, 0]) / np.sqrt(2))
    rho_b = np.eye(2) / 2
    rho = np.kron(rho_a, rho_b)
    assert np.allclose(partial_trace(rho, (3, 2), "B"), rho_a)
    assert np.allclose(partial_trace(rho, (3, 2), "A"), rho_b)
    with pytest.raises(ValueError):
        partial_trace(rho, (2, 2))
    with pytest.raises(ValueError):
        partial_trace(rho, (3, 2), "C")


@pytest.mark.parametrize("d", [2, 3, 5])
def test_maximally_entangled_marginals(d):
    rho = ket_to_density(maximally_entangled(d))
    for side in "AB":
        assert np.allclose(partial_trace(rho, (d, d), side), np.eye(d) / d, atol=1e-12)


def test_schmidt_state_weights():
    lam = [0.1, 0.2, 0.7]
    rng = np.random.default_rng(3)
    a, b = random_unitary(3, rng), random_unitary(3, rng)
    psi = schmidt_state(lam, a, b)
    rho_b = partial_trace(ket_to_density(psi), (3, 3), "A")
    assert np.allclose(np.sort(np.linalg.eigvalsh(rho_b)), sorted(lam), atol=1e-12)
    with pytest.raises(ValueError):
        schmidt_state([0.5, 0.6])
    with pytest.raises(ValueError):
        schmidt_state([1.5, -0.5])


def test_check_density_rejects():
    check_density(np.eye(3) / 3)
    with pytest.raises(ValueError, match="trace"):
        check_density(np.eye(2))
    with pytest.raises(ValueError, match="Hermitian"):
        check_density(np.array([[0.5, 0.1], [0.2, 0.5]]))
    with pytest.raises(ValueError, match="negative"):
        check_density(np.diag([1.5, -0.5]))
    with pytest.raises(ValueError):
        check_density(np.ones(3))


def test_as_density_accepts_ket_and_matrix():
    psi = np.array([0.6, 0.8j])
    assert np.allclose(as_density(psi), ket_to_density(psi))
    assert np.allclose(as_density(np.eye(2) / 2), np.eye(2) / 2)


def test_projector():
    p = projector(np.array([1, 1j]) / np.sqrt(2))
    assert np.allclose(p @ p, p, atol=1e-12)
    with pytest.raises(ValueError):
        projector(np.zeros(2))
    with pytest.raises(ValueError):
        projector(np.array([1.0, 1.0]))


def test_decoder_zero_genes_is_identity():
    for d in range(1, 6):
        assert np.allclose(unitary_from_unit_vector(np.zeros(d * d)), np.eye(d))


def test_decoder_d1_is_phase():
    assert np.isclose(unitary_from_unit_vector([0.25])[0, 0], 1j)


def test_decoder_rejects_non_square_length():
    with pytest.raises(ValueError):
        unitary_from_unit_vector(np.zeros(5))


@given(seeds, st.integers(min_value=1, max_value=6))
@settings(max_examples=60, deadline=None)
def test_decoder_unitary_for_any_genes(seed, d):
    x = np.random.default_rng(seed).uniform(-0.5, 1.5, size=d * d)  # clamped
    assert unitarity_error(unitary_from_unit_vector(x)) < 1e-10


def test_decoder_batch_matches_single():
    x = np.random.default_rng(1).random((7, 16))
    batch = unitary_from_unit_vector(x)
    for k in range(7):
        assert np.allclose(batch[k], unitary_from_unit_vector(x[k]))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_decoder_haar_moments(d):
    # Haar moments: E|tr U|^2 = 1, E|tr U|^4 = 2 for d >= 2
    rng = np.random.default_rng(11)
    u = unitary_from_unit_vector(rng.random((100_000, d * d)))
    t = np.abs(np.trace(u, axis1=-2, axis2=-1)) ** 2
    assert abs(t.mean() - 1.0) < 0.05
    assert abs((t ** 2).mean() - 2.0) < 0.15


@pytest.mark.parametrize("d", [2, 3, 4])
def test_decoder_entry_distribution(d):
    # |U_ij|^2 of a Haar unitary is Beta(1, d-1) for every i, j
    rng = np.random.default_rng(5)
    u = unitary_from_unit_vector(rng.random((20_000, d * d)))
    for i, j in [(0, 0), (d - 1, 0), (0, d - 1), (d // 2, d - 1)]:
        res = stats.kstest(np.abs(u[:, i, j]) ** 2, stats.beta(1, d - 1).cdf)
        assert res.pvalue > 1e-3, (i, j, res)


def test_gram_schmidt_orthonormal_and_span():
    rng = np.random.default_rng(2)
    vs = [rng.normal(size=4) + 1j * rng.normal(size=4) for _ in range(4)]
    q = gram_schmidt(vs)
    check_basis(q, atol=1e-12)
    # first column is parallel to the first input
    assert np.isclose(abs(np.vdot(q[:, 0], vs[0])), np.linalg.norm(vs[0]))
    with pytest.raises(ValueError):
        gram_schmidt([vs[0], 2 * vs[0], vs[2], vs[3]])


def test_eigenbasis_order_and_degeneracy():
    b = eigenbasis(np.diag([1.0, 3.0, 2.0]))
    assert np.allclose(np.abs(b), np.eye(3)[:, [1, 2, 0]])
    with pytest.raises(ValueError):
        eigenbasis(np.eye(2))


def test_fourier_basis_is_mutually_unbiased_with_computational():
    for d in (2, 3, 7):
        f = fourier_basis(d)
        check_basis(f, atol=1e-12)
        assert np.allclose(np.abs(computational_basis(d).conj().T @ f) ** 2, 1 / d)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_u_otimes_u_conj_fixes_phi_plus(d):
    rng = np.random.default_rng(d)
    phi = maximally_entangled(d)
    for _ in range(50):
        u = random_unitary(d, rng)
        assert np.max(np.abs(np.kron(u, u.conj()) @ phi - phi)) < 1e-10
