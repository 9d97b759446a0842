import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mutunc import coefficients as co
from mutunc.infomeasures import INF, Ensemble
from mutunc.qcore import (
    PAULI_X, computational_basis, eigenbasis, fourier_basis, maximally_entangled, random_unitary,
)
from mutunc.relations import (
    LOWER, UPPER, EnsembleScenario, MeasurementScenario, RelationReport, eval_exotic, eval_hall,
    eval_lemma1_bound, eval_maassen_uffink, eval_max_overlap, eval_one_vs_two, eval_renyi_mu,
    eval_state_dependent_two_vs_two, eval_two_vs_two, evaluate, renyi_row_column_bound,
)
from mutunc.scenarios import lemma1_family, random_scenario, random_state, theorem2_family

seeds = st.integers(0, 2**31 - 1)
small_d = st.integers(2, 4)


def test_report_slack_orientation():
    up = RelationReport("x", lhs=1.0, rhs=0.5, sense=UPPER)
    lo = RelationReport("x", lhs=1.0, rhs=0.5, sense=LOWER)
    assert up.slack == -0.5 and up.violated
    assert lo.slack == 0.5 and not lo.violated
    deg = RelationReport("x", lhs=1.0, rhs=0.0, degenerate=True)
    assert deg.slack == math.inf and not deg.violated
    edge = RelationReport("x", lhs=1.0, rhs=1.0 - 5e-10)
    assert not edge.violated


def test_scenario_shape_validation():
    with pytest.raises(ValueError):
        MeasurementScenario(2, np.ones(3) / np.sqrt(3), (np.eye(2),), (np.eye(2), np.eye(2)))
    with pytest.raises(ValueError):
        MeasurementScenario(2, maximally_entangled(2), (np.eye(3),), (np.eye(2), np.eye(2)))
    with pytest.raises(KeyError):
        evaluate("nope", random_scenario(2).scenario)


def test_maassen_uffink_saturation():
    z, x = computational_basis(2), eigenbasis(PAULI_X)
    r = eval_maassen_uffink(np.array([1, 0]), z, x)
    assert r.lhs == pytest.approx(1.0) and r.rhs == pytest.approx(1.0)


@given(seeds, small_d, st.sampled_from(["pure", "mixed"]))
@settings(max_examples=100, deadline=None)
def test_maassen_uffink_holds(seed, d, mode):
    s = random_scenario(d, mode, seed, n_alice=0).scenario
    assert evaluate("mu", s).slack >= -1e-9


@given(seeds, small_d, st.integers(1, 6))
@settings(max_examples=100, deadline=None)
def test_hall_holds(seed, d, n):
    rng = np.random.default_rng(seed)
    ens = Ensemble(rng.dirichlet(np.ones(n)), tuple(random_state(d, "mixed", rng) for _ in range(n)))
    scn = EnsembleScenario(ens, (random_unitary(d, rng), random_unitary(d, rng)))
    assert eval_hall(scn).slack >= -1e-9


def test_hall_on_bipartite_scenario_uses_steered_ensemble():
    d = 3
    e, f = computational_basis(d), fourier_basis(d)
    s = MeasurementScenario(d, maximally_entangled(d), (e,), (e, f))
    r = evaluate("hall", s)
    # measuring Z on Alice leaves Bob in a Z eigenstate: I(B1|E) = log d, I(B2|E) = 0
    assert r.terms["I1"] == pytest.approx(math.log2(d), abs=1e-12)
    assert r.terms["I2"] == pytest.approx(0.0, abs=1e-12)
    assert r.slack == pytest.approx(0.0, abs=1e-12)


def test_renyi_infinite_order_is_a_theorem_bound():
    # alpha = inf: rhs is -log a, same as Maassen-Uffink
    rng = np.random.default_rng(0)
    b1, b2 = random_unitary(3, rng), random_unitary(3, rng)
    c = co.overlap_matrix(b1, b2)
    assert renyi_row_column_bound(c, INF) == pytest.approx(-math.log2(co.coeff_a(c)), abs=1e-12)


def test_renyi_small_order_can_fail():
    # a Z eigenstate with a slightly tilted second basis beats the alpha=0.1 bound
    th = 0.05
    z = computational_basis(2)
    b2 = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]], dtype=complex)
    r = eval_renyi_mu(np.array([1, 0]), z, b2, 0.1)
    assert r.violated
    assert not eval_renyi_mu(np.array([1, 0]), z, b2, INF).violated
    with pytest.raises(ValueError):
        eval_renyi_mu(np.array([1, 0]), z, b2, 0.0)


@given(seeds, small_d, st.booleans())
@settings(max_examples=100, deadline=None)
def test_diagonal_state_bounds(seed, d, correlated):
    s = lemma1_family(d, seed, correlated).scenario
    for rep in (eval_lemma1_bound(s), eval_one_vs_two(s), eval_max_overlap(s)):
        assert rep.slack >= -1e-9, rep


@given(seeds, small_d)
@settings(max_examples=100, deadline=None)
def test_fixed_v_bound_holds_on_maximally_entangled(seed, d):
    s = theorem2_family(d, seed).scenario
    rep = eval_state_dependent_two_vs_two(s, s.params["V"])
    assert rep.slack >= -1e-9
    # the V-maximized coefficient can only loosen the bound
    u = co.alignment_unitary(*s.alice_bases)
    assert rep.witnesses["coefficient"] <= co.coeff_c_prime_closed_form(*s.bob_bases, u).value + 1e-12


def test_fixed_v_rejects_wrong_state():
    s = random_scenario(2, "pure", 0).scenario
    with pytest.raises(ValueError):
        eval_state_dependent_two_vs_two(s, np.eye(2))
    s = theorem2_family(2, 0).scenario
    with pytest.raises(ValueError):
        eval_state_dependent_two_vs_two(s, np.eye(2) if not np.allclose(s.params["V"], np.eye(2)) else PAULI_X)


@given(seeds, small_d)
@settings(max_examples=30, deadline=None)
def test_lhs_invariant_under_u_otimes_u_conj(seed, d):
    # rotating both of Alice's bases by U and Bob's by U* leaves |Phi+> statistics unchanged
    rng = np.random.default_rng(seed)
    s = theorem2_family(d, seed).scenario
    u = random_unitary(d, rng)
    t = MeasurementScenario(d, s.state, tuple(u @ a for a in s.alice_bases),
                            tuple(u.conj() @ b for b in s.bob_bases), params=s.params)
    phi = maximally_entangled(d)
    s0 = MeasurementScenario(d, phi, s.alice_bases, s.bob_bases)
    t0 = MeasurementScenario(d, phi, t.alice_bases, t.bob_bases)
    a = eval_two_vs_two(s0, coefficient=co.ANALYTIC)
    b = eval_two_vs_two(t0, coefficient=co.ANALYTIC)
    assert a.lhs == pytest.approx(b.lhs, abs=1e-10)


def test_two_vs_two_routes_agree_on_random_scenarios():
    for seed in range(3):
        s = random_scenario(2, "pure", seed).scenario
        exact = eval_two_vs_two(s, coefficient=co.ANALYTIC)
        ga = eval_two_vs_two(s, co.OptimizerBudget(generations=300))
        assert ga.rhs <= exact.rhs + 1e-9
        assert ga.rhs == pytest.approx(exact.rhs, abs=1e-5)
        assert ga.lhs == exact.lhs


def test_two_vs_two_saturates_on_aligned_phi_plus():
    e = computational_basis(3)
    s = MeasurementScenario(3, maximally_entangled(3), (e, e), (e, e))
    r = eval_two_vs_two(s, co.OptimizerBudget(generations=20))
    assert r.lhs == pytest.approx(2 * math.log2(3), abs=1e-12)
    assert r.slack == pytest.approx(0.0, abs=1e-9)
    assert not r.violated


def test_exotic_qubit_mub():
    z, x = computational_basis(2), eigenbasis(PAULI_X)
    s = MeasurementScenario(2, maximally_entangled(2), (z, x), (z, x))
    r = eval_exotic(s, 0.5)
    assert r.rhs == pytest.approx(2.0, abs=1e-12)
    # Z on both sides is perfectly correlated; X on both sides too (X is real)
    assert r.lhs == pytest.approx(2.0, abs=1e-12)


def test_exotic_degenerate_is_never_a_violation():
    e = computational_basis(2)
    s = MeasurementScenario(2, maximally_entangled(2), (e, e), (e, e))
    r = eval_exotic(s)
    assert r.degenerate and not r.violated


@pytest.mark.parametrize("relation", ["mu", "renyi", "hall", "one-vs-two", "sum-sq", "max-overlap",
                                      "two-vs-two", "exotic"])
def test_dispatcher_runs_every_relation(relation):
    n_alice = {"mu": 0, "renyi": 0}.get(relation, 1 if relation in ("hall", "one-vs-two", "sum-sq",
                                                                     "max-overlap") else 2)
    s = random_scenario(2, "mixed", 3, n_alice=n_alice).scenario
    rep = evaluate(relation, s, coefficient=co.ANALYTIC)
    assert rep.relation == relation
    assert math.isfinite(rep.lhs)


def test_local_relations_use_bobs_marginal_for_bipartite_states():
    s = random_scenario(3, "pure", 1, n_alice=1).scenario
    rep = evaluate("mu", s)
    # Bob's half of a generic pure state is mixed, so the entropies exceed the pure-state minimum
    assert rep.lhs > rep.rhs
