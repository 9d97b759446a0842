import json
import math

import numpy as np
import pytest

from mutunc import scenario_io as io
from mutunc import scenarios as sc
from mutunc.relations import EnsembleScenario, evaluate


def _close(a, b):
    return np.max(np.abs(np.asarray(a) - np.asarray(b))) <= 1e-12


@pytest.mark.parametrize("make", [
    lambda: sc.example_sec4().scenario,
    lambda: sc.theorem2_family(3, 0).scenario,
    lambda: sc.random_scenario(2, "mixed", 1).scenario,
    lambda: sc.random_scenario(3, "pure", 2, n_alice=0).scenario,
])
def test_round_trip(make, tmp_path):
    s = make()
    s.params["alpha"] = math.inf
    t = io.load(io.save(s, tmp_path / "s.json"))
    assert t.dim == s.dim and t.label == s.label
    assert _close(t.state, s.state)
    for x, y in zip(s.alice_bases + s.bob_bases, t.alice_bases + t.bob_bases):
        assert _close(x, y)
    assert t.params["alpha"] == math.inf
    if "V" in s.params:
        assert _close(t.params["V"], s.params["V"])
    if len(s.alice_bases) == 1:
        assert evaluate("one-vs-two", t).slack == pytest.approx(evaluate("one-vs-two", s).slack, abs=1e-12)


def test_ensemble_round_trip():
    e = sc.shared_eigenvector_ensemble(3)
    t = io.loads(io.dumps(e))
    assert isinstance(t, EnsembleScenario)
    assert np.allclose(t.ensemble.weights, e.ensemble.weights)
    assert evaluate("hall", t).slack == pytest.approx(evaluate("hall", e).slack, abs=1e-12)


def test_observables_become_eigenbases():
    doc = {
        "dim": 2,
        "state": {"ket": [1, 0]},
        "bob_observables": [[[1, 0], [0, -1]], [[0, 1], [1, 0]]],
    }
    s = io.scenario_from_dict(doc)
    r = evaluate("mu", s)
    assert r.lhs == pytest.approx(1.0) and r.rhs == pytest.approx(1.0)


def test_syntax_error_reports_line_and_column():
    with pytest.raises(io.ScenarioParseError) as ei:
        io.loads('{\n "dim": 2,\n "state": [\n')
    assert ei.value.line is not None and ei.value.column is not None
    assert "line" in str(ei.value)


@pytest.mark.parametrize("doc, field", [
    ({"dim": 0}, "dim"),
    ({"dim": 2, "format": "other"}, "format"),
    ({"dim": 2, "state": {"ket": [1, 0, 0]}}, "state.ket"),
    ({"dim": 2, "state": {"ket": [1, 1]}}, "state.ket"),
    ({"dim": 2, "state": {"ket": [1, 0]}, "bob_bases": [[[1, 0], [1, 0]]]}, "bob_bases[0]"),
    ({"dim": 2, "state": {"ket": [1, 0]}, "bob_bases": [[[1, 0], [0, "x"]]]}, "bob_bases[0][1][1]"),
    ({"dim": 2, "state": {"density": [[1, 0], [0, 1]]}}, "state.density"),
    ({"dim": 2, "state": {"ket": [1, 0]}, "bob_observables": [[[1, 0], [0, 1]]]}, "bob_observables[0]"),
    ({"dim": 2, "state": {"ket": [1, 0]}, "bob_bases": [], "bob_observables": []}, "bob_bases"),
    ({"dim": 2, "state": {}}, "state"),
])
def test_field_errors(doc, field):
    with pytest.raises(io.ScenarioParseError) as ei:
        io.scenario_from_dict(doc)
    assert ei.value.path == field


def test_top_level_must_be_object():
    with pytest.raises(io.ScenarioParseError):
        io.loads(json.dumps([1, 2]))
