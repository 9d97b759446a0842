"""JSON scenario files.

Complex numbers are ``[re, im]`` pairs written with full double precision.
A basis is a list of ``d`` vectors; observables (Hermitian matrices) may be
given instead of bases and are replaced by their eigenbases, outcomes
labelled by descending eigenvalue.  Example::

    {
      "format": "mutunc-scenario/1",
      "dim": 2,
      "state": {"ket": [[0.7071, 0], [0, 0], [0, 0], [0.7071, 0]]},
      "alice_bases": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]],
      "bob_observables": [[[[1, 0], [0, 0]], [[0, 0], [-1, 0]]], ...],
      "params": {"alpha": 2.0}
    }

An ``"ensemble"`` block (``weights`` plus density ``states``) together with
``bob_bases`` describes an ensemble scenario instead.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .infomeasures import Ensemble
from .qcore import check_basis, check_density, eigenbasis
from .relations import EnsembleScenario, MeasurementScenario

FORMAT = "mutunc-scenario/1"


class ScenarioParseError(ValueError):
    """Malformed scenario file; carries the offending line/column or field path."""

    def __init__(self, message: str, *, path: str = "", line: int | None = None, column: int | None = None):
        self.path, self.line, self.column = path, line, column
        where = []
        if line is not None:
            where.append(f"line {line}, column {column}")
        if path:
            where.append(f"field {path}")
        super().__init__(f"{'; '.join(where)}: {message}" if where else message)


# -- encoding ------------------------------------------------------------------

def _c(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def encode_vector(v) -> list:
    return [_c(z) for z in np.asarray(v).reshape(-1)]


def encode_matrix(m) -> list:
    return [[_c(z) for z in row] for row in np.asarray(m)]


def encode_basis(b) -> list:
    return [encode_vector(b[:, k]) for k in range(np.asarray(b).shape[1])]


def _encode_param(v):
    if isinstance(v, np.ndarray):
        return {"matrix": encode_matrix(v)} if v.ndim == 2 else {"vector": encode_vector(v)}
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


def scenario_to_dict(s: MeasurementScenario | EnsembleScenario) -> dict:
    if isinstance(s, EnsembleScenario):
        return {
            "format": FORMAT, "dim": s.dim, "label": s.label,
            "ensemble": {"weights": [float(w) for w in s.ensemble.weights],
                         "states": [encode_matrix(r) for r in s.ensemble.states]},
            "bob_bases": [encode_basis(b) for b in s.bob_bases],
        }
    state = s.state
    st = {"ket": encode_vector(state)} if state.ndim == 1 else {"density": encode_matrix(state)}
    return {
        "format": FORMAT, "dim": s.dim, "label": s.label, "state": st,
        "alice_bases": [encode_basis(b) for b in s.alice_bases],
        "bob_bases": [encode_basis(b) for b in s.bob_bases],
        "params": {k: _encode_param(v) for k, v in s.params.items()},
    }


def dumps(s) -> str:
    return json.dumps(scenario_to_dict(s), indent=1)


def save(s, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(dumps(s) + "\n")
    return path


# -- decoding ------------------------------------------------------------------

def _complex(x: Any, path: str) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in x):
        return complex(x[0], x[1])
    raise ScenarioParseError("expected a number or an [re, im] pair", path=path)


def _vector(x: Any, path: str, n: int | None = None) -> np.ndarray:
    if not isinstance(x, list):
        raise ScenarioParseError("expected a list of complex entries", path=path)
    if n is not None and len(x) != n:
        raise ScenarioParseError(f"expected {n} entries, got {len(x)}", path=path)
    return np.array([_complex(z, f"{path}[{i}]") for i, z in enumerate(x)], dtype=complex)


def _matrix(x: Any, path: str, n: int) -> np.ndarray:
    if not isinstance(x, list) or len(x) != n:
        raise ScenarioParseError(f"expected {n} rows", path=path)
    return np.array([_vector(r, f"{path}[{i}]", n) for i, r in enumerate(x)])


def _basis(x: Any, path: str, d: int) -> np.ndarray:
    if not isinstance(x, list) or len(x) != d:
        raise ScenarioParseError(f"expected {d} basis vectors", path=path)
    b = np.column_stack([_vector(v, f"{path}[{i}]", d) for i, v in enumerate(x)])
    try:
        check_basis(b)
    except ValueError as e:
        raise ScenarioParseError(str(e), path=path) from None
    return b


def _bases(doc: dict, party: str, d: int) -> tuple[np.ndarray, ...]:
    key_b, key_o = f"{party}_bases", f"{party}_observables"
    if key_b in doc and key_o in doc:
        raise ScenarioParseError(f"give either {key_b} or {key_o}, not both", path=key_b)
    if key_o in doc:
        out = []
        for i, m in enumerate(_list(doc[key_o], key_o)):
            try:
                out.append(eigenbasis(_matrix(m, f"{key_o}[{i}]", d)))
            except ValueError as e:
                raise ScenarioParseError(str(e), path=f"{key_o}[{i}]") from None
        return tuple(out)
    return tuple(_basis(b, f"{key_b}[{i}]", d) for i, b in enumerate(_list(doc.get(key_b, []), key_b)))


def _list(x, path):
    if not isinstance(x, list):
        raise ScenarioParseError("expected a list", path=path)
    return x


def _param(k: str, v: Any, d: int):
    path = f"params.{k}"
    if v == "inf":
        return math.inf
    if isinstance(v, dict) and "matrix" in v:
        return _matrix(v["matrix"], path + ".matrix", d)
    if isinstance(v, dict) and "vector" in v:
        return _vector(v["vector"], path + ".vector")
    if isinstance(v, (int, float, str, bool)):
        return v
    raise ScenarioParseError("unsupported parameter value", path=path)


def scenario_from_dict(doc: Any) -> MeasurementScenario | EnsembleScenario:
    if not isinstance(doc, dict):
        raise ScenarioParseError("top level must be an object")
    fmt = doc.get("format", FORMAT)
    if fmt != FORMAT:
        raise ScenarioParseError(f"unsupported format {fmt!r}", path="format")
    d = doc.get("dim")
    if not isinstance(d, int) or isinstance(d, bool) or not 1 <= d <= 16:
        raise ScenarioParseError("dim must be an integer between 1 and 16", path="dim")
    label = str(doc.get("label", ""))
    bob = _bases(doc, "bob", d)
    if "ensemble" in doc:
        ens = doc["ensemble"]
        if not isinstance(ens, dict):
            raise ScenarioParseError("expected an object", path="ensemble")
        w = _list(ens.get("weights"), "ensemble.weights")
        states = [_matrix(r, f"ensemble.states[{i}]", d) for i, r in enumerate(_list(ens.get("states"), "ensemble.states"))]
        try:
            for i, r in enumerate(states):
                check_density(r)
            return EnsembleScenario(Ensemble(np.asarray(w, dtype=float), tuple(states)), bob, label)
        except ValueError as e:
            raise ScenarioParseError(str(e), path="ensemble") from None
    alice = _bases(doc, "alice", d)
    st = doc.get("state")
    if not isinstance(st, dict) or len(st) != 1 or not ({"ket", "density"} & set(st)):
        raise ScenarioParseError("state must be {\"ket\": [...]} or {\"density\": [[...]]}", path="state")
    n = d if not alice else d * d
    if "ket" in st:
        state = _vector(st["ket"], "state.ket", n)
        norm = np.linalg.norm(state)
        if abs(norm - 1) > 1e-8:
            raise ScenarioParseError(f"ket has norm {norm:.12g}", path="state.ket")
    else:
        state = _matrix(st["density"], "state.density", n)
        try:
            check_density(state)
        except ValueError as e:
            raise ScenarioParseError(str(e), path="state.density") from None
    params_doc = doc.get("params", {})
    if not isinstance(params_doc, dict):
        raise ScenarioParseError("expected an object", path="params")
    params = {k: _param(k, v, d) for k, v in params_doc.items()}
    try:
        return MeasurementScenario(d, state, alice, bob, label, params)
    except ValueError as e:
        raise ScenarioParseError(str(e)) from None


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioParseError(e.msg, line=e.lineno, column=e.colno) from None
    return scenario_from_dict(doc)


def load(path: str | Path):
    return loads(Path(path).read_text())
