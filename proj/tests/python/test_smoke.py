"""Smoke tests for the python bindings."""

import json
import os
from pathlib import Path

import pytest

epsub = pytest.importorskip("epsub")


def test_parse_roundtrip_and_alpha():
    t = epsub.parse_term("eps x. P(x, 0)")
    assert t.is_epsilon
    assert epsub.parse_term(str(t)) == t
    assert epsub.parse_term("eps y. P(y, 0)") == t
    assert epsub.parse_term("eps x. P(x, 1)") != t


def test_translate():
    f = epsub.parse_formula("exists x. P(x, 0)")
    assert str(epsub.epsilon_translate(f)) == "P(eps x. P(x, 0), 0)"


def test_rank_degree():
    e1 = epsub.parse_term("eps x. P(x, eps y. P(y, 0))")
    assert epsub.rank(e1) == 1
    assert epsub.degree(e1) == 2
    nested = epsub.parse_term("eps y. P(eps x. Q(x, y), y)")
    assert epsub.rank(nested) == 2
    assert epsub.is_subordinate(epsub.parse_term("eps x. Q(x, y)"), nested)


def test_recognize_and_substitute():
    f = epsub.parse_formula("P(eps x. P(x, eps y. P(y,0)), 0) -> P(eps x. P(x,0), 0)")
    d = epsub.recognize_critical(f)
    assert len(d) == 1
    assert str(d[0]["epsilon"]) == "eps x. P(x, 0)"
    host = epsub.parse_formula("P(eps x. P(x, 0), 0)")
    out = epsub.substitute(host, d[0]["epsilon"], epsub.parse_term("c"))
    assert str(out) == "P(c, 0)"


def test_solve_maximal_tautology():
    system = epsub.parse_system(epsub.ackermann_loop_source())
    assert len(system) == 2
    assert epsub.measure(system) == [(1, 2), (1, 1)]
    result = epsub.solve(system, strategy="maximal", budget=100)
    assert result["status"] == "solved"
    assert result["verdict"]["tautology"] is True
    assert len(result["leaves"]) == 6


def test_solve_naive_diverges_with_loop():
    system = epsub.parse_system(epsub.ackermann_loop_source())
    result = epsub.solve(system, strategy="first-listed", budget=20)
    assert result["status"] == "diverged"
    assert result["loop_detected_at"] == 1
    assert set(result["divergence_reasons"]) == {"budget-exhausted", "loop-detected"}


def test_trace_json_validates_against_schema():
    jsonschema = pytest.importorskip("jsonschema")
    system = epsub.parse_system(epsub.identity_source())
    result = epsub.solve(system)
    doc = json.loads(result["trace_json"])
    schema_path = Path(os.environ["EPSUB_SRC"]) / "schema" / "trace.schema.json"
    jsonschema.validate(doc, json.loads(schema_path.read_text()))


def test_tautology_kernel():
    taut = epsub.is_tautology(epsub.parse_formula("P(c) -> P(c)"))
    assert taut["tautology"] is True
    counter = epsub.is_tautology(epsub.parse_formula("P(c) -> P(d)"))
    assert counter["tautology"] is False
    assert len(counter["countermodel"]) == 2


def test_herbrand_check():
    body = epsub.parse_formula("P(x) -> P(f(x))")
    c = epsub.parse_term("c")
    fc = epsub.parse_term("f(c)")
    assert epsub.herbrand_check("x", body, [c, fc])["tautology"] is True
    assert epsub.herbrand_check("x", body, [c])["tautology"] is False
