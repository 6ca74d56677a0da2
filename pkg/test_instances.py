#!/usr/bin/env python3
"""
Tests for instance file parsing and validation
"""

import json
import sys
from fractions import Fraction
from pathlib import Path

import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from src.core.errors import NotALieAlgebra, ParseError
from src.core.instances import InstanceSpec, load_instance, parse_instance
from src.core.lie_groups import LieAlgebra3
from src.core.metric_jets import CirculantJet
from src.core.tensor3 import ArithmeticMode


INSTANCES = Path(__file__).parent / "data" / "instances"


def test_family_instance():
    spec = load_instance(INSTANCES / "lie_family1.json")
    assert spec.kind == "lie-family"
    assert spec.mode is ArithmeticMode.EXACT
    alg = spec.build()
    assert isinstance(alg, LieAlgebra3)
    assert alg.name == "family1"
    assert spec.payload.params().lambdas == ("1", "0", "0")


def test_circulant_jet_defaults_to_zero_derivatives():
    spec = load_instance(INSTANCES / "constant_circulant.json")
    cj = spec.build()
    assert isinstance(cj, CirculantJet)
    assert cj.A == 2 and cj.B == 1
    assert all(v == 0 for v in cj.dA)
    assert all(v == 0 for v in cj.d2B.ravel())


def test_decimal_strings_are_exact():
    spec = parse_instance({
        "kind": "circulant-jet",
        "payload": {"A": "0.3", "B": 0.1, "dA": ["1/3", 0, 0]},
    })
    cj = spec.build()
    assert cj.A == Fraction(3, 10)
    assert cj.B == Fraction(1, 10)
    assert cj.dA[0] == Fraction(1, 3)


def test_arithmetic_override():
    spec = load_instance(INSTANCES / "lie_family2.json").with_arithmetic("float")
    assert spec.mode is ArithmeticMode.FLOAT
    assert spec.build().constants.dtype == float
    assert spec.with_arithmetic(None) is spec


def test_custom_brackets():
    spec = load_instance(INSTANCES / "lie_custom_heisenberg.json")
    alg = spec.build()
    assert alg.name == "heisenberg"
    assert alg.constants[0, 1, 2] == 1
    assert alg.constants[1, 0, 2] == -1


def test_jacobi_violation_surfaces_at_build():
    spec = load_instance(INSTANCES / "not_a_lie_algebra.json")
    with pytest.raises(NotALieAlgebra):
        spec.build()


def test_to_dict_uses_the_file_keys():
    data = load_instance(INSTANCES / "lie_family1.json").to_dict()
    assert data == {
        "kind": "lie-family",
        "arithmetic": "exact",
        "payload": {"family": 1, "lambda": ["1", "0", "0"]},
    }
    assert parse_instance(data).to_dict() == data


@pytest.mark.parametrize("name", ["malformed", "wrong_arity"])
def test_bad_fixture_files(name):
    with pytest.raises(ParseError):
        load_instance(INSTANCES / f"{name}.json")


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        load_instance(tmp_path / "absent.json")


@pytest.mark.parametrize("document", [
    {"kind": "sphere", "payload": {}},
    {"kind": "lie-family", "payload": {"family": 3, "lambda": [1, 0]}},
    {"kind": "lie-family", "payload": {"family": 1, "lambda": [1, "x", 0]}},
    {"kind": "circulant-jet", "payload": {"A": 2}},
    {"kind": "circulant-jet", "payload": {"A": 2, "B": 1, "dA": [1, 0]}},
    {"kind": "circulant-jet", "payload": {"A": 2, "B": 1}, "arithmetic": "interval"},
    {"kind": "lie-custom", "payload": {"brackets": {"21": [0, 0, 1]}}},
    {"kind": "lie-family", "payload": {"family": 1, "lambda": [1, 0, 0], "extra": True}},
    [1, 2, 3],
])
def test_invalid_documents(document):
    with pytest.raises(ParseError):
        parse_instance(document)


def test_file_written_by_hand(tmp_path):
    path = tmp_path / "jet.json"
    path.write_text(json.dumps({
        "kind": "circulant-jet",
        "arithmetic": "float",
        "payload": {"A": 3, "B": "1/2", "d2B": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]},
    }), encoding="utf-8")
    spec = load_instance(path)
    assert isinstance(spec, InstanceSpec)
    cj = spec.build()
    assert cj.B == 0.5
    assert cj.d2B[2, 2] == 1.0
