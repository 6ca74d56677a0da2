#!/usr/bin/env python3
"""
Tests for left-invariant geometry on the two Lie families and custom algebras
"""

import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from src.core.errors import NotALieAlgebra, ParseError, WrongFamily
from src.core.lie_groups import (
    FamilyParams,
    LieAlgebra3,
    connection_checks,
    family1,
    family1_oracle,
    family2,
    family2_oracle,
    family_oracle,
    koszul_connection,
    lie_geometry,
    lie_metrics,
    nabla_q_invariant,
    nabla_q_invariant_tensor,
)
from src.core.metric_jets import curvature_symmetry_check
from src.core.q_geometry import sectional_curvature
from src.core.tensor3 import ArithmeticMode, basis_vector, max_abs


EXACT = ArithmeticMode.EXACT
GOLDEN_DIR = Path(__file__).parent / "data" / "golden"

lambdas = st.fractions(min_value=-3, max_value=3, max_denominator=4)

COMPONENTS = {
    "riemann_1212": (0, 1, 0, 1),
    "riemann_1313": (0, 2, 0, 2),
    "riemann_2323": (1, 2, 1, 2),
    "riemann_1213": (0, 1, 0, 2),
    "riemann_1323": (0, 2, 1, 2),
    "riemann_1223": (0, 1, 1, 2),
}


def load_golden(name: str) -> dict:
    return json.loads((GOLDEN_DIR / f"{name}.json").read_text(encoding="utf-8"))


@pytest.mark.parametrize("name,build", [
    ("lie_family1_100", lambda: family1(1, 0, 0)),
    ("lie_family2_10", lambda: family2(1, 0)),
])
def test_associated_curvature_matches_golden(name, build):
    """Curvature, scalars, a sectional curvature and nabla Q against symbolic values"""
    golden = load_golden(name)
    lie = lie_geometry(build())
    b = lie.bundle_gt

    for key, index in COMPONENTS.items():
        assert b.riemann[index] == Fraction(golden[key]), key
    assert b.ricci[0, 0] == Fraction(golden["ricci_11"])
    assert b.ricci[0, 1] == Fraction(golden["ricci_12"])
    assert b.tau == Fraction(golden["tau"])
    assert b.tau_star == Fraction(golden["tau_star"])

    e1, e2 = basis_vector(1, EXACT), basis_vector(2, EXACT)
    assert sectional_curvature(b.riemann, lie.gt, e1, e2) == Fraction(golden["sectional_12"])

    nabla = nabla_q_invariant_tensor(lie.connection_gt)
    for i in range(3):
        for j in range(3):
            assert [nabla[i, k, j] for k in range(3)] == [Fraction(v) for v in golden["nabla_q"][i][j]]


class TestOracles:
    """Closed forms of the two families against the Koszul computation"""

    @settings(max_examples=20, deadline=None)
    @given(lambdas, lambdas, lambdas)
    def test_family1_closed_form(self, l1, l2, l3):
        lie = lie_geometry(family1(l1, l2, l3))
        oracle = family1_oracle(FamilyParams(1, (l1, l2, l3)))
        b = lie.bundle_gt
        assert (b.riemann == oracle.riemann).all()
        assert (b.ricci == oracle.ricci).all()
        assert b.tau == oracle.tau
        assert b.tau_star == 0

    @settings(max_examples=20, deadline=None)
    @given(lambdas, lambdas)
    def test_family2_closed_form(self, l1, l2):
        lie = lie_geometry(family2(l1, l2))
        oracle = family2_oracle(FamilyParams(2, (l1, l2)))
        b = lie.bundle_gt
        assert (b.riemann == oracle.riemann).all()
        assert (b.ricci == oracle.ricci).all()
        assert b.tau == -b.tau_star == oracle.tau

    @settings(max_examples=20, deadline=None)
    @given(lambdas, lambdas)
    def test_family2_q_is_parallel(self, l1, l2):
        lie = lie_geometry(family2(l1, l2))
        assert nabla_q_invariant(lie.connection_gt) == 0

    def test_oracle_dispatch_and_wrong_family(self):
        params = FamilyParams(2, (1, 0))
        assert family_oracle(params).family == 2
        with pytest.raises(WrongFamily):
            family1_oracle(params)
        with pytest.raises(WrongFamily):
            family2_oracle(FamilyParams(1, (1, 0, 0)))

    def test_float_oracle_matches_exact(self):
        params = FamilyParams(1, (Fraction(1, 2), 1, -1))
        exact = family1_oracle(params)
        approx = family1_oracle(params, ArithmeticMode.FLOAT)
        assert np.allclose(exact.riemann.astype(float), approx.riemann)
        assert approx.to_dict()["tau_star"] == 0.0


class TestAlgebras:
    """Structure constants, Jacobi identity and the Koszul connection"""

    def test_families_satisfy_jacobi(self):
        assert family1(1, 2, 3).jacobi_residual() == 0
        assert family2(Fraction(1, 2), -1).jacobi_residual() == 0

    def test_heisenberg(self):
        alg = LieAlgebra3.from_brackets({(1, 2): [0, 0, 1]}, name="heisenberg")
        assert alg.jacobi_check().holds
        g, gt = lie_metrics()
        for metric in (g, gt):
            conn = koszul_connection(alg, metric)
            assert connection_checks(conn, alg).holds
        lie = lie_geometry(alg)
        assert curvature_symmetry_check(lie.bundle_g.riemann).holds
        # Heisenberg group with the standard metric: tau = -1/2
        assert lie.bundle_g.tau == Fraction(-1, 2)

    def test_abelian_algebra_is_flat(self):
        alg = LieAlgebra3.from_brackets({})
        assert alg.is_abelian()
        lie = lie_geometry(alg)
        assert max_abs(lie.bundle_gt.riemann) == 0

    def test_jacobi_violation(self):
        with pytest.raises(NotALieAlgebra):
            LieAlgebra3.from_brackets({(1, 2): [1, 0, 0], (1, 3): [1, 0, 0], (2, 3): [0, 1, 0]})

    def test_bad_index_pair(self):
        with pytest.raises(ParseError):
            LieAlgebra3.from_brackets({(2, 1): [0, 0, 1]})

    def test_family_arity(self):
        with pytest.raises(ParseError):
            FamilyParams(2, (1, 2, 3))
        with pytest.raises(ParseError):
            FamilyParams(3, (1,))

    def test_bracket(self):
        alg = family1(1, 0, 0)
        x1, x2 = basis_vector(1, EXACT), basis_vector(2, EXACT)
        assert list(alg.bracket(x1, x2)) == [1, 0, 0]
