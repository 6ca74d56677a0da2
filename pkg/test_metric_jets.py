#!/usr/bin/env python3
"""
Tests for the pointwise curvature engine

Christoffel symbols are checked against the committed golden file and the
curvature of a non-constant circulant metric against a symbolic
computation done with sympy from the closed-form metric.
"""

import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from src.core.classifier import check_con_ae
from src.core.errors import DegenerateAssociated, ParseError, PositivityViolation
from src.core.metric_jets import (
    CirculantJet,
    MetricJet2,
    associated_jet,
    christoffel,
    circulant_bundles,
    circulant_to_jet,
    compatibility_residual,
    curvature_bundle,
    curvature_symmetry_check,
    nabla_q,
    riemann_tensor,
)
from src.core.samplers import make_rng, random_circulant_jet, random_metric_jet
from src.core.tensor3 import ArithmeticMode, circulant_sym, max_abs


EXACT = ArithmeticMode.EXACT
FLOAT = ArithmeticMode.FLOAT
GOLDEN_DIR = Path(__file__).parent / "data" / "golden"
X = sp.symbols("x1 x2 x3")


def _fraction(value) -> Fraction:
    value = sp.nsimplify(value)
    return Fraction(int(sp.numer(value)), int(sp.denom(value)))


def symbolic_riemann(g: sp.Matrix) -> np.ndarray:
    """R_ijkl = g(R(e_i, e_j) e_k, e_l) at the origin, as exact fractions"""
    origin = {x: 0 for x in X}
    g_inv = g.inv()
    gamma = [[[sp.simplify(sum(
        g_inv[k, l] * (sp.diff(g[j, l], X[i]) + sp.diff(g[i, l], X[j]) - sp.diff(g[i, j], X[l]))
        for l in range(3)) / 2) for j in range(3)] for i in range(3)] for k in range(3)]
    R = np.empty((3, 3, 3, 3), dtype=object)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                op = [
                    sp.diff(gamma[m][j][k], X[i]) - sp.diff(gamma[m][i][k], X[j])
                    + sum(gamma[m][i][l] * gamma[l][j][k] - gamma[m][j][l] * gamma[l][i][k] for l in range(3))
                    for m in range(3)
                ]
                for l in range(3):
                    R[i, j, k, l] = _fraction(sum(op[m] * g[m, l] for m in range(3)).subs(origin))
    return R


def nonconstant_jet() -> CirculantJet:
    """Jet of A = 2 + x1 + x2^2, B = 1 at the origin"""
    return CirculantJet.from_values(2, 1, dA=[1, 0, 0], d2A=[[0, 0, 0], [0, 2, 0], [0, 0, 0]])


def test_christoffel_matches_golden():
    """A = 2 + x1, B = 1: connection coefficients at the origin"""
    golden = json.loads((GOLDEN_DIR / "christoffel_linear_a.json").read_text(encoding="utf-8"))
    cj = CirculantJet.from_values(2, 1, dA=[1, 0, 0])
    gamma = christoffel(circulant_to_jet(cj))
    expected = np.array([[[Fraction(v) for v in row] for row in block] for block in golden["gamma"]], dtype=object)
    assert (gamma == expected).all()


def test_christoffel_symmetric_in_lower_indices():
    mj = random_metric_jet(make_rng(3), FLOAT)
    gamma = christoffel(mj)
    assert np.allclose(gamma, np.einsum("kij->kji", gamma))


def test_riemann_matches_symbolic_oracle():
    """Circulant metric and its associated metric of a non-constant jet"""
    cj = nonconstant_jet()
    A, B = 2 + X[0] + X[1] ** 2, sp.Integer(1)
    g = sp.Matrix(3, 3, lambda i, j: A if i == j else B)
    gt = sp.Matrix(3, 3, lambda i, j: 2 * B if i == j else A + B)

    _, R = riemann_tensor(circulant_to_jet(cj))
    _, Rt = riemann_tensor(associated_jet(cj))
    assert (R == symbolic_riemann(g)).all()
    assert (Rt == symbolic_riemann(gt)).all()


def test_constant_metric_is_flat():
    mj = MetricJet2.constant(circulant_sym(Fraction(3), Fraction(1)))
    gamma, R = riemann_tensor(mj)
    assert max_abs(gamma) == 0
    assert max_abs(R) == 0


def test_scaling_invariance_of_connection():
    """Gamma is invariant under g -> c g; R_ijkl scales by c"""
    mj = random_metric_jet(make_rng(11), EXACT)
    c = Fraction(7, 3)
    gamma, R = riemann_tensor(mj)
    gamma_c, R_c = riemann_tensor(mj.scaled(c))
    assert (gamma == gamma_c).all()
    assert (R_c == c * R).all()


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_exact_curvature_symmetries(seed):
    """Random exact jets, definite or not, satisfy every algebraic symmetry exactly"""
    rng = make_rng(seed)
    mj = random_metric_jet(rng, EXACT, indefinite=bool(seed % 2))
    _, R = riemann_tensor(mj)
    check = curvature_symmetry_check(R)
    assert check.holds
    assert check.residual == 0


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_metric_compatibility(seed):
    mj = random_metric_jet(make_rng(seed), FLOAT)
    assert compatibility_residual(mj, christoffel(mj)).holds


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_ricci_relation_of_the_pair_exact(seed):
    """Ricci tensors of g and g~ obey their linear relation exactly"""
    cj = random_circulant_jet(make_rng(seed), EXACT)
    bundle_g, bundle_gt = circulant_bundles(cj)
    check = check_con_ae(bundle_g, bundle_gt, bundle_g.metric, bundle_gt.metric)
    assert check.holds
    assert check.residual == 0


def test_exact_and_float_agree():
    cj = random_circulant_jet(make_rng(5), EXACT)
    exact_g, exact_gt = circulant_bundles(cj)
    float_g, float_gt = circulant_bundles(cj.to_mode(FLOAT))
    assert np.allclose(exact_g.riemann.astype(float), float_g.riemann)
    assert np.isclose(float(exact_gt.tau), float_gt.tau)
    assert np.isclose(float(exact_gt.tau_star), float_gt.tau_star)


def test_scalar_curvatures_of_lie_setup():
    """A = 1, B = 0 gives g = I; the jet record accepts it for the associated metric"""
    cj = CirculantJet.from_values(1, 0)
    gt_jet = associated_jet(cj)
    assert (gt_jet.g == circulant_sym(Fraction(0), Fraction(1))).all()


def test_positivity_violation():
    with pytest.raises(PositivityViolation):
        circulant_to_jet(CirculantJet.from_values(1, 2))
    with pytest.raises(PositivityViolation):
        circulant_to_jet(CirculantJet.from_values(2, 0))


def test_degenerate_associated_metric():
    """A = -2B makes the associated metric singular"""
    with pytest.raises(DegenerateAssociated):
        associated_jet(CirculantJet.from_values(-2, 1))


def test_non_symmetric_hessian_rejected():
    with pytest.raises(ParseError):
        CirculantJet.from_values(2, 1, d2A=[[0, 1, 0], [0, 0, 0], [0, 0, 0]])


def test_constant_circulant_q_is_parallel():
    cj = CirculantJet.from_values(5, 2)
    assert max_abs(nabla_q(circulant_to_jet(cj))) == 0
    assert max_abs(nabla_q(associated_jet(cj))) == 0


def test_bundle_scalars_of_constant_pair():
    cj = CirculantJet.from_values("5/2", "1/2")
    g_jet, gt_jet = circulant_to_jet(cj), associated_jet(cj)
    bundle = curvature_bundle(g_jet, gt_jet.g_inv)
    assert bundle.tau == 0
    assert bundle.tau_star == 0
