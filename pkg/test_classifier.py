#!/usr/bin/env python3
"""
Tests for class membership, Einstein decompositions and curvature identities
"""

import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from src.core.classifier import (
    Side,
    Skipped,
    check_l1_curvature_form,
    check_l1_ricci_degenerate,
    check_l1_scalar_relation,
    check_l2_components_closed_form,
    check_l2_model,
    check_reconstruction,
    classify,
    einstein_decompose,
    is_circulant_ricci,
    is_einstein,
    is_l0_gradient,
    is_l0_gradient_associated,
    is_l1_components,
    is_l1_quantified,
    is_l2_components,
    is_l2_quantified,
    l2_model_tensor,
)
from src.core.errors import NotCirculantRicci, NotInL2
from src.core.lie_groups import family1, family2, lie_geometry, nabla_q_invariant_tensor
from src.core.metric_jets import bundle_from_riemann, circulant_bundles
from src.core.samplers import construct_l0_jet, make_rng, perturb_jet, random_circulant_jet
from src.core.tensor3 import ArithmeticMode, Verdict, circulant_sym, invert_sym3


EXACT = ArithmeticMode.EXACT
FLOAT = ArithmeticMode.FLOAT

rationals = st.fractions(min_value=-4, max_value=4, max_denominator=5)


def pair(A, B):
    A, B = Fraction(A), Fraction(B)
    return circulant_sym(A, B), circulant_sym(2 * B, A + B)


def model_bundle(A, B, tau_t, tau_star_t):
    """Curvature bundle of the associated metric carrying the L2 model tensor"""
    g, gt = pair(A, B)
    R = l2_model_tensor(g, gt, Fraction(tau_t), Fraction(tau_star_t))
    return bundle_from_riemann(R, gt, invert_sym3(g)), g, gt


class TestModelTensors:
    """The L2 model tensor and its L1 specialization"""

    @settings(max_examples=25, deadline=None)
    @given(rationals, rationals)
    def test_model_tensor_is_l2(self, tau_t, tau_star_t):
        bundle, g, gt = model_bundle(3, 1, tau_t, tau_star_t)
        assert is_l2_components(bundle.riemann).holds
        assert is_l2_quantified(bundle.riemann, samples=8).holds

    @settings(max_examples=25, deadline=None)
    @given(rationals, rationals)
    def test_model_tensor_reproduces_its_scalars(self, tau_t, tau_star_t):
        """The model with parameters (tau~, tau~*) has exactly these scalar curvatures"""
        bundle, g, gt = model_bundle(3, 1, tau_t, tau_star_t)
        assert bundle.tau == tau_t
        assert bundle.tau_star == tau_star_t
        assert check_l2_model(bundle, g).holds
        assert check_l2_components_closed_form(bundle, g).holds

    @settings(max_examples=25, deadline=None)
    @given(rationals.filter(lambda v: v != 0), rationals)
    def test_l1_iff_scalar_relation(self, tau_t, shift):
        """On L2, tau~* = -tau~ exactly when the tensor is in L1"""
        tau_star_t = -tau_t + shift
        bundle, g, gt = model_bundle(5, 2, tau_t, tau_star_t)
        relation = check_l1_scalar_relation(bundle)
        assert relation.holds == is_l1_components(bundle.riemann).holds
        assert relation.holds == (shift == 0)

    def test_l1_model_specializations(self):
        bundle, g, gt = model_bundle(5, 2, 6, -6)
        assert is_l1_components(bundle.riemann).holds
        assert is_l1_quantified(bundle.riemann, samples=8).holds
        assert check_l1_ricci_degenerate(bundle.ricci, g, bundle.tau).holds
        assert check_l1_curvature_form(bundle, g).holds

    def test_scalar_relation_requires_l2(self):
        rng = make_rng(4)
        _, bundle_gt = circulant_bundles(random_circulant_jet(rng, EXACT))
        if not is_l2_components(bundle_gt.riemann).holds:
            with pytest.raises(NotInL2):
                check_l1_scalar_relation(bundle_gt)


class TestEinstein:
    """Decompositions rho = alpha g + beta g~"""

    @settings(max_examples=25, deadline=None)
    @given(rationals, rationals)
    def test_decomposition_recovers_coefficients(self, alpha, beta):
        g, gt = pair(4, 1)
        dec = einstein_decompose(alpha * g + beta * gt, g, gt)
        assert dec.alpha == alpha
        assert dec.beta == beta
        assert dec.residual == 0

    def test_non_circulant_ricci(self):
        g, gt = pair(4, 1)
        rho = np.array([[Fraction(1), 0, 0], [0, Fraction(2), 0], [0, 0, Fraction(3)]], dtype=object)
        assert is_circulant_ricci(rho).verdict is Verdict.FAILS
        assert is_circulant_ricci(3 * g - gt).holds
        with pytest.raises(NotCirculantRicci):
            einstein_decompose(rho, g, gt)

    def test_einstein_is_side_aware(self):
        """rho = 2 g~ is Einstein for g~ and not for g"""
        g, gt = pair(3, 1)
        rho = 2 * gt
        bundle, _, _ = model_bundle(3, 1, 0, 0)
        assert is_einstein(einstein_decompose(rho, g, gt, side=Side.GT), bundle).holds
        assert is_einstein(einstein_decompose(rho, g, gt, side=Side.G), bundle).verdict is Verdict.FAILS


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_reconstruction_from_ricci_exact(seed):
    """In dimension three the curvature tensor is determined by the Ricci tensor"""
    bundle_g, bundle_gt = circulant_bundles(random_circulant_jet(make_rng(seed), EXACT))
    assert check_reconstruction(bundle_g).residual == 0
    assert check_reconstruction(bundle_gt).residual == 0


class TestParallelStructure:
    """Gradient form of the parallel condition"""

    @settings(max_examples=10, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_constructed_jets_satisfy_both_forms(self, seed):
        cj = construct_l0_jet(make_rng(seed), EXACT)
        assert is_l0_gradient(cj).holds
        assert is_l0_gradient_associated(cj).holds

    def test_perturbed_jet_breaks_condition(self):
        rng = make_rng(8)
        cj = perturb_jet(construct_l0_jet(rng, EXACT), rng)
        assert is_l0_gradient(cj).verdict is Verdict.FAILS


class TestBothSides:
    """g and g~ are in L2 together; g-side coefficients alpha = tau/3, beta = tau/6 + tau*/3"""

    @settings(max_examples=10, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_generic_jets_agree(self, seed):
        bundle_g, bundle_gt = circulant_bundles(random_circulant_jet(make_rng(seed), EXACT))
        assert is_l2_components(bundle_g.riemann).verdict is is_l2_components(bundle_gt.riemann).verdict

    @settings(max_examples=5, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_parallel_jets_are_l2_on_both_sides(self, seed):
        bundle_g, bundle_gt = circulant_bundles(construct_l0_jet(make_rng(seed), EXACT))
        assert is_l2_components(bundle_g.riemann).holds
        assert is_l2_components(bundle_gt.riemann).holds

    @pytest.mark.parametrize("build", [
        lambda: family1(1, 2, 3),
        lambda: family1(Fraction(1, 2), 0, -1),
        lambda: family2(1, 5),
        lambda: family2(Fraction(-2, 3), 1),
    ])
    def test_lie_families_on_g_side(self, build):
        lie = lie_geometry(build())
        b = lie.bundle_g
        report = classify(b, lie.g, lie.gt, Side.G, samples=4)
        assert report.l2.holds
        assert report.residuals["l2_ricci_coefficients"].holds
        assert report.einstein_alpha == b.tau / 3
        assert report.einstein_beta == b.tau / 6 + b.tau_star / 3
        assert report.l2.verdict is classify(lie.bundle_gt, lie.g, lie.gt, Side.GT, samples=4).l2.verdict


class TestClassifyLieFamilies:
    """Class reports of the associated metric on the two Lie families"""

    def test_family1_is_einstein_l2(self):
        lie = lie_geometry(family1(1, 0, 0))
        report = classify(lie.bundle_gt, lie.g, lie.gt, Side.GT,
                          nabla=nabla_q_invariant_tensor(lie.connection_gt), samples=8)
        assert report.l2.holds
        assert report.l1.verdict is Verdict.FAILS
        assert report.l0.verdict is Verdict.FAILS
        assert report.einstein.holds
        assert report.einstein_alpha == 0
        assert report.einstein_beta == 1
        assert report.residuals["l2_model"].holds
        assert isinstance(report.residuals["l1_curvature_form"], Skipped)

    def test_family2_is_parallel(self):
        lie = lie_geometry(family2(1, 0))
        report = classify(lie.bundle_gt, lie.g, lie.gt, Side.GT,
                          nabla=nabla_q_invariant_tensor(lie.connection_gt), samples=8)
        assert report.l0.holds
        assert report.l1.holds
        assert report.l2.holds
        assert report.decomposition_valid
        assert report.residuals["l1_ricci_degenerate"].holds
        assert report.residuals["l1_curvature_form"].holds
        assert report.residuals["l2_ricci_coefficients"].holds

    def test_report_serializes(self):
        lie = lie_geometry(family2(Fraction(1, 2), 1))
        data = classify(lie.bundle_gt, lie.g, lie.gt, Side.GT, samples=4).to_dict()
        assert data["side"] == "gt"
        assert data["l0"]["verdict"] == "skipped"
        assert set(data) >= {"l1", "l2", "einstein", "residuals"}
