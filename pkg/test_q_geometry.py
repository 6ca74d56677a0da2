#!/usr/bin/env python3
"""
Tests for Q-bases, degenerate planes, isotropy, Q-plane curvatures and limits
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

from src.core.classifier import l2_model_tensor
from src.core.errors import (
    DegeneratePlane,
    IsotropicDirection,
    NotAQBasis,
    NotDegeneratePlane,
    NotEinstein,
    PositivityViolation,
)
from src.core.lie_groups import family1, lie_geometry
from src.core.metric_jets import bundle_from_riemann
from src.core.q_geometry import (
    DEGENERATE_PHI,
    degenerate_plane_numerator,
    direct_gram,
    find_orthonormal_q_basis,
    gtilde_gram,
    is_isotropic,
    isotropic_ricci_value,
    limit_ricci,
    limit_ricci_numeric,
    limit_sectional,
    limit_sectional_numeric,
    phi_grid,
    plane_degeneracy,
    plane_nondegenerate,
    q_basis_data,
    q_plane_curvature_closed_form,
    q_plane_curvatures,
    q_plane_numerator_closed_form,
    ricci_curvature,
    ricci_curvature_closed_form,
    sectional_curvature,
    vector_with_angle,
)
from src.core.tensor3 import (
    ArithmeticMode,
    Verdict,
    apply_q,
    as_array,
    circulant_sym,
    evaluate4,
    invert_sym3,
    quadratic,
)


EXACT = ArithmeticMode.EXACT

small = st.integers(min_value=-4, max_value=4)


def exact_pair(A, B):
    A, B = Fraction(A), Fraction(B)
    return circulant_sym(A, B), circulant_sym(2 * B, A + B)


def model(A, B, tau_t, tau_star_t):
    g, gt = exact_pair(A, B)
    R = l2_model_tensor(g, gt, Fraction(tau_t), Fraction(tau_star_t))
    return bundle_from_riemann(R, gt, invert_sym3(g)), g, gt


def vec(*components):
    return as_array(list(components), EXACT)


class TestQBasis:
    """Angle data of Q-bases"""

    def test_angle_of_basis_vector(self):
        g, _ = exact_pair(2, 1)
        qb = q_basis_data(vec(1, 0, 0), g)
        assert qb.cos_phi == Fraction(1, 2)
        assert qb.norm_g == 2
        assert qb.angle_check.holds

    @pytest.mark.parametrize("vector", [(1, 1, 1), (0, 0, 0), (2, 2, 2)])
    def test_fixed_direction_is_not_a_q_basis(self, vector):
        g, _ = exact_pair(2, 1)
        with pytest.raises(NotAQBasis):
            q_basis_data(vec(*vector), g)

    @settings(max_examples=30, deadline=None)
    @given(small, small, small)
    def test_gram_from_angle_matches_direct_gram(self, a, b, c):
        g, gt = exact_pair(3, 1)
        x = vec(a, b, c)
        try:
            qb = q_basis_data(x, g)
        except NotAQBasis:
            return
        assert (gtilde_gram(qb) == direct_gram(qb, gt)).all()

    def test_degenerate_angle(self):
        """x = (1, 1, -1) under g = I has cos phi = -1/3"""
        g = circulant_sym(Fraction(1), Fraction(0))
        qb = q_basis_data(vec(1, 1, -1), g)
        assert qb.cos_phi == Fraction(-1, 3)
        assert plane_degeneracy(qb).holds
        assert plane_nondegenerate(qb).verdict is Verdict.FAILS

    @pytest.mark.parametrize("offset,verdict", [
        (0.0, Verdict.HOLDS),
        (5e-10, Verdict.HOLDS),
        (-5e-10, Verdict.HOLDS),
        (5e-9, Verdict.BORDERLINE),
        (2e-8, Verdict.FAILS),
    ])
    def test_degeneracy_window_in_float(self, offset, verdict):
        """The window is 1e-9 on cos phi itself"""
        g = circulant_sym(3.0, 1.0)
        qb = q_basis_data(vector_with_angle(g, -1.0 / 3.0 + offset), g)
        assert plane_degeneracy(qb).verdict is verdict

    def test_orthogonal_basis_is_isotropic(self):
        lie = lie_geometry(family1(1, 0, 0))
        for v in (vec(1, 0, 0), vec(0, 1, 0), vec(0, 0, 1)):
            assert is_isotropic(v, lie.gt).holds
        assert is_isotropic(vec(1, 1, 0), lie.gt).verdict is Verdict.FAILS


class TestGrid:
    """Sampling grid over (0, 2pi/3)"""

    @pytest.mark.parametrize("points", [1, 2, 5, 50, 101])
    def test_grid_is_interior_and_avoids_special_angles(self, points):
        grid = phi_grid(points)
        assert all(0 < phi < 2 * np.pi / 3 for phi in grid)
        assert all(abs(phi - np.pi / 2) > 1e-6 for phi in grid)
        assert all(abs(phi - DEGENERATE_PHI) > 1e-6 for phi in grid)
        assert grid == sorted(grid)


class TestSearch:
    """Orthonormal Q-bases and prescribed angles"""

    @pytest.mark.parametrize("A,B", [(2.0, 1.0), (3.0, 0.5), (1.2, 1.0)])
    def test_orthonormal_q_basis(self, A, B):
        g = circulant_sym(A, B)
        x = find_orthonormal_q_basis(g)
        assert abs(x @ g @ x - 1.0) < 1e-10
        assert abs(x @ g @ apply_q(x)) < 1e-10

    def test_indefinite_metric_rejected(self):
        with pytest.raises(PositivityViolation):
            find_orthonormal_q_basis(circulant_sym(2.0, 3.0))

    @pytest.mark.parametrize("cos_phi", [-0.4, -1.0 / 3.0, 0.0, 0.3, 0.9])
    def test_vector_with_angle(self, cos_phi):
        g = circulant_sym(3.0, 1.0)
        qb = q_basis_data(vector_with_angle(g, cos_phi), g)
        assert abs(qb.cos_phi - cos_phi) < 1e-10
        assert abs(qb.norm_g - 1.0) < 1e-10

    @pytest.mark.parametrize("cos_phi", [-0.5, 1.0, 2.0])
    def test_unreachable_angle(self, cos_phi):
        with pytest.raises(NotAQBasis):
            vector_with_angle(circulant_sym(3.0, 1.0), cos_phi)


class TestClosedForms:
    """Q-plane curvatures of L2 associated manifolds"""

    @settings(max_examples=25, deadline=None)
    @given(small, small, st.sampled_from([(1, 0, 0), (1, 2, 0), (2, -1, 3), (0, 1, -2)]))
    def test_sectional_curvatures_match_closed_form(self, tau_t, tau_star_t, vector):
        bundle, g, gt = model(3, 1, tau_t, tau_star_t)
        qb = q_basis_data(vec(*vector), g)
        if plane_degeneracy(qb).holds:
            return
        expected = q_plane_curvature_closed_form(bundle.tau, bundle.tau_star, qb.cos_phi)
        assert all(k == expected for k in q_plane_curvatures(bundle.riemann, gt, qb))
        numerator = q_plane_numerator_closed_form(bundle.tau, bundle.tau_star, qb.cos_phi, qb.norm_g)
        assert evaluate4(bundle.riemann, qb.x, qb.qx, qb.x, qb.qx) == numerator

    @settings(max_examples=25, deadline=None)
    @given(small, small)
    def test_ricci_curvature_matches_closed_form(self, tau_t, tau_star_t):
        bundle, g, gt = model(3, 1, tau_t, tau_star_t)
        x = vec(1, 0, 0)
        qb = q_basis_data(x, g)
        expected = ricci_curvature_closed_form(bundle.tau, bundle.tau_star, qb.cos_phi)
        for v in (qb.x, qb.qx, qb.q2x):
            assert ricci_curvature(bundle.ricci, gt, v) == expected

    def test_closed_forms_undefined_at_special_angles(self):
        with pytest.raises(DegeneratePlane):
            q_plane_curvature_closed_form(Fraction(1), Fraction(1), Fraction(-1, 3))
        with pytest.raises(IsotropicDirection):
            ricci_curvature_closed_form(Fraction(1), Fraction(1), Fraction(0))

    def test_degenerate_numerator(self):
        """R~(x, Qx, x, Qx) = 8 tau~*/27 g(x, x)^2 on a degenerate plane"""
        bundle, g, gt = model(1, 0, 4, 3)
        x = vec(1, 1, -1)
        value = degenerate_plane_numerator(bundle.riemann, x, g)
        assert value == Fraction(8, 27) * 3 * quadratic(g, x) ** 2
        with pytest.raises(NotDegeneratePlane):
            degenerate_plane_numerator(bundle.riemann, vec(1, 0, 0), g)

    def test_isotropic_ricci_value(self):
        bundle, g, gt = model(1, 0, 4, 3)
        x = vec(1, 0, 0)
        assert quadratic(bundle.ricci, x) == isotropic_ricci_value(bundle.tau_star, quadratic(g, x))

    def test_degenerate_plane_and_isotropic_direction_raise(self):
        bundle, g, gt = model(1, 0, 4, 3)
        x = vec(1, 1, -1)
        with pytest.raises(DegeneratePlane):
            sectional_curvature(bundle.riemann, gt, x, apply_q(x))
        with pytest.raises(IsotropicDirection):
            ricci_curvature(bundle.ricci, gt, vec(0, 1, 0))


class TestLimits:
    """Limit values on Einstein associated manifolds"""

    def test_limit_values(self):
        assert limit_sectional(Fraction(3)) == Fraction(-1, 2)
        assert limit_ricci(Fraction(3)) == 1

    def test_limits_require_einstein(self):
        with pytest.raises(NotEinstein):
            limit_sectional(Fraction(3), Fraction(1))
        with pytest.raises(NotEinstein):
            limit_ricci(Fraction(3), Fraction(-3))

    def test_numeric_limits_converge_on_family1(self):
        lie = lie_geometry(family1(1, 0, 0))
        b = lie.bundle_gt
        sectional = limit_sectional_numeric(b.riemann, lie.g, lie.gt, b.tau, b.tau_star)
        ricci = limit_ricci_numeric(b.ricci, lie.g, lie.gt, b.tau, b.tau_star)
        assert sectional.converged and sectional.check.holds
        assert ricci.converged and ricci.check.holds
        assert sectional.limit == Fraction(-1, 2)
        assert ricci.limit == 1
        assert len(sectional.values) == len(sectional.offsets)
