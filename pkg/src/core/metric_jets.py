"""
Pointwise curvature engine

From the 2-jet of a metric at a point this module computes the
Christoffel symbols, the curvature tensor, the Ricci tensor and both
scalar curvatures, and the covariant derivative of the circulant
structure Q.

Storage conventions (0-based):
    dg[k, i, j]      = d_k g_ij
    d2g[k, l, i, j]  = d_l d_k g_ij
    gamma[k, i, j]   = Gamma^k_ij
    riemann[i,j,k,l] = g(R(e_i, e_j) e_k, e_l)
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from ..utils.logger import get_logger
from .errors import (
    CurvatureSymmetryViolation,
    DegenerateAssociated,
    ParseError,
    PositivityViolation,
    SingularMatrix,
)
from .tensor3 import (
    DEFAULT_TOLERANCE,
    DIM,
    Q_ACTION,
    ArithmeticMode,
    Check,
    Scalar,
    Tolerance,
    Verdict,
    as_array,
    circulant_sym,
    combine,
    compare,
    convert,
    half,
    invert_sym3,
    judge,
    max_abs,
    mode_of,
    q_pullback,
    scalar_of,
    to_scalar,
    zeros,
)


log = get_logger("MetricJets")


def _require_symmetric(name: str, array: np.ndarray, axes: Tuple[int, int], tolerance: Tolerance) -> None:
    order = list(range(array.ndim))
    order[axes[0]], order[axes[1]] = order[axes[1]], order[axes[0]]
    check = compare(array, np.transpose(array, order), tolerance)
    if check.verdict is Verdict.FAILS:
        raise ParseError(f"{name} is not symmetric (residual {float(check.residual):.3e})")


@dataclass(frozen=True, eq=False)
class CirculantJet:
    """
    2-jet of the circulant metric functions A, B at a point

    The positivity condition A > B > 0 is enforced where a circulant
    metric is built (circulant_to_jet), not here, so that the same
    record also carries the Lie setup A = 1, B = 0.
    """

    A: Scalar
    B: Scalar
    dA: np.ndarray
    dB: np.ndarray
    d2A: np.ndarray
    d2B: np.ndarray

    def __post_init__(self):
        for name in ("dA", "dB"):
            if np.shape(getattr(self, name)) != (DIM,):
                raise ParseError(f"{name} must have {DIM} components")
        for name in ("d2A", "d2B"):
            if np.shape(getattr(self, name)) != (DIM, DIM):
                raise ParseError(f"{name} must be a {DIM}x{DIM} matrix")
            _require_symmetric(name, getattr(self, name), (0, 1), DEFAULT_TOLERANCE)

    @property
    def mode(self) -> ArithmeticMode:
        return mode_of(self.A, self.B, self.dA, self.dB, self.d2A, self.d2B)

    @classmethod
    def from_values(cls, A, B, dA=None, dB=None, d2A=None, d2B=None,
                    mode: ArithmeticMode = ArithmeticMode.EXACT) -> "CirculantJet":
        """Build a jet from plain numbers or rational strings; missing derivatives are zero"""
        vector = lambda v: as_array(v, mode) if v is not None else zeros((DIM,), mode)
        matrix = lambda m: as_array(m, mode) if m is not None else zeros((DIM, DIM), mode)
        return cls(
            A=to_scalar(A, mode),
            B=to_scalar(B, mode),
            dA=vector(dA),
            dB=vector(dB),
            d2A=matrix(d2A),
            d2B=matrix(d2B),
        )

    def scaled(self, c: Scalar) -> "CirculantJet":
        return CirculantJet(
            A=self.A * c, B=self.B * c,
            dA=self.dA * c, dB=self.dB * c,
            d2A=self.d2A * c, d2B=self.d2B * c,
        )

    def to_mode(self, mode: ArithmeticMode) -> "CirculantJet":
        return CirculantJet(
            A=to_scalar(self.A, mode), B=to_scalar(self.B, mode),
            dA=convert(self.dA, mode), dB=convert(self.dB, mode),
            d2A=convert(self.d2A, mode), d2B=convert(self.d2B, mode),
        )


@dataclass(frozen=True, eq=False)
class MetricJet2:
    """2-jet of a symmetric invertible metric; definiteness is not required"""

    g: np.ndarray
    dg: np.ndarray
    d2g: np.ndarray
    tolerance: Tolerance = field(default=DEFAULT_TOLERANCE, compare=False, repr=False)
    g_inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if np.shape(self.g) != (DIM, DIM):
            raise ParseError("g must be a 3x3 matrix")
        if np.shape(self.dg) != (DIM,) * 3:
            raise ParseError("dg must have shape (3, 3, 3)")
        if np.shape(self.d2g) != (DIM,) * 4:
            raise ParseError("d2g must have shape (3, 3, 3, 3)")
        _require_symmetric("g", self.g, (0, 1), self.tolerance)
        _require_symmetric("dg", self.dg, (1, 2), self.tolerance)
        _require_symmetric("d2g", self.d2g, (0, 1), self.tolerance)
        _require_symmetric("d2g", self.d2g, (2, 3), self.tolerance)
        object.__setattr__(self, "g_inv", invert_sym3(self.g, self.tolerance))

    @property
    def mode(self) -> ArithmeticMode:
        return mode_of(self.g, self.dg, self.d2g)

    @classmethod
    def constant(cls, g: np.ndarray, tolerance: Tolerance = DEFAULT_TOLERANCE) -> "MetricJet2":
        mode = mode_of(g)
        return cls(g=g, dg=zeros((DIM,) * 3, mode), d2g=zeros((DIM,) * 4, mode), tolerance=tolerance)

    def scaled(self, c: Scalar) -> "MetricJet2":
        return MetricJet2(g=self.g * c, dg=self.dg * c, d2g=self.d2g * c, tolerance=self.tolerance)

    def to_mode(self, mode: ArithmeticMode) -> "MetricJet2":
        return MetricJet2(
            g=convert(self.g, mode), dg=convert(self.dg, mode),
            d2g=convert(self.d2g, mode), tolerance=self.tolerance,
        )


@dataclass(frozen=True, eq=False)
class CurvatureBundle:
    """Curvature data of one metric at one point"""

    gamma: Optional[np.ndarray]
    riemann: np.ndarray
    ricci: np.ndarray
    tau: Scalar
    tau_star: Scalar
    metric: np.ndarray
    dual: np.ndarray

    @property
    def mode(self) -> ArithmeticMode:
        return mode_of(self.riemann, self.ricci)

    def summary(self) -> dict:
        return {
            "riemann": self.riemann,
            "ricci": self.ricci,
            "tau": self.tau,
            "tau_star": self.tau_star,
        }


# ---------------------------------------------------------------------------
# Jet constructors
# ---------------------------------------------------------------------------

def _lift(a_values: np.ndarray, b_values: np.ndarray) -> np.ndarray:
    """Apply circulant_sym entrywise over the leading index block"""
    shape = np.shape(a_values)
    mode = mode_of(a_values, b_values)
    out = zeros(shape + (DIM, DIM), mode)
    for index in np.ndindex(*shape):
        out[index] = circulant_sym(a_values[index], b_values[index])
    return out


def circulant_to_jet(cj: CirculantJet, tolerance: Tolerance = DEFAULT_TOLERANCE) -> MetricJet2:
    """
    Metric jet of the circulant metric g = circulant(A, B)

    Raises:
        PositivityViolation: A <= B or B <= 0
    """
    if not (cj.A > cj.B and cj.B > 0):
        raise PositivityViolation(f"Circulant metric requires A > B > 0, got A={cj.A}, B={cj.B}")
    return MetricJet2(
        g=circulant_sym(cj.A, cj.B),
        dg=_lift(cj.dA, cj.dB),
        d2g=_lift(cj.d2A, cj.d2B),
        tolerance=tolerance,
    )


def associated_jet(cj: CirculantJet, tolerance: Tolerance = DEFAULT_TOLERANCE) -> MetricJet2:
    """
    Metric jet of the associated metric g~ = circulant(2B, A + B)

    Linear in the jet, so derivatives follow entrywise. Only
    non-degeneracy is required here.

    Raises:
        DegenerateAssociated: A = B or A = -2B
    """
    two = to_scalar(2, cj.mode)
    try:
        return MetricJet2(
            g=circulant_sym(two * cj.B, cj.A + cj.B),
            dg=_lift(two * cj.dB, cj.dA + cj.dB),
            d2g=_lift(two * cj.d2B, cj.d2A + cj.d2B),
            tolerance=tolerance,
        )
    except SingularMatrix as exc:
        raise DegenerateAssociated(f"Associated metric is degenerate for A={cj.A}, B={cj.B}") from exc


# ---------------------------------------------------------------------------
# Connection and curvature
# ---------------------------------------------------------------------------

def _first_kind(dg: np.ndarray, mode: ArithmeticMode) -> np.ndarray:
    """Gamma_{l,ij} = 1/2 (d_i g_jl + d_j g_il - d_l g_ij), indexed [l, i, j]"""
    return half(mode) * (
        np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg
    )


def christoffel(mj: MetricJet2) -> np.ndarray:
    """
    Levi-Civita connection coefficients of a metric jet

    Returns:
        gamma[k, i, j] = Gamma^k_ij, symmetric in (i, j)
    """
    first = _first_kind(mj.dg, mj.mode)
    return np.einsum("kl,lij->kij", mj.g_inv, first)


def christoffel_derivative(mj: MetricJet2) -> np.ndarray:
    """dgamma[m, k, i, j] = d_m Gamma^k_ij"""
    mode = mj.mode
    first = _first_kind(mj.dg, mode)
    d_first = half(mode) * (
        np.einsum("mijl->mlij", mj.d2g)
        + np.einsum("mjil->mlij", mj.d2g)
        - mj.d2g
    )
    # d_m g^{kl} = -g^{ka} (d_m g_ab) g^{bl}
    d_inv = -np.einsum("ka,mab,bl->mkl", mj.g_inv, mj.dg, mj.g_inv)
    return np.einsum("mkl,lij->mkij", d_inv, first) + np.einsum("kl,mlij->mkij", mj.g_inv, d_first)


def compatibility_residual(mj: MetricJet2, gamma: np.ndarray, tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    """d_k g_ij - Gamma^l_ki g_lj - Gamma^l_kj g_il, judged against max|dg|"""
    residual = (
        mj.dg
        - np.einsum("lki,lj->kij", gamma, mj.g)
        - np.einsum("lkj,il->kij", gamma, mj.g)
    )
    return judge(max_abs(residual), max_abs(mj.dg), tolerance)


def curvature_symmetry_check(R: np.ndarray, tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    """Skew symmetries, pair symmetry and the first Bianchi identity"""
    scale = max_abs(R)
    parts = [
        R + np.einsum("jikl->ijkl", R),
        R + np.einsum("ijlk->ijkl", R),
        R - np.einsum("klij->ijkl", R),
        R + np.einsum("jkil->ijkl", R) + np.einsum("kijl->ijkl", R),
    ]
    return combine(judge(max_abs(part), scale, tolerance) for part in parts)


def bundle_from_riemann(
    R: np.ndarray,
    metric: np.ndarray,
    dual: np.ndarray,
    gamma: Optional[np.ndarray] = None,
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> CurvatureBundle:
    """
    Ricci tensor and scalar curvatures of a given (0,4) curvature tensor

    Args:
        R: Curvature tensor R_ijkl
        metric: The metric R belongs to
        dual: Inverse of the other metric, used for the starred scalar
        gamma: Connection coefficients to carry along, if known

    Raises:
        CurvatureSymmetryViolation: R fails its algebraic symmetries
    """
    symmetry = curvature_symmetry_check(R, tolerance)
    if symmetry.verdict is Verdict.FAILS:
        raise CurvatureSymmetryViolation(
            f"Curvature tensor violates its symmetries (residual {float(symmetry.residual):.3e})"
        )
    if symmetry.verdict is Verdict.BORDERLINE:
        log.warning(f"Curvature symmetries hold only borderline (residual {float(symmetry.residual):.3e})")

    metric_inv = invert_sym3(metric, tolerance)
    ricci = np.einsum("ij,iabj->ab", metric_inv, R)
    tau = scalar_of(np.einsum("ab,ab->", metric_inv, ricci))
    tau_star = scalar_of(np.einsum("ab,ab->", dual, ricci))
    return CurvatureBundle(
        gamma=gamma, riemann=R, ricci=ricci, tau=tau, tau_star=tau_star,
        metric=metric, dual=dual,
    )


def riemann_tensor(mj: MetricJet2) -> Tuple[np.ndarray, np.ndarray]:
    """(gamma, R_ijkl) of a metric jet"""
    gamma = christoffel(mj)
    dgamma = christoffel_derivative(mj)
    # R(e_i, e_j) e_k = op[i, j, k, m] e_m
    op = (
        np.einsum("imjk->ijkm", dgamma)
        - np.einsum("jmik->ijkm", dgamma)
        + np.einsum("mil,ljk->ijkm", gamma, gamma)
        - np.einsum("mjl,lik->ijkm", gamma, gamma)
    )
    return gamma, np.einsum("ijkm,ml->ijkl", op, mj.g)


def curvature_bundle(mj: MetricJet2, dual: np.ndarray) -> CurvatureBundle:
    """
    Full curvature data of a metric jet

    Args:
        mj: Metric jet
        dual: Inverse of the complementary metric (tau* = dual^{ij} rho_ij)

    Returns:
        CurvatureBundle with all symmetries verified
    """
    gamma, R = riemann_tensor(mj)
    log.debug(f"Curvature computed in {mj.mode.value} mode, max |R| = {float(max_abs(R)):.6g}")
    return bundle_from_riemann(R, mj.g, dual, gamma=gamma, tolerance=mj.tolerance)


def circulant_bundles(cj: CirculantJet, tolerance: Tolerance = DEFAULT_TOLERANCE) -> Tuple[CurvatureBundle, CurvatureBundle]:
    """Curvature bundles of g and of the associated metric g~ for one jet"""
    g_jet = circulant_to_jet(cj, tolerance)
    gt_jet = associated_jet(cj, tolerance)
    return curvature_bundle(g_jet, gt_jet.g_inv), curvature_bundle(gt_jet, g_jet.g_inv)


# ---------------------------------------------------------------------------
# The structure Q
# ---------------------------------------------------------------------------

def nabla_q(mj: MetricJet2) -> np.ndarray:
    """
    Covariant derivative of Q

    Returns:
        out[i, k, j] = (nabla_i Q)^k_j = Gamma^k_im Q^m_j - Gamma^m_ij Q^k_m
    """
    gamma = christoffel(mj)
    q = convert(Q_ACTION, mj.mode)
    return np.einsum("kim,mj->ikj", gamma, q) - np.einsum("mij,km->ikj", gamma, q)


def check_compatibility(g: np.ndarray) -> Scalar:
    """max |g(Qe_i, Qe_j) - g(e_i, e_j)|"""
    return max_abs(q_pullback(g) - g)
