"""
Class membership (L0, L1, L2), Einstein decompositions and theorem checks

All predicates return a Check (tri-state verdict plus residual). The
theorem checks compare a computed quantity with the closed form the
theory predicts for it; a theorem that needs a precondition raises the
matching domain error when the precondition fails.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple, Union

import numpy as np

from ..utils.logger import get_logger
from .errors import NotCirculantRicci, NotInL2
from .metric_jets import (
    CirculantJet,
    CurvatureBundle,
    MetricJet2,
    christoffel,
    curvature_symmetry_check,
    nabla_q,
)
from .samplers import make_rng, random_vector
from .tensor3 import (
    DEFAULT_TOLERANCE,
    L0_GRADIENT_MATRIX,
    Check,
    Scalar,
    Tolerance,
    Verdict,
    apply_q,
    combine,
    compare,
    convert,
    det3,
    evaluate4,
    is_circulant_sym,
    judge,
    max_abs,
    mode_of,
    to_scalar,
)


log = get_logger("Classifier")


class Side(str, Enum):
    """Which metric of the pair a bundle belongs to"""

    G = "g"
    GT = "gt"


@dataclass(frozen=True)
class Skipped:
    """Placeholder for a check that does not apply to an instance"""

    reason: str

    @property
    def holds(self) -> bool:
        return True

    def to_dict(self) -> dict:
        return {"verdict": "skipped", "reason": self.reason}


CheckResult = Union[Check, Skipped]


@dataclass(frozen=True)
class EinsteinDecomposition:
    """rho = alpha * g + beta * g~ together with its reconstruction residual"""

    alpha: Scalar
    beta: Scalar
    residual: Scalar
    side: Side = Side.G

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "residual": self.residual, "side": self.side.value}


@dataclass
class ClassReport:
    """Class verdicts of one metric of the pair"""

    side: Side
    l0: CheckResult
    l1: Check
    l2: Check
    einstein_alpha: Optional[Scalar] = None
    einstein_beta: Optional[Scalar] = None
    decomposition_valid: bool = False
    einstein: CheckResult = field(default_factory=lambda: Skipped("no decomposition"))
    residuals: Dict[str, CheckResult] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "side": self.side.value,
            "l0": self.l0.to_dict(),
            "l1": self.l1.to_dict(),
            "l2": self.l2.to_dict(),
            "einstein": self.einstein.to_dict(),
            "einstein_alpha": self.einstein_alpha,
            "einstein_beta": self.einstein_beta,
            "decomposition_valid": self.decomposition_valid,
            "residuals": {name: check.to_dict() for name, check in self.residuals.items()},
        }


# 0-based index tuples of the independent components R_1212 ... R_1223
_R1212 = (0, 1, 0, 1)
_R1313 = (0, 2, 0, 2)
_R2323 = (1, 2, 1, 2)
_R1213 = (0, 1, 0, 2)
_R1323 = (0, 2, 1, 2)
_R1223 = (0, 1, 1, 2)


def _deviation(*pairs) -> Scalar:
    return max(abs(a - b) for a, b in pairs)


# ---------------------------------------------------------------------------
# Curvature classes
# ---------------------------------------------------------------------------

def is_l2_components(R: np.ndarray, tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    """R_1212 = R_1313 = R_2323 and R_1213 = R_1323 = -R_1223"""
    residual = _deviation(
        (R[_R1212], R[_R1313]),
        (R[_R1212], R[_R2323]),
        (R[_R1213], R[_R1323]),
        (R[_R1213], -R[_R1223]),
    )
    return judge(residual, max_abs(R), tolerance)


def is_l1_components(R: np.ndarray, tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    """R_1212 = R_1313 = R_2323 = -R_1213 = -R_1323 = R_1223"""
    residual = _deviation(
        (R[_R1212], R[_R1313]),
        (R[_R1212], R[_R2323]),
        (R[_R1212], -R[_R1213]),
        (R[_R1212], -R[_R1323]),
        (R[_R1212], R[_R1223]),
    )
    return judge(residual, max_abs(R), tolerance)


def _quantified(R: np.ndarray, q_slots: Tuple[int, ...], samples: int, seed: Optional[int],
                tolerance: Tolerance) -> Check:
    mode = mode_of(R)
    rng = make_rng(seed)
    checks = []
    for _ in range(samples):
        vectors = [random_vector(rng, mode) for _ in range(4)]
        rotated = [apply_q(v) if slot in q_slots else v for slot, v in enumerate(vectors)]
        lhs = evaluate4(R, *rotated)
        rhs = evaluate4(R, *vectors)
        scale = max_abs(R)
        for v in vectors:
            scale = scale * max_abs(v)
        checks.append(judge(abs(lhs - rhs), scale, tolerance))
    return combine(checks)


def is_l1_quantified(R: np.ndarray, samples: int = 64, seed: Optional[int] = 42,
                     tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    """R(x, y, Qz, Qu) = R(x, y, z, u) on random vector tuples"""
    return _quantified(R, (2, 3), samples, seed, tolerance)


def is_l2_quantified(R: np.ndarray, samples: int = 64, seed: Optional[int] = 42,
                     tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    """R(Qx, Qy, Qz, Qu) = R(x, y, z, u) on random vector tuples"""
    return _quantified(R, (0, 1, 2, 3), samples, seed, tolerance)


# ---------------------------------------------------------------------------
# Parallel structure
# ---------------------------------------------------------------------------

def is_l0_gradient(cj: CirculantJet, tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    """grad A = grad B M, i.e. A_1 = -B_1 + B_2 + B_3 and cyclically"""
    expected = convert(L0_GRADIENT_MATRIX, cj.mode) @ cj.dB
    return judge(max_abs(cj.dA - expected), max_abs(cj.dA, cj.dB), tolerance)


def is_l0_gradient_associated(cj: CirculantJet, tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    """The same condition written for g~: grad 2B = grad(A + B) M"""
    mode = cj.mode
    two = to_scalar(2, mode)
    lhs = two * cj.dB
    rhs = convert(L0_GRADIENT_MATRIX, mode) @ (cj.dA + cj.dB)
    return judge(max_abs(lhs - rhs), max_abs(lhs, rhs), tolerance)


def judge_nabla(nabla: np.ndarray, gamma: np.ndarray, tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    """Residual max |(nabla_i Q)^k_j| measured against the connection scale"""
    return judge(max_abs(nabla), max_abs(gamma), tolerance)


def is_l0_nabla(mj: MetricJet2, tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    return judge_nabla(nabla_q(mj), christoffel(mj), tolerance)


# ---------------------------------------------------------------------------
# Ricci tensor and Einstein type
# ---------------------------------------------------------------------------

def is_circulant_ricci(rho: np.ndarray, tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    """rho_11 = rho_22 = rho_33 and rho_12 = rho_13 = rho_23"""
    return is_circulant_sym(rho, tolerance)


def einstein_decompose(
    rho: np.ndarray,
    g: np.ndarray,
    gt: np.ndarray,
    tolerance: Tolerance = DEFAULT_TOLERANCE,
    side: Side = Side.G,
) -> EinsteinDecomposition:
    """
    Solve rho = alpha * g + beta * g~ for a circulant Ricci tensor

    With g = circulant(A, B): rho_11 = alpha A + 2 beta B and
    rho_12 = alpha B + beta (A + B); the system determinant is
    (A - B)(A + 2B).

    Raises:
        NotCirculantRicci: rho lacks the circulant pattern
    """
    pattern = is_circulant_ricci(rho, tolerance)
    if pattern.verdict is Verdict.FAILS:
        raise NotCirculantRicci(f"Ricci tensor is not circulant (residual {float(pattern.residual):.3e})")

    A, B = g[0, 0], g[0, 1]
    det = (A - B) * (A + 2 * B)
    if det == 0:
        raise NotCirculantRicci("Metric pair does not separate g from g~ (A = B or A = -2B)")
    rho11, rho12 = rho[0, 0], rho[0, 1]
    alpha = (rho11 * (A + B) - 2 * B * rho12) / det
    beta = (A * rho12 - B * rho11) / det
    residual = max_abs(rho - alpha * g - beta * gt)
    log.debug(f"Decomposition ({side.value}): alpha={alpha}, beta={beta}, residual={residual}")
    return EinsteinDecomposition(alpha=alpha, beta=beta, residual=residual, side=side)


def is_einstein(dec: EinsteinDecomposition, bundle: CurvatureBundle,
                tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    """
    rho is a multiple of the bundle's own metric

    For a g-side decomposition that is beta = 0, for a g~-side
    decomposition alpha = 0.
    """
    other = dec.beta if dec.side is Side.G else dec.alpha
    scale = max_abs(np.asarray([dec.alpha, dec.beta], dtype=object), bundle.ricci)
    return judge(abs(other), scale, tolerance)


def l2_coefficients(bundle: CurvatureBundle, side: Side) -> Tuple[Scalar, Scalar]:
    """
    (alpha, beta) an L2 manifold must have

    g side: alpha = tau/3, beta = tau/6 + tau*/3; g~ side:
    alpha = tau~*/3, beta = tau~/3 + tau~*/6.
    """
    tau, tau_star = bundle.tau, bundle.tau_star
    mode = bundle.mode
    three, six = to_scalar(3, mode), to_scalar(6, mode)
    if side is Side.G:
        return tau / three, tau / six + tau_star / three
    return tau_star / three, tau / three + tau_star / six


def check_l2_decomposition(dec: EinsteinDecomposition, bundle: CurvatureBundle,
                           tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    alpha, beta = l2_coefficients(bundle, dec.side)
    return compare([dec.alpha, dec.beta], [alpha, beta], tolerance)


# ---------------------------------------------------------------------------
# Curvature identities
# ---------------------------------------------------------------------------

def check_con_ae(gside: CurvatureBundle, gtside: CurvatureBundle, g: np.ndarray, gt: np.ndarray,
                 tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    """
    Ricci tensors of the pair are related by

        rho~ = rho + 1/3 (tau~* - tau) g + 1/6 (2 tau~ - 2 tau* + tau~* - tau) g~
    """
    mode = mode_of(gside.ricci, gtside.ricci)
    three, six = to_scalar(3, mode), to_scalar(6, mode)
    expected = (
        gside.ricci
        + (gtside.tau_star - gside.tau) / three * g
        + (2 * gtside.tau - 2 * gside.tau_star + gtside.tau_star - gside.tau) / six * gt
    )
    return compare(gtside.ricci, expected, tolerance)


def reconstruct_r(rho: np.ndarray, tau: Scalar, g: np.ndarray) -> np.ndarray:
    """
    Curvature tensor of a 3-manifold rebuilt from its Ricci tensor

    R_ijkl = -g_ik rho_jl - g_jl rho_ik + g_jk rho_il + g_il rho_jk
             + tau/2 (g_ik g_jl - g_jk g_il)
    """
    halftau = tau / to_scalar(2, mode_of(rho, g))
    return (
        -np.einsum("ik,jl->ijkl", g, rho)
        - np.einsum("jl,ik->ijkl", g, rho)
        + np.einsum("jk,il->ijkl", g, rho)
        + np.einsum("il,jk->ijkl", g, rho)
        + halftau * (np.einsum("ik,jl->ijkl", g, g) - np.einsum("jk,il->ijkl", g, g))
    )


def check_reconstruction(bundle: CurvatureBundle, tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    rebuilt = reconstruct_r(bundle.ricci, bundle.tau, bundle.metric)
    return compare(bundle.riemann, rebuilt, tolerance)


def kulkarni_terms(g: np.ndarray, gt: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    The two model tensors of the associated metric

        pi1(x,y,z,u) = g~(y,z) g~(x,u) - g~(x,z) g~(y,u)
        pi2(x,y,z,u) = g(y,z) g~(x,u) + g(x,u) g~(y,z)
                       - g(x,z) g~(y,u) - g(y,u) g~(x,z)
    """
    pi1 = np.einsum("yz,xu->xyzu", gt, gt) - np.einsum("xz,yu->xyzu", gt, gt)
    pi2 = (
        np.einsum("yz,xu->xyzu", g, gt)
        + np.einsum("xu,yz->xyzu", g, gt)
        - np.einsum("xz,yu->xyzu", g, gt)
        - np.einsum("yu,xz->xyzu", g, gt)
    )
    return pi1, pi2


def l2_model_tensor(g: np.ndarray, gt: np.ndarray, tau_t: Scalar, tau_star_t: Scalar) -> np.ndarray:
    """R~ = (tau~*/3 + tau~/6) pi1 + (tau~*/3) pi2, the curvature of every L2 associated manifold"""
    mode = mode_of(g, gt)
    three, six = to_scalar(3, mode), to_scalar(6, mode)
    pi1, pi2 = kulkarni_terms(g, gt)
    return (tau_star_t / three + tau_t / six) * pi1 + (tau_star_t / three) * pi2


def check_l2_model(bundle_gt: CurvatureBundle, g: np.ndarray, tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    model = l2_model_tensor(g, bundle_gt.metric, bundle_gt.tau, bundle_gt.tau_star)
    return compare(bundle_gt.riemann, model, tolerance)


def _require_l2(R: np.ndarray, tolerance: Tolerance) -> None:
    l2 = is_l2_components(R, tolerance)
    if l2.verdict is Verdict.FAILS:
        raise NotInL2(f"Curvature is not in L2 (residual {float(l2.residual):.3e})")


def check_l1_scalar_relation(bundle_gt: CurvatureBundle, tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    """
    tau~* = -tau~, which on L2 associated manifolds is equivalent to L1

    Raises:
        NotInL2: the curvature tensor is not in L2
    """
    _require_l2(bundle_gt.riemann, tolerance)
    scale = max(abs(bundle_gt.tau), abs(bundle_gt.tau_star))
    return judge(abs(bundle_gt.tau_star + bundle_gt.tau), scale, tolerance)


def check_l1_ricci_degenerate(
    rho_gt: np.ndarray,
    g: Optional[np.ndarray] = None,
    tau_t: Optional[Scalar] = None,
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> Check:
    """
    det rho~ = 0; with g and tau~ also rho~_11 = tau~/3 (B - A) and
    rho~_12 = tau~/6 (A - B)
    """
    checks = [judge(abs(det3(rho_gt)), max_abs(rho_gt) ** 3, tolerance)]
    if g is not None and tau_t is not None:
        mode = mode_of(rho_gt, g)
        A, B = g[0, 0], g[0, 1]
        expected_11 = tau_t / to_scalar(3, mode) * (B - A)
        expected_12 = tau_t / to_scalar(6, mode) * (A - B)
        checks.append(compare([rho_gt[0, 0], rho_gt[0, 1]], [expected_11, expected_12], tolerance))
    return combine(checks)


def check_l1_curvature_form(bundle_gt: CurvatureBundle, g: np.ndarray,
                            tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    """R~ = -tau~/6 (pi1 + 2 pi2) on L1 associated manifolds"""
    pi1, pi2 = kulkarni_terms(g, bundle_gt.metric)
    six = to_scalar(6, bundle_gt.mode)
    return compare(bundle_gt.riemann, -bundle_gt.tau / six * (pi1 + 2 * pi2), tolerance)


def l2_component_values(A: Scalar, B: Scalar, tau_t: Scalar, tau_star_t: Scalar) -> Tuple[Scalar, Scalar]:
    """
    (R~_1212, R~_1213) of an L2 associated manifold over circulant(A, B)

    R~_1212 = tau~*/3 (A^2 - B^2) + tau~/6 (A^2 + 2AB - 3B^2)
    R~_1213 = tau~*/3 (AB - B^2) + tau~/6 (A^2 - B^2)
    """
    mode = mode_of(A, B, tau_t, tau_star_t)
    three, six = to_scalar(3, mode), to_scalar(6, mode)
    r1212 = tau_star_t / three * (A * A - B * B) + tau_t / six * (A * A + 2 * A * B - 3 * B * B)
    r1213 = tau_star_t / three * (A * B - B * B) + tau_t / six * (A * A - B * B)
    return r1212, r1213


def check_l2_components_closed_form(bundle_gt: CurvatureBundle, g: np.ndarray,
                                    tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    r1212, r1213 = l2_component_values(g[0, 0], g[0, 1], bundle_gt.tau, bundle_gt.tau_star)
    R = bundle_gt.riemann
    actual = [R[_R1212], R[_R1313], R[_R2323], R[_R1213], R[_R1323], -R[_R1223]]
    expected = [r1212, r1212, r1212, r1213, r1213, r1213]
    return compare(actual, expected, tolerance)


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------

def classify(
    bundle: CurvatureBundle,
    g: np.ndarray,
    gt: np.ndarray,
    side: Side = Side.GT,
    nabla: Optional[np.ndarray] = None,
    cj: Optional[CirculantJet] = None,
    samples: int = 64,
    seed: Optional[int] = 42,
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> ClassReport:
    """
    Classify one metric of the pair

    Args:
        bundle: Curvature of the metric being classified
        g: Circulant metric of the pair
        gt: Associated metric of the pair
        side: Which of the two metrics the bundle belongs to
        nabla: (nabla_i Q)^k_j for the L0 test; skipped when absent
        cj: Circulant jet, enables the gradient form of the L0 test
        samples: Number of random tuples for the quantified predicates
        seed: Seed of the quantified predicates

    Returns:
        ClassReport with verdicts, decomposition and named residuals
    """
    R = bundle.riemann
    residuals: Dict[str, CheckResult] = {}

    l2 = is_l2_components(R, tolerance)
    l1 = is_l1_components(R, tolerance)
    residuals["l2_quantified"] = is_l2_quantified(R, samples, seed, tolerance)
    residuals["l1_quantified"] = is_l1_quantified(R, samples, seed, tolerance)
    residuals["curvature_symmetries"] = curvature_symmetry_check(R, tolerance)
    residuals["reconstruction"] = check_reconstruction(bundle, tolerance)

    if nabla is not None and bundle.gamma is not None:
        l0: CheckResult = judge_nabla(nabla, bundle.gamma, tolerance)
    else:
        l0 = Skipped("no connection data")
    if cj is not None:
        gradient = is_l0_gradient(cj, tolerance) if side is Side.G else is_l0_gradient_associated(cj, tolerance)
        residuals["l0_gradient"] = gradient
    else:
        residuals["l0_gradient"] = Skipped("not a circulant jet")

    report = ClassReport(side=side, l0=l0, l1=l1, l2=l2, residuals=residuals)

    residuals["circulant_ricci"] = is_circulant_ricci(bundle.ricci, tolerance)
    try:
        dec = einstein_decompose(bundle.ricci, g, gt, tolerance, side=side)
        report.einstein_alpha = dec.alpha
        report.einstein_beta = dec.beta
        report.decomposition_valid = True
        report.einstein = is_einstein(dec, bundle, tolerance)
        residuals["decomposition"] = judge(dec.residual, max_abs(bundle.ricci), tolerance)
        residuals["l2_ricci_coefficients"] = (
            check_l2_decomposition(dec, bundle, tolerance) if l2.holds else Skipped("not in L2")
        )
    except NotCirculantRicci as exc:
        log.debug(f"No Einstein decomposition: {exc}")
        residuals["decomposition"] = Skipped(str(exc))
        residuals["l2_ricci_coefficients"] = Skipped("Ricci tensor is not circulant")

    if side is Side.GT:
        _associated_checks(report, bundle, g, tolerance)
    else:
        for name in _ASSOCIATED_CHECKS:
            residuals[name] = Skipped("applies to the associated metric")

    _check_nesting(report)
    return report


_ASSOCIATED_CHECKS = (
    "l2_model",
    "l2_components_closed_form",
    "l1_scalar_relation",
    "l1_ricci_degenerate",
    "l1_curvature_form",
)


def _associated_checks(report: ClassReport, bundle: CurvatureBundle, g: np.ndarray, tolerance: Tolerance) -> None:
    residuals = report.residuals
    if not report.l2.holds:
        for name in _ASSOCIATED_CHECKS:
            residuals[name] = Skipped("not in L2")
        return
    residuals["l2_model"] = check_l2_model(bundle, g, tolerance)
    residuals["l2_components_closed_form"] = check_l2_components_closed_form(bundle, g, tolerance)
    residuals["l1_scalar_relation"] = check_l1_scalar_relation(bundle, tolerance)
    if report.l1.holds:
        residuals["l1_ricci_degenerate"] = check_l1_ricci_degenerate(bundle.ricci, g, bundle.tau, tolerance)
        residuals["l1_curvature_form"] = check_l1_curvature_form(bundle, g, tolerance)
    else:
        residuals["l1_ricci_degenerate"] = Skipped("not in L1")
        residuals["l1_curvature_form"] = Skipped("not in L1")


def _check_nesting(report: ClassReport) -> None:
    if isinstance(report.l0, Check) and report.l0.holds and not report.l1.holds:
        log.warning(f"L0 holds but L1 does not ({report.side.value} side, residual {report.l1.residual})")
    if report.l1.holds and not report.l2.holds:
        log.warning(f"L1 holds but L2 does not ({report.side.value} side, residual {report.l2.residual})")
