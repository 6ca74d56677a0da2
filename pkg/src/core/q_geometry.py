"""
Q-basis geometry of the associated metric

Angles of Q-bases, isotropy, degeneracy of the planes {x, Qx},
sectional and Ricci curvatures, their closed forms on L2 manifolds and
the limit values at degenerate planes and isotropic directions.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..utils.logger import get_logger
from .errors import (
    DegeneratePlane,
    IsotropicDirection,
    NotAQBasis,
    NotDegeneratePlane,
    NotEinstein,
    PositivityViolation,
    SearchFailed,
)
from .tensor3 import (
    DEFAULT_TOLERANCE,
    Q_ACTION,
    Check,
    Scalar,
    Tolerance,
    Verdict,
    apply_q,
    bilinear,
    compare,
    combine,
    det3,
    evaluate4,
    is_exact_scalar,
    judge,
    max_abs,
    mode_of,
    q_orbit,
    quadratic,
    to_scalar,
)


log = get_logger("QGeometry")

# cos of the angle at which {x, Qx} degenerates under g~
DEGENERATE_COS = Fraction(-1, 3)
DEGENERATE_PHI = float(np.arccos(-1.0 / 3.0))
DEGENERATE_WINDOW = 1e-9

DEFAULT_LIMIT_OFFSETS = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)
DEFAULT_LIMIT_CONVERGENCE = 1e-6


@dataclass(frozen=True, eq=False)
class QBasisData:
    """A vector x with its Q-orbit and the angle phi = angle(x, Qx) under g"""

    x: np.ndarray
    qx: np.ndarray
    q2x: np.ndarray
    cos_phi: Scalar
    phi: float
    norm_g: Scalar
    angle_check: Check

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "cos_phi": self.cos_phi,
            "phi": self.phi,
            "norm_g": self.norm_g,
            "angle_check": self.angle_check.to_dict(),
        }


@dataclass
class LimitTrace:
    """Sequence of values approaching a limit definition"""

    limit: Scalar
    offsets: List[float] = field(default_factory=list)
    values: List[float] = field(default_factory=list)
    converged: bool = False
    check: Optional[Check] = None

    def to_dict(self) -> dict:
        return {
            "limit": self.limit,
            "offsets": self.offsets,
            "values": self.values,
            "converged": self.converged,
            "check": self.check.to_dict() if self.check else None,
        }


# ---------------------------------------------------------------------------
# Q-bases
# ---------------------------------------------------------------------------

def phi_grid(points: int) -> List[float]:
    """
    Equally spaced interior angles of (0, 2pi/3)

    Grid points that land on pi/2 or on the degenerate angle are dropped,
    since both are only reachable through limits.
    """
    step = (2.0 * np.pi / 3.0) / (points + 1)
    grid = [(i + 1) * step for i in range(points)]
    return [phi for phi in grid if abs(phi - np.pi / 2) > 1e-6 and abs(phi - DEGENERATE_PHI) > 1e-6]


def is_degenerate_angle(cos_phi: Scalar) -> bool:
    """Routing test for the degenerate angle arccos(-1/3)"""
    if is_exact_scalar(cos_phi):
        return cos_phi == DEGENERATE_COS
    return abs(float(cos_phi) + 1.0 / 3.0) <= DEGENERATE_WINDOW


def q_basis_data(x: np.ndarray, g: np.ndarray, tolerance: Tolerance = DEFAULT_TOLERANCE) -> QBasisData:
    """
    Angle data of the Q-basis induced by x

    Raises:
        NotAQBasis: x, Qx, Q^2x are linearly dependent
    """
    x, qx, q2x = q_orbit(x)
    frame = np.array([x, qx, q2x], dtype=x.dtype)
    det = det3(frame)
    if is_exact_scalar(det):
        dependent = det == 0
    else:
        dependent = abs(det) <= tolerance.eps_abs * max(float(max_abs(x)), 1.0) ** 3
    if dependent or max_abs(x) == 0:
        raise NotAQBasis(f"Vector {list(x)} does not induce a Q-basis (det = {det})")

    norm = quadratic(g, x)
    cos_phi = bilinear(g, x, qx) / norm

    # |Qx| = |x| and the three pairwise angles coincide for a Q-invariant g
    angle_check = combine([
        compare([quadratic(g, qx), quadratic(g, q2x)], [norm, norm], tolerance),
        compare([bilinear(g, qx, q2x), bilinear(g, x, q2x)], [cos_phi * norm, cos_phi * norm], tolerance),
    ])
    if angle_check.verdict is Verdict.FAILS:
        log.warning(f"Q-basis angles differ (residual {float(angle_check.residual):.3e}); g is not Q-invariant")

    phi = float(np.arccos(np.clip(float(cos_phi), -1.0, 1.0)))
    if not (-0.5 < float(cos_phi) < 1.0):
        log.warning(f"Angle phi = {phi:.6f} lies outside (0, 2pi/3)")

    return QBasisData(x=x, qx=qx, q2x=q2x, cos_phi=cos_phi, phi=phi, norm_g=norm, angle_check=angle_check)


def gtilde_gram(qb: QBasisData) -> np.ndarray:
    """
    Gram matrix of {x, Qx, Q^2x} under g~ from the angle alone

    diagonal 2 g(x,x) cos phi, off-diagonal g(x,x) (cos phi + 1)
    """
    diagonal = 2 * qb.norm_g * qb.cos_phi
    off = qb.norm_g * (qb.cos_phi + 1)
    dtype = object if is_exact_scalar(diagonal) else float
    return np.array([[diagonal, off, off], [off, diagonal, off], [off, off, diagonal]], dtype=dtype)


def direct_gram(qb: QBasisData, gt: np.ndarray) -> np.ndarray:
    """Gram matrix of {x, Qx, Q^2x} by direct evaluation of g~"""
    frame = np.array([qb.x, qb.qx, qb.q2x], dtype=qb.x.dtype)
    return frame @ gt @ frame.T


def plane_degeneracy(qb: QBasisData, tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    """
    {x, Qx} is degenerate under g~

    Judged on |cos phi + 1/3| against DEGENERATE_WINDOW; only the
    borderline factor is taken from tolerance.
    """
    if is_exact_scalar(qb.cos_phi):
        return judge(abs(qb.cos_phi - DEGENERATE_COS), 0)
    window = Tolerance(eps_rel=tolerance.eps_rel, eps_abs=DEGENERATE_WINDOW,
                       borderline_factor=tolerance.borderline_factor)
    return judge(abs(float(qb.cos_phi) + 1.0 / 3.0), 0.0, window)


def plane_nondegenerate(qb: QBasisData, tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    """
    {x, Qx} is non-degenerate under g~

    Holds iff phi != arccos(-1/3); the planes {x, Q^2x} and {Qx, Q^2x}
    then are non-degenerate as well.
    """
    degeneracy = plane_degeneracy(qb, tolerance)
    inverted = {
        Verdict.HOLDS: Verdict.FAILS,
        Verdict.BORDERLINE: Verdict.BORDERLINE,
        Verdict.FAILS: Verdict.HOLDS,
    }
    return Check(inverted[degeneracy.verdict], degeneracy.residual, degeneracy.scale)


# ---------------------------------------------------------------------------
# Sectional curvature
# ---------------------------------------------------------------------------

def _gram_determinant(gt: np.ndarray, x: np.ndarray, y: np.ndarray) -> Tuple[Scalar, Scalar]:
    xx, yy, xy = quadratic(gt, x), quadratic(gt, y), bilinear(gt, x, y)
    return xx * yy - xy * xy, abs(xx * yy) + xy * xy


def sectional_curvature(R: np.ndarray, gt: np.ndarray, x: np.ndarray, y: np.ndarray,
                        tolerance: Tolerance = DEFAULT_TOLERANCE) -> Scalar:
    """
    k(x, y) = R(x, y, x, y) / (g~(x,x) g~(y,y) - g~(x,y)^2)

    Raises:
        DegeneratePlane: the Gram determinant vanishes
    """
    denominator, scale = _gram_determinant(gt, x, y)
    degeneracy = judge(abs(denominator), scale, tolerance)
    if degeneracy.verdict is Verdict.HOLDS:
        raise DegeneratePlane(f"Plane spanned by {list(x)} and {list(y)} is degenerate")
    if degeneracy.verdict is Verdict.BORDERLINE:
        log.warning(f"Plane is close to degenerate (Gram determinant {float(denominator):.3e})")
    return evaluate4(R, x, y, x, y) / denominator


def q_plane_curvatures(R: np.ndarray, gt: np.ndarray, qb: QBasisData,
                       tolerance: Tolerance = DEFAULT_TOLERANCE) -> Tuple[Scalar, Scalar, Scalar]:
    """Sectional curvatures of {x, Qx}, {x, Q^2x} and {Qx, Q^2x}"""
    return (
        sectional_curvature(R, gt, qb.x, qb.qx, tolerance),
        sectional_curvature(R, gt, qb.x, qb.q2x, tolerance),
        sectional_curvature(R, gt, qb.qx, qb.q2x, tolerance),
    )


def _constants(*values) -> Tuple[Scalar, Scalar]:
    mode = mode_of(*values)
    return to_scalar(3, mode), to_scalar(6, mode)


def q_plane_curvature_closed_form(tau_t: Scalar, tau_star_t: Scalar, cos_phi: Scalar) -> Scalar:
    """
    Sectional curvature of the Q-planes of an L2 associated manifold

        k = -tau~* (1 + cos phi) / (3 (1 + 3 cos phi)) - tau~/6

    Raises:
        DegeneratePlane: cos phi = -1/3
    """
    if is_degenerate_angle(cos_phi):
        raise DegeneratePlane("Closed form is undefined at phi = arccos(-1/3)")
    three, six = _constants(tau_t, tau_star_t, cos_phi)
    return -tau_star_t * (1 + cos_phi) / (three * (1 + 3 * cos_phi)) - tau_t / six


def q_plane_numerator_closed_form(tau_t: Scalar, tau_star_t: Scalar, cos_phi: Scalar, norm_g: Scalar) -> Scalar:
    """R~(x, Qx, x, Qx) = [tau~*/3 (1 - cos^2) + tau~/6 (1 - cos)(1 + 3 cos)] g(x,x)^2"""
    three, six = _constants(tau_t, tau_star_t, cos_phi, norm_g)
    c = cos_phi
    return (tau_star_t / three * (1 - c * c) + tau_t / six * (1 - c) * (1 + 3 * c)) * norm_g * norm_g


def degenerate_plane_numerator(R: np.ndarray, x: np.ndarray, g: np.ndarray,
                               tolerance: Tolerance = DEFAULT_TOLERANCE) -> Scalar:
    """
    R~(x, Qx, x, Qx) on a degenerate plane

    Equals 8 tau~*/27 g(x,x)^2 on L2 manifolds, so it vanishes exactly in
    the Einstein case.

    Raises:
        NotDegeneratePlane: phi is not arccos(-1/3)
    """
    qb = q_basis_data(x, g, tolerance)
    if not is_degenerate_angle(qb.cos_phi):
        raise NotDegeneratePlane(f"cos phi = {qb.cos_phi} is not -1/3")
    return evaluate4(R, qb.x, qb.qx, qb.x, qb.qx)


def _require_einstein(tau_star_t: Scalar, tau_t: Scalar, tolerance: Tolerance) -> None:
    check = judge(abs(tau_star_t), max(abs(tau_t), abs(tau_star_t)), tolerance)
    if check.verdict is not Verdict.HOLDS:
        raise NotEinstein(f"Limit value requires tau~* = 0, got {tau_star_t}")


def limit_sectional(tau_t: Scalar, tau_star_t: Scalar = 0,
                    tolerance: Tolerance = DEFAULT_TOLERANCE) -> Scalar:
    """
    Sectional curvature of a degenerate Q-plane, defined as a limit

    Raises:
        NotEinstein: tau~* != 0
    """
    _require_einstein(tau_star_t, tau_t, tolerance)
    six = _constants(tau_t)[1]
    return -tau_t / six


def _trace(limit: Scalar, offsets: Sequence[float], evaluate, convergence: float) -> LimitTrace:
    trace = LimitTrace(limit=limit, offsets=list(offsets))
    for offset in offsets:
        trace.values.append(float(evaluate(offset)))
    bound = convergence * (1.0 + abs(float(limit)))
    steps = np.abs(np.diff(trace.values)) if len(trace.values) > 1 else np.array([np.inf])
    final = abs(trace.values[-1] - float(limit))
    trace.converged = bool(steps[-1] < bound and final < bound)
    tol = Tolerance(eps_rel=convergence, eps_abs=convergence)
    trace.check = judge(final, 1.0 + abs(float(limit)), tol)
    return trace


def limit_sectional_numeric(
    R: np.ndarray,
    g: np.ndarray,
    gt: np.ndarray,
    tau_t: Scalar,
    tau_star_t: Scalar = 0,
    offsets: Sequence[float] = DEFAULT_LIMIT_OFFSETS,
    convergence: float = DEFAULT_LIMIT_CONVERGENCE,
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> LimitTrace:
    """Evaluate k~(x, Qx) along phi_n = arccos(-1/3) + offset and compare with the limit"""
    limit = limit_sectional(tau_t, tau_star_t, tolerance)
    R, g, gt = (np.asarray(a).astype(float) for a in (R, g, gt))

    def evaluate(offset: float) -> float:
        x = vector_with_angle(g, float(np.cos(DEGENERATE_PHI + offset)), tolerance)
        return sectional_curvature(R, gt, x, apply_q(x), Tolerance(eps_rel=1e-15, eps_abs=1e-300))

    return _trace(limit, offsets, evaluate, convergence)


# ---------------------------------------------------------------------------
# Isotropy and Ricci curvature
# ---------------------------------------------------------------------------

def is_isotropic(x: np.ndarray, gt: np.ndarray, tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    """g~(x, x) = 0; for Q-basis vectors this is phi = pi/2"""
    value = quadratic(gt, x)
    return judge(abs(value), max_abs(gt) * max_abs(x) ** 2, tolerance)


def ricci_curvature(rho: np.ndarray, gt: np.ndarray, x: np.ndarray,
                    tolerance: Tolerance = DEFAULT_TOLERANCE) -> Scalar:
    """
    r~(x) = rho~(x, x) / g~(x, x)

    Raises:
        IsotropicDirection: g~(x, x) vanishes within tolerance
    """
    isotropy = is_isotropic(x, gt, tolerance)
    if isotropy.verdict is not Verdict.FAILS:
        raise IsotropicDirection(f"Direction {list(x)} is isotropic (g~(x,x) = {isotropy.residual})")
    return quadratic(rho, x) / quadratic(gt, x)


def ricci_curvature_closed_form(tau_t: Scalar, tau_star_t: Scalar, cos_phi: Scalar) -> Scalar:
    """
    r~(x) = tau~*/(6 cos phi) + tau~*/6 + tau~/3 on L2 associated manifolds

    Raises:
        IsotropicDirection: cos phi = 0
    """
    if cos_phi == 0:
        raise IsotropicDirection("Closed form is undefined at phi = pi/2")
    three, six = _constants(tau_t, tau_star_t, cos_phi)
    return tau_star_t / (six * cos_phi) + tau_star_t / six + tau_t / three


def isotropic_ricci_value(tau_star_t: Scalar, norm_g: Scalar) -> Scalar:
    """rho~(x, x) = tau~*/3 g(x, x) along an isotropic x"""
    return tau_star_t / _constants(tau_star_t, norm_g)[0] * norm_g


def limit_ricci(tau_t: Scalar, tau_star_t: Scalar = 0, tolerance: Tolerance = DEFAULT_TOLERANCE) -> Scalar:
    """
    Ricci curvature in an isotropic direction, defined as a limit

    Raises:
        NotEinstein: tau~* != 0
    """
    _require_einstein(tau_star_t, tau_t, tolerance)
    three = _constants(tau_t)[0]
    return tau_t / three


def limit_ricci_numeric(
    rho: np.ndarray,
    g: np.ndarray,
    gt: np.ndarray,
    tau_t: Scalar,
    tau_star_t: Scalar = 0,
    offsets: Sequence[float] = DEFAULT_LIMIT_OFFSETS,
    convergence: float = DEFAULT_LIMIT_CONVERGENCE,
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> LimitTrace:
    """Evaluate r~(x) along phi_n = pi/2 + offset and compare with the limit"""
    limit = limit_ricci(tau_t, tau_star_t, tolerance)
    rho, g, gt = (np.asarray(a).astype(float) for a in (rho, g, gt))

    def evaluate(offset: float) -> float:
        x = vector_with_angle(g, float(np.cos(np.pi / 2 + offset)), tolerance)
        return ricci_curvature(rho, gt, x, Tolerance(eps_rel=1e-15, eps_abs=1e-300))

    return _trace(limit, offsets, evaluate, convergence)


# ---------------------------------------------------------------------------
# Constructing Q-bases
# ---------------------------------------------------------------------------

def _require_positive_definite(g: np.ndarray) -> None:
    minors = (g[0, 0], g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0], det3(g))
    if not all(m > 0 for m in minors):
        raise PositivityViolation("Metric must be positive definite")


def find_orthonormal_q_basis(
    g: np.ndarray,
    tolerance: Tolerance = DEFAULT_TOLERANCE,
    max_iterations: int = 100,
    target: float = 1e-13,
) -> np.ndarray:
    """
    Vector x with g(x, x) = 1 and g(x, Qx) = 0

    Damped Gauss-Newton on F(x) = (g(x,x) - 1, g(x,Qx)) with least-norm
    steps, started from e1 - t(1,1,1) for a few t.

    Raises:
        PositivityViolation: g is not positive definite
        SearchFailed: no seed converged to a Q-basis vector
    """
    _require_positive_definite(g)
    g = np.asarray(g).astype(float)
    q = Q_ACTION.astype(float)
    gq = g @ q + q.T @ g

    def residual(v: np.ndarray) -> np.ndarray:
        return np.array([v @ g @ v - 1.0, v @ g @ (q @ v)])

    for t in (0.0, 0.25, -0.25, 0.5, -0.5, 1.0):
        x = np.array([1.0, 0.0, 0.0]) - t * np.ones(3)
        x = x / np.sqrt(x @ g @ x)
        for _ in range(max_iterations):
            f = residual(x)
            if np.max(np.abs(f)) <= target:
                break
            jacobian = np.vstack([2.0 * g @ x, gq @ x])
            step = np.linalg.lstsq(jacobian, -f, rcond=None)[0]
            damping = 1.0
            while damping > 1e-6:
                candidate = x + damping * step
                if np.linalg.norm(residual(candidate)) < np.linalg.norm(f):
                    break
                damping *= 0.5
            x = x + damping * step
        f = residual(x)
        if np.max(np.abs(f)) > 1e-10:
            log.debug(f"Seed t={t} did not converge (residual {np.max(np.abs(f)):.3e})")
            continue
        try:
            q_basis_data(x, g, tolerance)
        except NotAQBasis:
            continue
        log.debug(f"Orthonormal Q-basis from seed t={t}: {x}")
        return x

    raise SearchFailed("No seed converged to an orthonormal Q-basis")


def vector_with_angle(g: np.ndarray, cos_phi: float, tolerance: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """
    g-unit vector whose Q-basis has the prescribed angle

    Built from an orthonormal Q-basis {e, Qe, Q^2e}: x = s f + w p with f
    the unit fixed direction of Q and p a unit vector orthogonal to it,
    so cos phi = (3 s^2 - 1)/2. Reachable angles: cos phi in (-1/2, 1).
    """
    c = float(cos_phi)
    if not -0.5 < c < 1.0:
        raise NotAQBasis(f"cos phi = {c} is outside (-1/2, 1)")
    g = np.asarray(g).astype(float)
    e, qe, q2e = q_orbit(find_orthonormal_q_basis(g, tolerance))
    fixed = (e + qe + q2e) / np.sqrt(3.0)
    perpendicular = (e - qe) / np.sqrt(2.0)
    s = np.sqrt((2.0 * c + 1.0) / 3.0)
    return s * fixed + np.sqrt(1.0 - s * s) * perpendicular
