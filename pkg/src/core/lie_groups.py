"""
Left-invariant geometry on 3-dimensional Lie groups

The basis {x1, x2, x3} of the Lie algebra is orthonormal for g, Q acts
by Qx1 = x2, Qx2 = x3, Qx3 = x1, and the associated metric has
g~(x_i, x_i) = 0, g~(x_i, x_j) = 1 for i != j. All curvature is
algebraic in the structure constants, so exact rational arithmetic is
the default here.
"""

from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

import numpy as np

from ..utils.logger import get_logger
from .errors import NotALieAlgebra, ParseError, WrongFamily
from .metric_jets import CurvatureBundle, bundle_from_riemann
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
    convert,
    half,
    invert_sym3,
    judge,
    max_abs,
    mode_of,
    to_scalar,
    zeros,
)


log = get_logger("LieGroups")

# Bivector index of each ordered pair, with its sign
_PAIRS = {(0, 1): (0, 1), (1, 0): (0, -1), (0, 2): (1, 1), (2, 0): (1, -1), (1, 2): (2, 1), (2, 1): (2, -1)}


def _jacobi_terms(C: np.ndarray) -> np.ndarray:
    """[x_i,[x_j,x_l]] + [x_j,[x_l,x_i]] + [x_l,[x_i,x_j]], indexed [i, j, l, n]"""
    return (
        np.einsum("jlm,imn->ijln", C, C)
        + np.einsum("lim,jmn->ijln", C, C)
        + np.einsum("ijm,lmn->ijln", C, C)
    )


@dataclass(frozen=True, eq=False)
class LieAlgebra3:
    """
    Real 3-dimensional Lie algebra by its structure constants

    constants[i, j, k] = c^k_ij with [x_i, x_j] = c^k_ij x_k (0-based).
    """

    constants: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        C = self.constants
        if np.shape(C) != (DIM,) * 3:
            raise ParseError("Structure constants must have shape (3, 3, 3)")
        antisymmetry = judge(max_abs(C + np.einsum("jik->ijk", C)), max_abs(C))
        if antisymmetry.verdict is Verdict.FAILS:
            raise NotALieAlgebra(f"Brackets are not antisymmetric (residual {antisymmetry.residual})")
        jacobi = self.jacobi_check()
        if jacobi.verdict is Verdict.FAILS:
            raise NotALieAlgebra(f"Jacobi identity fails (residual {jacobi.residual})")

    @property
    def mode(self) -> ArithmeticMode:
        return mode_of(self.constants)

    def bracket(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.constants)

    def jacobi_residual(self) -> Scalar:
        return max_abs(_jacobi_terms(self.constants))

    def jacobi_check(self, tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
        return judge(self.jacobi_residual(), max_abs(self.constants) ** 2, tolerance)

    def is_abelian(self) -> bool:
        return max_abs(self.constants) == 0

    def to_mode(self, mode: ArithmeticMode) -> "LieAlgebra3":
        return LieAlgebra3(constants=convert(self.constants, mode), name=self.name)

    @classmethod
    def from_brackets(cls, brackets: Dict[Tuple[int, int], Sequence], mode: ArithmeticMode = ArithmeticMode.EXACT,
                      name: str = "custom") -> "LieAlgebra3":
        """
        Build from the brackets of basis pairs

        Args:
            brackets: {(i, j): [c1, c2, c3]} with 1-based i < j, meaning
                [x_i, x_j] = c1 x1 + c2 x2 + c3 x3; missing pairs commute
        """
        C = zeros((DIM,) * 3, mode)
        for (i, j), coefficients in brackets.items():
            if not (1 <= i < j <= DIM):
                raise ParseError(f"Bracket index pair ({i}, {j}) must satisfy 1 <= i < j <= 3")
            values = as_array(coefficients, mode)
            C[i - 1, j - 1] = values
            C[j - 1, i - 1] = -values
        return cls(constants=C, name=name)


@dataclass(frozen=True)
class FamilyParams:
    """Parameters of one of the two bracket families"""

    family: int
    lambdas: Tuple

    def __post_init__(self):
        arity = {1: 3, 2: 2}
        if self.family not in arity:
            raise ParseError(f"Unknown Lie family {self.family}")
        if len(self.lambdas) != arity[self.family]:
            raise ParseError(f"Family {self.family} takes {arity[self.family]} parameters, got {len(self.lambdas)}")

    def algebra(self, mode: ArithmeticMode = ArithmeticMode.EXACT) -> LieAlgebra3:
        if self.family == 1:
            return family1(*self.lambdas, mode=mode)
        return family2(*self.lambdas, mode=mode)


@dataclass(frozen=True, eq=False)
class InvariantConnection:
    """nabla_{x_i} x_j = coefficients[i, j, k] x_k"""

    coefficients: np.ndarray
    metric: np.ndarray

    def as_christoffel(self) -> np.ndarray:
        """Same data in the gamma[k, i, j] layout of the jet engine"""
        return np.einsum("ijk->kij", self.coefficients)


# ---------------------------------------------------------------------------
# The two families
# ---------------------------------------------------------------------------

def family1(l1, l2, l3, mode: ArithmeticMode = ArithmeticMode.EXACT) -> LieAlgebra3:
    """[x1,x2] = l1 x1 + l2 x2, [x2,x3] = l3 x2 - l1 x3, [x1,x3] = l3 x1 + l2 x3"""
    l1, l2, l3 = (to_scalar(v, mode) for v in (l1, l2, l3))
    zero = to_scalar(0, mode)
    return LieAlgebra3.from_brackets(
        {
            (1, 2): [l1, l2, zero],
            (2, 3): [zero, l3, -l1],
            (1, 3): [l3, zero, l2],
        },
        mode,
        name="family1",
    )


def family2(l1, l2, mode: ArithmeticMode = ArithmeticMode.EXACT) -> LieAlgebra3:
    """[x1,x2] = [x2,x3] = -[x1,x3] = l1 x1 + l2 x2 - (l1 + l2) x3"""
    l1, l2 = (to_scalar(v, mode) for v in (l1, l2))
    v = [l1, l2, -(l1 + l2)]
    return LieAlgebra3.from_brackets(
        {(1, 2): v, (2, 3): v, (1, 3): [-c for c in v]},
        mode,
        name="family2",
    )


def lie_metrics(mode: ArithmeticMode = ArithmeticMode.EXACT) -> Tuple[np.ndarray, np.ndarray]:
    """(g, g~) on the distinguished basis: identity and circulant(0, 1)"""
    one, zero = to_scalar(1, mode), to_scalar(0, mode)
    return circulant_sym(one, zero), circulant_sym(zero, one)


# ---------------------------------------------------------------------------
# Connection and curvature
# ---------------------------------------------------------------------------

def koszul_connection(alg: LieAlgebra3, metric: np.ndarray, tolerance: Tolerance = DEFAULT_TOLERANCE) -> InvariantConnection:
    """
    Levi-Civita connection of a left-invariant metric

        2 m(nabla_i x_j, x_k) = m([x_i,x_j],x_k) + m([x_k,x_i],x_j) + m([x_k,x_j],x_i)
    """
    C = alg.constants
    mode = mode_of(C, metric)
    lowered = half(mode) * (
        np.einsum("ija,ak->ijk", C, metric)
        + np.einsum("kia,aj->ijk", C, metric)
        + np.einsum("kja,ai->ijk", C, metric)
    )
    coefficients = np.einsum("ijk,kb->ijb", lowered, invert_sym3(metric, tolerance))
    return InvariantConnection(coefficients=coefficients, metric=metric)


def connection_checks(conn: InvariantConnection, alg: LieAlgebra3,
                      tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    """Torsion-freeness against the brackets and compatibility with the metric"""
    N, m = conn.coefficients, conn.metric
    torsion = N - np.einsum("jik->ijk", N) - alg.constants
    compatibility = np.einsum("ija,ak->ijk", N, m) + np.einsum("ika,ja->ijk", N, m)
    scale = max_abs(N, alg.constants)
    return combine([judge(max_abs(torsion), scale, tolerance), judge(max_abs(compatibility), scale, tolerance)])


def invariant_riemann(conn: InvariantConnection, alg: LieAlgebra3) -> np.ndarray:
    """
    R_ijkl = m(R(x_i, x_j) x_k, x_l) with

        R(x_i,x_j)x_k = nabla_i nabla_j x_k - nabla_j nabla_i x_k - nabla_[x_i,x_j] x_k
    """
    N, C = conn.coefficients, alg.constants
    op = (
        np.einsum("jkm,imn->ijkn", N, N)
        - np.einsum("ikm,jmn->ijkn", N, N)
        - np.einsum("ijm,mkn->ijkn", C, N)
    )
    return np.einsum("ijkn,nl->ijkl", op, conn.metric)


def invariant_curvature(conn: InvariantConnection, alg: LieAlgebra3, metric: np.ndarray, dual: np.ndarray,
                        tolerance: Tolerance = DEFAULT_TOLERANCE) -> CurvatureBundle:
    """
    Curvature bundle of a left-invariant metric

    Args:
        conn: Koszul connection of the same algebra and metric
        alg: The Lie algebra
        metric: The metric the connection belongs to
        dual: Inverse of the other metric of the pair, for the starred scalar
    """
    R = invariant_riemann(conn, alg)
    return bundle_from_riemann(R, metric, dual, gamma=conn.as_christoffel(), tolerance=tolerance)


def nabla_q_invariant_tensor(conn: InvariantConnection) -> np.ndarray:
    """out[i, k, j]: k-th component of (nabla_{x_i} Q) x_j = nabla_{x_i}(Q x_j) - Q nabla_{x_i} x_j"""
    N = conn.coefficients
    q = convert(Q_ACTION, mode_of(N))
    return np.einsum("mj,imk->ikj", q, N) - np.einsum("ijm,km->ikj", N, q)


def nabla_q_invariant(conn: InvariantConnection) -> Scalar:
    """max |(nabla_{x_i} Q) x_j| over all i, j"""
    return max_abs(nabla_q_invariant_tensor(conn))


@dataclass
class LieGeometry:
    """Both metrics of a Lie instance with their connections and curvature"""

    algebra: LieAlgebra3
    g: np.ndarray
    gt: np.ndarray
    connection_g: InvariantConnection
    connection_gt: InvariantConnection
    bundle_g: CurvatureBundle
    bundle_gt: CurvatureBundle
    checks: Dict[str, Check] = field(default_factory=dict)


def lie_geometry(alg: LieAlgebra3, tolerance: Tolerance = DEFAULT_TOLERANCE) -> LieGeometry:
    """Connections and curvature bundles of (G, g, Q) and (G, g~, Q)"""
    g, gt = lie_metrics(alg.mode)
    g_inv, gt_inv = invert_sym3(g, tolerance), invert_sym3(gt, tolerance)
    connection_g = koszul_connection(alg, g, tolerance)
    connection_gt = koszul_connection(alg, gt, tolerance)
    geometry = LieGeometry(
        algebra=alg,
        g=g,
        gt=gt,
        connection_g=connection_g,
        connection_gt=connection_gt,
        bundle_g=invariant_curvature(connection_g, alg, g, gt_inv, tolerance),
        bundle_gt=invariant_curvature(connection_gt, alg, gt, g_inv, tolerance),
    )
    geometry.checks["connection_g"] = connection_checks(connection_g, alg, tolerance)
    geometry.checks["connection_gt"] = connection_checks(connection_gt, alg, tolerance)
    log.debug(f"Lie geometry of {alg.name}: tau~={geometry.bundle_gt.tau}, tau~*={geometry.bundle_gt.tau_star}")
    return geometry


# ---------------------------------------------------------------------------
# Closed forms of the two families
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FamilyOracle:
    """Closed-form curvature of the associated metric for one family"""

    family: int
    riemann_value: Scalar
    riemann: np.ndarray
    ricci: np.ndarray
    tau: Scalar
    tau_star: Scalar
    sectional: Scalar

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "riemann_value": self.riemann_value,
            "ricci_11": self.ricci[0, 0],
            "ricci_12": self.ricci[0, 1],
            "tau": self.tau,
            "tau_star": self.tau_star,
            "sectional": self.sectional,
        }


def riemann_from_pairs(pairs: np.ndarray) -> np.ndarray:
    """
    Curvature tensor from its symmetric matrix over the bivectors
    (12, 13, 23): R_ijkl = pairs[ij, kl] with signs for reversed pairs
    """
    R = zeros((DIM,) * 4, mode_of(pairs))
    for (i, j), (a, s) in _PAIRS.items():
        for (k, l), (b, t) in _PAIRS.items():
            R[i, j, k, l] = s * t * pairs[a, b]
    return R


def _scalars(params: FamilyParams, expected: int, mode: ArithmeticMode):
    if params.family != expected:
        raise WrongFamily(f"Oracle for family {expected} called with family {params.family}")
    return [to_scalar(v, mode) for v in params.lambdas]


def family1_oracle(params: FamilyParams, mode: ArithmeticMode = ArithmeticMode.EXACT) -> FamilyOracle:
    """
    Family 1: every listed component of R~ equals

        v = (l1^2 + l2^2 + l3^2)/2 + l1 l2 + l2 l3 - l1 l3

    rho~_12 = 2v, tau~ = 6v, tau~* = 0, k~ = -v.

    Raises:
        WrongFamily: params describe family 2
    """
    l1, l2, l3 = _scalars(params, 1, mode)
    v = half(mode) * (l1 * l1 + l2 * l2 + l3 * l3) + l1 * l2 + l2 * l3 - l1 * l3
    zero = to_scalar(0, mode)
    # R_1212 = R_1313 = R_2323 = R_1213 = R_1323 = v, R_1223 = -v
    pairs = np.array([[v, v, -v], [v, v, v], [-v, v, v]], dtype=object if mode is ArithmeticMode.EXACT else float)
    return FamilyOracle(
        family=1,
        riemann_value=v,
        riemann=riemann_from_pairs(pairs),
        ricci=circulant_sym(zero, 2 * v),
        tau=6 * v,
        tau_star=zero,
        sectional=-v,
    )


def family2_oracle(params: FamilyParams, mode: ArithmeticMode = ArithmeticMode.EXACT) -> FamilyOracle:
    """
    Family 2 with s = l1^2 + l2^2 + l1 l2: R~_1212 = -2s, rho~_11 = -4s,
    rho~_12 = 2s, tau~ = -tau~* = 12s, k~ = 2s.

    Raises:
        WrongFamily: params describe family 1
    """
    l1, l2 = _scalars(params, 2, mode)
    s = l1 * l1 + l2 * l2 + l1 * l2
    # R_1212 = R_1313 = R_2323 = R_1223 = -2s, R_1213 = R_1323 = 2s
    r = -2 * s
    pairs = np.array([[r, -r, r], [-r, r, -r], [r, -r, r]], dtype=object if mode is ArithmeticMode.EXACT else float)
    return FamilyOracle(
        family=2,
        riemann_value=r,
        riemann=riemann_from_pairs(pairs),
        ricci=circulant_sym(-4 * s, 2 * s),
        tau=12 * s,
        tau_star=-12 * s,
        sectional=2 * s,
    )


def family_oracle(params: FamilyParams, mode: ArithmeticMode = ArithmeticMode.EXACT) -> FamilyOracle:
    if params.family == 1:
        return family1_oracle(params, mode)
    return family2_oracle(params, mode)
