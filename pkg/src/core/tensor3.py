"""
Fixed-dimension tensor kernel for the circulant curvature engine

Every tensor is a dense numpy array over the distinguished basis
{e1, e2, e3}. Two scalar backends share the same code paths:

- exact: object arrays of fractions.Fraction, all ring operations exact
- float: float64 arrays, comparisons through a Tolerance record

Indices are 0-based in storage and 1-based in every report.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from .errors import SingularMatrix


Scalar = Union[Fraction, float]

DIM = 3


class ArithmeticMode(str, Enum):
    """Scalar backend selected per computation"""

    EXACT = "exact"
    FLOAT = "float"


class Verdict(str, Enum):
    """Tri-state outcome of a residual check"""

    HOLDS = "holds"
    BORDERLINE = "borderline"
    FAILS = "fails"

    @property
    def holds(self) -> bool:
        return self is Verdict.HOLDS


@dataclass(frozen=True)
class Tolerance:
    """Residual thresholds: |r| <= eps_abs + eps_rel * scale"""

    eps_rel: float = 1e-9
    eps_abs: float = 1e-12
    borderline_factor: float = 10.0

    def __post_init__(self):
        if self.eps_rel <= 0 or self.eps_abs <= 0:
            raise ValueError("Tolerance thresholds must be positive")
        if self.borderline_factor < 1:
            raise ValueError("borderline_factor must be at least 1")

    def threshold(self, scale: float) -> float:
        return self.eps_abs + self.eps_rel * float(scale)


DEFAULT_TOLERANCE = Tolerance()


@dataclass(frozen=True)
class Check:
    """Verdict together with the residual that produced it"""

    verdict: Verdict
    residual: Scalar
    scale: Scalar = 0.0

    @property
    def holds(self) -> bool:
        return self.verdict.holds

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.value, "residual": self.residual}


# (Q_i^j) of the circulant structure: Q e_i = Q_i^j e_j, so Q e1 = e2,
# Q e2 = e3, Q e3 = e1.
Q_MATRIX = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=int)

# Column action: (Q v)^k = Q_ACTION[k, j] v^j
Q_ACTION = Q_MATRIX.T.copy()

# Rows of the matrix in grad A = grad B * L0_GRADIENT_MATRIX
L0_GRADIENT_MATRIX = np.array([[-1, 1, 1], [1, -1, 1], [1, 1, -1]], dtype=int)


# ---------------------------------------------------------------------------
# Scalars and arrays
# ---------------------------------------------------------------------------

def to_scalar(value, mode: ArithmeticMode) -> Scalar:
    """
    Convert a number or rational string into the backend scalar

    Args:
        value: int, float, Fraction or a string such as "3/4" or "0.25"
        mode: Target backend

    Returns:
        Fraction in exact mode, float in float mode
    """
    if isinstance(value, str):
        value = Fraction(value.strip())
    if mode is ArithmeticMode.EXACT:
        if isinstance(value, float) and not np.isfinite(value):
            raise ValueError(f"Non-finite value {value!r} has no exact form")
        return Fraction(value)
    return float(value)


def as_array(values, mode: ArithmeticMode) -> np.ndarray:
    """Build a dense array of backend scalars from nested sequences"""
    raw = np.array(values, dtype=object)
    converted = np.vectorize(lambda v: to_scalar(v, mode), otypes=[object])(raw) if raw.size else raw
    if mode is ArithmeticMode.EXACT:
        return converted.astype(object)
    return converted.astype(float)


def mode_of(*arrays) -> ArithmeticMode:
    """Exact when every operand is exact, float otherwise"""
    for a in arrays:
        if isinstance(a, np.ndarray):
            if a.dtype != object:
                return ArithmeticMode.FLOAT
        elif isinstance(a, float):
            return ArithmeticMode.FLOAT
    return ArithmeticMode.EXACT


def convert(array: np.ndarray, mode: ArithmeticMode) -> np.ndarray:
    """Re-express an array in another backend"""
    if mode is ArithmeticMode.FLOAT:
        return np.asarray(array).astype(float)
    if isinstance(array, np.ndarray) and array.dtype == object:
        return array
    return as_array(np.asarray(array).tolist(), mode)


def zeros(shape: Tuple[int, ...], mode: ArithmeticMode) -> np.ndarray:
    if mode is ArithmeticMode.EXACT:
        return np.full(shape, Fraction(0), dtype=object)
    return np.zeros(shape, dtype=float)


def identity(mode: ArithmeticMode) -> np.ndarray:
    return circulant_sym(to_scalar(1, mode), to_scalar(0, mode))


def half(mode: ArithmeticMode) -> Scalar:
    return Fraction(1, 2) if mode is ArithmeticMode.EXACT else 0.5


def is_exact_scalar(value) -> bool:
    return isinstance(value, Rational)


def to_float(value) -> float:
    return float(value)


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------

def circulant_sym(a: Scalar, b: Scalar) -> np.ndarray:
    """
    Symmetric circulant matrix with diagonal a and off-diagonal b

    Shape of the circulant metric (a=A, b=B) and of its associated metric
    (a=2B, b=A+B).
    """
    dtype = object if is_exact_scalar(a) and is_exact_scalar(b) else float
    return np.array([[a, b, b], [b, a, b], [b, b, a]], dtype=dtype)


def det3(m: np.ndarray) -> Scalar:
    """Determinant of a 3x3 matrix by cofactor expansion (backend-neutral)"""
    return (
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )


def max_abs(*arrays) -> Scalar:
    """Largest absolute entry over all operands (0 for empty input)"""
    best = None
    for a in arrays:
        values = np.abs(np.asarray(a)).ravel()
        if values.size == 0:
            continue
        candidate = values.max()
        if best is None or candidate > best:
            best = candidate
    if best is None:
        return 0
    return best


def invert_sym3(m: np.ndarray, tolerance: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """
    Invert a symmetric 3x3 matrix via cofactors

    Args:
        m: Symmetric matrix (exact or float)
        tolerance: Float-mode singularity threshold source

    Returns:
        The symmetric inverse, in the backend of m

    Raises:
        SingularMatrix: det m == 0 (exact) or |det m| <= eps_abs * max|m|^3 (float)
    """
    det = det3(m)
    if mode_of(m) is ArithmeticMode.EXACT:
        if det == 0:
            raise SingularMatrix("Matrix is singular (det = 0)")
    else:
        bound = tolerance.eps_abs * float(max_abs(m)) ** 3
        if abs(det) <= bound:
            raise SingularMatrix(f"Matrix is numerically singular (|det| = {abs(det):.3e} <= {bound:.3e})")

    adj = np.empty((DIM, DIM), dtype=m.dtype)
    for i in range(DIM):
        for j in range(DIM):
            rows = [r for r in range(DIM) if r != j]
            cols = [c for c in range(DIM) if c != i]
            minor = m[rows[0], cols[0]] * m[rows[1], cols[1]] - m[rows[0], cols[1]] * m[rows[1], cols[0]]
            adj[i, j] = minor if (i + j) % 2 == 0 else -minor
    inverse = adj / det
    # Exact inverse of a symmetric matrix is symmetric; float keeps the upper triangle
    if inverse.dtype != object:
        inverse = np.triu(inverse) + np.triu(inverse, 1).T
    return inverse


def is_circulant_sym(m: np.ndarray, tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    """Check m11 = m22 = m33 and m12 = m13 = m23"""
    diagonal = np.array([m[0, 0], m[1, 1], m[2, 2]], dtype=m.dtype)
    off = np.array([m[0, 1], m[0, 2], m[1, 2]], dtype=m.dtype)
    residual = max_abs(diagonal - diagonal[0], off - off[0])
    return judge(residual, max_abs(m), tolerance)


# ---------------------------------------------------------------------------
# The circulant structure
# ---------------------------------------------------------------------------

def apply_q(v: np.ndarray) -> np.ndarray:
    """Q acting on a component vector: (v1, v2, v3) -> (v3, v1, v2)"""
    v = np.asarray(v)
    return v[[2, 0, 1]]


def q_orbit(v: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(x, Qx, Q^2 x)"""
    qv = apply_q(v)
    return np.asarray(v), qv, apply_q(qv)


def q_pullback(m: np.ndarray) -> np.ndarray:
    """Components of (x, y) -> m(Qx, Qy)"""
    return Q_ACTION.T @ m @ Q_ACTION


def q_pullback4(t: np.ndarray, slots: Sequence[int] = (0, 1, 2, 3)) -> np.ndarray:
    """Components of a (0,4) tensor with Q inserted in the chosen slots"""
    result = t
    letters = "ijkl"
    for slot in slots:
        target = letters
        source = letters[:slot] + "m" + letters[slot + 1:]
        result = np.einsum(f"{source},m{letters[slot]}->{target}", result, Q_ACTION)
    return result


# ---------------------------------------------------------------------------
# Multilinear evaluation
# ---------------------------------------------------------------------------

def scalar_of(value) -> Scalar:
    """Unwrap 0-d arrays returned by full contractions"""
    if isinstance(value, np.ndarray):
        return value.item()
    if isinstance(value, np.generic):
        return value.item()
    return value


def bilinear(m: np.ndarray, x: np.ndarray, y: np.ndarray) -> Scalar:
    return scalar_of(np.einsum("ij,i,j->", m, x, y))


def quadratic(m: np.ndarray, x: np.ndarray) -> Scalar:
    return bilinear(m, x, x)


def evaluate4(t: np.ndarray, x, y, z, u) -> Scalar:
    """t(x, y, z, u) for a (0,4) tensor"""
    return scalar_of(np.einsum("ijkl,i,j,k,l->", t, x, y, z, u))


def basis_vector(index: int, mode: ArithmeticMode) -> np.ndarray:
    """e_index with a 1-based index"""
    v = zeros((DIM,), mode)
    v[index - 1] = to_scalar(1, mode)
    return v


# ---------------------------------------------------------------------------
# Residual judging
# ---------------------------------------------------------------------------

def judge(residual: Scalar, scale: Scalar, tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    """
    Turn a residual into a tri-state verdict

    Exact residuals are decided by equality with zero; float residuals
    against eps_abs + eps_rel * scale, with a borderline band of
    borderline_factor times the threshold.
    """
    if is_exact_scalar(residual) and is_exact_scalar(scale):
        verdict = Verdict.HOLDS if residual == 0 else Verdict.FAILS
        return Check(verdict, Fraction(residual), Fraction(scale))

    residual = abs(float(residual))
    threshold = tolerance.threshold(scale)
    if residual <= threshold:
        verdict = Verdict.HOLDS
    elif residual <= tolerance.borderline_factor * threshold:
        verdict = Verdict.BORDERLINE
    else:
        verdict = Verdict.FAILS
    return Check(verdict, residual, float(scale))


def compare(actual, expected, tolerance: Tolerance = DEFAULT_TOLERANCE) -> Check:
    """Entrywise comparison of two tensors (or scalars) of the same shape"""
    actual = np.asarray(actual)
    expected = np.asarray(expected)
    residual = max_abs(actual - expected)
    return judge(residual, max_abs(actual, expected), tolerance)


def combine(checks: Iterable[Check]) -> Check:
    """Worst verdict and largest residual of several checks"""
    order = {Verdict.HOLDS: 0, Verdict.BORDERLINE: 1, Verdict.FAILS: 2}
    checks = list(checks)
    if not checks:
        return Check(Verdict.HOLDS, 0, 0)
    worst = max(checks, key=lambda c: order[c.verdict])
    residual = max((c.residual for c in checks), key=lambda r: abs(r))
    scale = max((c.scale for c in checks), key=lambda s: abs(s))
    return Check(worst.verdict, residual, scale)
