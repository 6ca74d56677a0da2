"""
Seeded random instances for property checks and verification suites

Every sampler takes an explicit numpy Generator, so a (seed, call order)
pair reproduces the same instances in both arithmetic modes.
"""

from fractions import Fraction
from typing import Optional

import numpy as np

from .metric_jets import CirculantJet, MetricJet2
from .tensor3 import (
    DIM,
    L0_GRADIENT_MATRIX,
    ArithmeticMode,
    Scalar,
    convert,
    half,
    to_scalar,
    zeros,
)


def make_rng(seed: Optional[int]) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_scalar(
    rng: np.random.Generator,
    mode: ArithmeticMode,
    low: float = -2.0,
    high: float = 2.0,
    max_denominator: int = 4,
) -> Scalar:
    """Uniform float in [low, high), or a rational p/q with q <= max_denominator"""
    if mode is ArithmeticMode.FLOAT:
        return float(rng.uniform(low, high))
    q = int(rng.integers(1, max_denominator + 1))
    p = int(rng.integers(int(np.floor(low * q)), int(np.ceil(high * q)) + 1))
    return Fraction(p, q)


def random_array(rng: np.random.Generator, shape, mode: ArithmeticMode, **kwargs) -> np.ndarray:
    out = zeros(tuple(shape), mode)
    for index in np.ndindex(*shape):
        out[index] = random_scalar(rng, mode, **kwargs)
    return out


def random_vector(rng: np.random.Generator, mode: ArithmeticMode, nonzero: bool = True) -> np.ndarray:
    while True:
        v = random_array(rng, (DIM,), mode)
        if not nonzero or any(c != 0 for c in v):
            return v


def symmetrize(array: np.ndarray, axes=(0, 1)) -> np.ndarray:
    """Average of the array and its transpose over the given axis pair"""
    order = list(range(array.ndim))
    order[axes[0]], order[axes[1]] = order[axes[1]], order[axes[0]]
    return half(_mode(array)) * (array + np.transpose(array, order))


def _mode(array: np.ndarray) -> ArithmeticMode:
    return ArithmeticMode.EXACT if array.dtype == object else ArithmeticMode.FLOAT


def random_symmetric(rng: np.random.Generator, mode: ArithmeticMode) -> np.ndarray:
    return symmetrize(random_array(rng, (DIM, DIM), mode))


# ---------------------------------------------------------------------------
# Metric jets
# ---------------------------------------------------------------------------

def random_circulant_values(rng: np.random.Generator, mode: ArithmeticMode):
    """(A, B) with A > B > 0"""
    B = random_scalar(rng, mode, low=0.5, high=2.0)
    if B <= 0:
        B = B + 1
    gap = random_scalar(rng, mode, low=0.5, high=2.0)
    if gap <= 0:
        gap = gap + 1
    return B + gap, B


def random_circulant_jet(rng: np.random.Generator, mode: ArithmeticMode) -> CirculantJet:
    """Generic circulant jet with A > B > 0 and symmetric Hessians"""
    A, B = random_circulant_values(rng, mode)
    return CirculantJet(
        A=A,
        B=B,
        dA=random_array(rng, (DIM,), mode, low=-1.0, high=1.0),
        dB=random_array(rng, (DIM,), mode, low=-1.0, high=1.0),
        d2A=random_symmetric(rng, mode),
        d2B=random_symmetric(rng, mode),
    )


def random_metric(rng: np.random.Generator, mode: ArithmeticMode, indefinite: bool = False) -> np.ndarray:
    """
    Symmetric invertible metric L^T D L

    L is unit upper triangular, D diagonal with |d_i| in [1/2, 2]; with
    indefinite=True the signs of D are mixed, one negative at least.
    """
    lower = random_array(rng, (DIM, DIM), mode, low=-1.0, high=1.0)
    unit = zeros((DIM, DIM), mode)
    one = to_scalar(1, mode)
    for i in range(DIM):
        unit[i, i] = one
        for j in range(i + 1, DIM):
            unit[i, j] = lower[i, j]
    diagonal = zeros((DIM, DIM), mode)
    negative = int(rng.integers(0, DIM)) if indefinite else -1
    for i in range(DIM):
        magnitude = random_scalar(rng, mode, low=0.5, high=2.0)
        if magnitude <= 0:
            magnitude = -magnitude + one
        diagonal[i, i] = -magnitude if i == negative else magnitude
    metric = unit.T @ diagonal @ unit
    return symmetrize(metric)


def random_metric_jet(rng: np.random.Generator, mode: ArithmeticMode, indefinite: bool = False) -> MetricJet2:
    """Arbitrary metric jet with the index symmetries of a true 2-jet"""
    g = random_metric(rng, mode, indefinite=indefinite)
    dg = symmetrize(random_array(rng, (DIM,) * 3, mode, low=-1.0, high=1.0), axes=(1, 2))
    d2g = random_array(rng, (DIM,) * 4, mode, low=-1.0, high=1.0)
    d2g = symmetrize(symmetrize(d2g, axes=(0, 1)), axes=(2, 3))
    return MetricJet2(g=g, dg=dg, d2g=d2g)


def construct_l0_jet(rng: np.random.Generator, mode: ArithmeticMode) -> CirculantJet:
    """
    Circulant jet on which Q is parallel

    The B-jet is sampled; dA = M dB and d2A = M d2B with M the gradient
    matrix. d2A is symmetric iff every row of d2B has the same sum, so
    d2B[2][2] and d2B[3][3] (1-based) are solved from row 1.
    """
    A, B = random_circulant_values(rng, mode)
    dB = random_array(rng, (DIM,), mode, low=-1.0, high=1.0)
    hessian = random_symmetric(rng, mode)
    row = hessian[0, 0] + hessian[0, 1] + hessian[0, 2]
    hessian[1, 1] = row - hessian[0, 1] - hessian[1, 2]
    hessian[2, 2] = row - hessian[0, 2] - hessian[1, 2]
    gradient_matrix = convert(L0_GRADIENT_MATRIX, mode)
    d2A = gradient_matrix @ hessian
    # symmetric up to rounding
    d2A = symmetrize(d2A)
    return CirculantJet(A=A, B=B, dA=gradient_matrix @ dB, dB=dB, d2A=d2A, d2B=hessian)


def perturb_jet(cj: CirculantJet, rng: np.random.Generator, magnitude: float = 0.5) -> CirculantJet:
    """Add a random nonzero shift to dA, which breaks the parallel condition"""
    mode = cj.mode
    shift = zeros((DIM,), mode)
    while all(c == 0 for c in shift):
        shift = random_array(rng, (DIM,), mode, low=-magnitude, high=magnitude)
    return CirculantJet(A=cj.A, B=cj.B, dA=cj.dA + shift, dB=cj.dB, d2A=cj.d2A, d2B=cj.d2B)
