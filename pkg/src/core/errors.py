"""
Exception hierarchy; the exit code travels with the exception class
"""


EXIT_SUCCESS = 0
EXIT_CHECK_FAILURE = 1
EXIT_INPUT_ERROR = 2
EXIT_NUMERIC_ERROR = 3
EXIT_DOMAIN_ERROR = 4


class CirculantGeometryError(Exception):
    """Base class for every error raised by the engine"""

    exit_code = EXIT_NUMERIC_ERROR


# Input errors

class InputError(CirculantGeometryError):
    exit_code = EXIT_INPUT_ERROR


class ParseError(InputError):
    """Instance file is malformed or incomplete"""


class UnknownSuite(InputError):
    """Requested verification suite does not exist"""


class NotAQBasis(InputError):
    """Vector does not induce a Q-basis"""


class WrongFamily(InputError):
    """Closed-form oracle asked for the other Lie family"""


class NotDegeneratePlane(InputError):
    """Degenerate-plane quantity requested for a non-degenerate plane"""


class NotALieAlgebra(InputError):
    """Structure constants are not antisymmetric or violate the Jacobi identity"""


# Numeric errors

class NumericError(CirculantGeometryError):
    exit_code = EXIT_NUMERIC_ERROR


class SingularMatrix(NumericError):
    """Determinant check failed during inversion"""


class DegeneratePlane(NumericError):
    """Gram determinant of a 2-plane vanishes"""


class IsotropicDirection(NumericError):
    """Ricci curvature requested along an isotropic vector"""


class SearchFailed(NumericError):
    """Iterative solver did not converge"""


class CurvatureSymmetryViolation(NumericError):
    """Computed curvature tensor violates its algebraic symmetries"""


# Domain preconditions

class DomainError(CirculantGeometryError):
    exit_code = EXIT_DOMAIN_ERROR


class PositivityViolation(DomainError):
    """Circulant metric requires A > B > 0"""


class DegenerateAssociated(DomainError):
    """Associated metric is degenerate (A = B or A = -2B)"""


class NotCirculantRicci(DomainError):
    """Ricci tensor does not have the circulant pattern"""


class NotInL2(DomainError):
    """Statement requires the class L2"""


class NotEinstein(DomainError):
    """Limit value requires an Einstein associated manifold"""
