"""Shared constructions for the test suite.

Five example sets recur throughout, matching the problem files shipped
under ``pmilift/fixtures``:

* choi      -- 3x3 quadratic matrix in three variables; the negated
               curvature form is the classical Choi biquadratic, positive
               semidefinite but not a sum of squares.
* quartic   -- 2x2 planar quartic matrix, uniformly sos-concave.
* orthant   -- 2x2 rational matrix with denominator x1*x2, constrained to
               the open positive orthant.
* plane     -- 2x2 rational matrix with denominator x1^2 + x2^2.
* hyperbola -- 3x3 quadratic matrix over the closed orthant whose set is
               cut by x1*x2 >= 2; its order-1 lifting shows genuine slack.
"""

from fractions import Fraction

from pmilift.polyalg import MatPoly, Poly
from pmilift.ratlift import RationalMatFn


def P(nvars, terms):
    """Polynomial from an {exponent: coefficient} map with exact coefficients."""
    return Poly(nvars, {tuple(k): Fraction(v) for k, v in terms.items()})


def choi_matrix() -> MatPoly:
    return MatPoly.from_entries([
        [P(3, {(0, 0, 0): 2, (2, 0, 0): -1, (0, 0, 2): -2}),
         P(3, {(0, 0, 0): 1, (1, 1, 0): 1}),
         P(3, {(1, 0, 1): 1})],
        [P(3, {(0, 0, 0): 1, (1, 1, 0): 1}),
         P(3, {(0, 0, 0): 2, (0, 2, 0): -1, (2, 0, 0): -2}),
         P(3, {(0, 0, 0): 1, (0, 1, 1): 1})],
        [P(3, {(1, 0, 1): 1}),
         P(3, {(0, 0, 0): 1, (0, 1, 1): 1}),
         P(3, {(0, 0, 0): 2, (0, 0, 2): -1, (0, 2, 0): -2})],
    ])


def quartic_matrix(c22: int = 4) -> MatPoly:
    """Planar quartic matrix; c22 sets the mixed coefficient in entry (1,1)."""
    return MatPoly.from_entries([
        [P(2, {(0, 0): 2, (4, 0): -2, (2, 2): -4, (0, 4): -2}),
         P(2, {(0, 0): 3, (3, 1): -1, (1, 3): -1})],
        [P(2, {(0, 0): 3, (3, 1): -1, (1, 3): -1}),
         P(2, {(0, 0): 5, (4, 0): -1, (2, 2): -c22, (0, 4): -1})],
    ])


def orthant_rational() -> tuple[RationalMatFn, tuple[Poly, Poly]]:
    """Rational matrix over the open positive orthant, with its domain rows."""
    p = P(2, {(1, 1): 1})
    A = MatPoly.from_entries([
        [P(2, {(0, 0): 7, (1, 0): -1, (0, 1): 2}), P(2, {(0, 0): 5})],
        [P(2, {(0, 0): 5}), P(2, {(0, 0): 11, (0, 1): -1})],
    ])
    B = MatPoly.from_entries([
        [P(2, {(1, 0): 1, (0, 3): 1}), P(2, {(0, 2): 1})],
        [P(2, {(0, 2): 1}), P(2, {(0, 1): 1})],
    ])
    gs = (P(2, {(1, 0): 1}), P(2, {(0, 1): 1}))
    return RationalMatFn(A * p - B, p), gs


def plane_rational() -> RationalMatFn:
    p = P(2, {(2, 0): 1, (0, 2): 1})
    A = MatPoly.from_entries([
        [P(2, {(0, 0): 1, (2, 0): -2, (1, 1): -2, (0, 2): -1}), P(2, {(2, 0): 1})],
        [P(2, {(2, 0): 1}), P(2, {(0, 0): 1, (2, 0): -1})],
    ])
    E = MatPoly.from_entries([
        [P(2, {(0, 4): -1}), P(2, {(0, 4): 1})],
        [P(2, {(0, 4): 1}), P(2, {(0, 4): -1})],
    ])
    return RationalMatFn(A * p + E, p)


def hyperbola_matrix() -> tuple[MatPoly, tuple[Poly, Poly]]:
    Q = MatPoly.from_entries([
        [P(2, {(1, 1): 1, (0, 0): 2}), P(2, {(1, 1): 1}), Poly.zero(2)],
        [P(2, {(1, 1): 1}), P(2, {(1, 1): 1, (0, 0): -1}), Poly.zero(2)],
        [Poly.zero(2), Poly.zero(2), P(2, {(1, 0): 1, (0, 1): 1})],
    ])
    gs = (P(2, {(1, 0): 1}), P(2, {(0, 1): 1}))
    return Q, gs
