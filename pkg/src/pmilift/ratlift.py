"""Lifted LMIs for rational matrix functions G = N(x) / p(x).

Entries of G and of the localizer products g_k * [x] [x]^T are rational
with denominator p.  Lex division by p splits each entry into a polynomial
part (pseudomoments y_alpha) and a remainder part whose monomials are not
divisible by the leading exponent of p; those remainders get their own
lifting variables z_beta = x^beta / p(x).

Index sets:

* y_index: exponents alpha with |alpha| + |LE(p)| <= 2d,
* z_index: exponents beta with |beta| <= 2d that are NOT componentwise
  >= LE(p) (divisibility reading),

both in graded order.  A remainder monomial escaping z_index is an error,
never a silent truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .momlift import LiftedLMI, LinearPencil, VarKey, standard_pins
from .polyalg import (
    Exponent,
    MatPoly,
    Poly,
    basis_exponents,
    frac_matrix,
    lex_lead,
    lex_reduce,
)

__all__ = [
    "RationalMatFn",
    "qmod_index_sets",
    "split_localizer",
    "split_rational_matrix",
    "qmod_lift",
    "IndexEscape",
]


class IndexEscape(ValueError):
    """A split produced a monomial outside the declared index sets."""


@dataclass(frozen=True)
class RationalMatFn:
    """Symmetric rational matrix function numerator(x) / denom(x).

    `p` is the denominator by default; `q` (used as the fixed second
    multiplier in concavity certificates) defaults to p**2.  Both must be
    positive on the interior of the domain for the liftings to mean
    anything; that is the caller's contract, not checked here.
    """

    numerator: MatPoly
    denom: Poly
    q: Poly | None = None

    def __post_init__(self) -> None:
        if not self.denom:
            raise ValueError("zero denominator")
        if self.denom.nvars != self.numerator.nvars:
            raise ValueError("numerator and denominator rings differ")
        if self.q is not None and self.q.nvars != self.denom.nvars:
            raise ValueError("q lives in the wrong ring")

    @property
    def nvars(self) -> int:
        return self.numerator.nvars

    @property
    def size(self) -> int:
        return self.numerator.size

    def q_or_default(self) -> Poly:
        return self.q if self.q is not None else self.denom * self.denom

    def degree(self) -> int:
        """max(deg numerator, deg denominator); drives the half-degree d."""
        return max(self.numerator.degree(), self.denom.degree())

    def eval(self, point: Sequence[object]) -> np.ndarray:
        pv = self.denom.eval(point)
        if pv == 0:
            raise ZeroDivisionError("denominator vanishes at the point")
        nv = self.numerator.eval(point)
        if isinstance(pv, Fraction):
            return nv * Fraction(1, 1) / pv
        return nv / pv


def qmod_index_sets(p: Poly, d: int) -> tuple[list[Exponent], list[Exponent]]:
    """(y_index, z_index) for denominator p at half-degree d, graded order."""
    if not p:
        raise ValueError("zero denominator")
    n = p.nvars
    le = lex_lead(p)
    wt = sum(le)
    y_index = [a for a in basis_exponents(n, 2 * d) if sum(a) + wt <= 2 * d]
    z_index = [
        b
        for b in basis_exponents(n, 2 * d)
        if not all(u >= v for u, v in zip(b, le))
    ]
    return y_index, z_index


def _split_entry(
    f: Poly, p: Poly, y_set: frozenset[Exponent], z_set: frozenset[Exponent], where: str
) -> tuple[Poly, Poly]:
    """lex_reduce an entry and police the index sets."""
    q, r = lex_reduce(f, p)
    for a in q.terms:
        if a not in y_set:
            raise IndexEscape(f"{where}: quotient monomial {a} outside y_index")
    for b in r.terms:
        if b not in z_set:
            raise IndexEscape(f"{where}: remainder monomial {b} outside z_index")
    return q, r


def split_localizer(
    g: Poly, p: Poly, d: int
) -> tuple[dict[Exponent, np.ndarray], dict[Exponent, np.ndarray], int]:
    """Split g(x) * [x]_e [x]_e^T / p(x) into y- and z-coefficient matrices.

    e = d - ceil(deg g / 2).  Returns (y_mats, z_mats, size); entry (i, j)
    of the localizer is sum_alpha y_mats[alpha][i,j] * y_alpha
    + sum_beta z_mats[beta][i,j] * z_beta after lifting.
    """
    if not g:
        raise ValueError("localizer for the zero polynomial")
    dk = math.ceil(g.degree() / 2)
    e = d - dk
    if e < 0:
        raise ValueError(f"half-degree {d} too small for a degree-{g.degree()} factor")
    n = g.nvars
    y_index, z_index = qmod_index_sets(p, d)
    y_set, z_set = frozenset(y_index), frozenset(z_index)
    basis = basis_exponents(n, e)
    s = len(basis)

    y_mats: dict[Exponent, np.ndarray] = {}
    z_mats: dict[Exponent, np.ndarray] = {}

    def put(store: dict[Exponent, np.ndarray], exp: Exponent, i: int, j: int, c: Fraction) -> None:
        if exp not in store:
            store[exp] = frac_matrix([[0] * s for _ in range(s)])
        store[exp][i, j] += c

    for i in range(s):
        for j in range(i, s):
            f = g * Poly.monomial(
                n, tuple(u + v for u, v in zip(basis[i], basis[j]))
            )
            qq, rr = _split_entry(f, p, y_set, z_set, f"localizer entry ({i},{j})")
            for a, c in qq.terms.items():
                put(y_mats, a, i, j, c)
                if i != j:
                    put(y_mats, a, j, i, c)
            for b, c in rr.terms.items():
                put(z_mats, b, i, j, c)
                if i != j:
                    put(z_mats, b, j, i, c)
    return y_mats, z_mats, s


def split_rational_matrix(
    R: RationalMatFn, d: int
) -> tuple[dict[Exponent, np.ndarray], dict[Exponent, np.ndarray]]:
    """Split N(x)/p(x) entrywise into y- and z-coefficient matrices."""
    n, m = R.nvars, R.size
    y_index, z_index = qmod_index_sets(R.denom, d)
    y_set, z_set = frozenset(y_index), frozenset(z_index)
    y_mats: dict[Exponent, np.ndarray] = {}
    z_mats: dict[Exponent, np.ndarray] = {}

    def put(store: dict[Exponent, np.ndarray], exp: Exponent, i: int, j: int, c: Fraction) -> None:
        if exp not in store:
            store[exp] = frac_matrix([[0] * m for _ in range(m)])
        store[exp][i, j] += c
        if i != j:
            store[exp][j, i] += c

    for i in range(m):
        for j in range(i, m):
            qq, rr = _split_entry(
                R.numerator.entry(i, j), R.denom, y_set, z_set, f"matrix entry ({i},{j})"
            )
            for a, c in qq.terms.items():
                put(y_mats, a, i, j, c)
            for b, c in rr.terms.items():
                put(z_mats, b, i, j, c)
    return y_mats, z_mats


def _pencil(
    y_mats: Mapping[Exponent, np.ndarray],
    z_mats: Mapping[Exponent, np.ndarray],
    size: int,
    nvars: int,
    label: str,
) -> LinearPencil:
    zero = (0,) * nvars
    constant = y_mats.get(zero)
    if constant is None:
        constant = frac_matrix([[0] * size for _ in range(size)])
    coeffs: dict[VarKey, np.ndarray] = {
        ("y", e): m for e, m in y_mats.items() if e != zero
    }
    for e, m in z_mats.items():
        coeffs[("z", e)] = m
    return LinearPencil(size=size, constant=constant, coeffs=coeffs, label=label)


def qmod_lift(R: RationalMatFn, gs: Sequence[Poly], d: int) -> LiftedLMI:
    """Lift {x in D : G(x) >= 0} for rational G at half-degree d.

    Pencils: the split of G itself, then split localizers for g_0 = 1 and
    each domain polynomial g_k.  The point-to-lifting map sends x to
    y_alpha = x^alpha, z_beta = x^beta / p(x); soundness needs p > 0 on
    the interior of D, which is the standing hypothesis of the rational
    construction.
    """
    n = R.nvars
    for g in gs:
        if g.nvars != n:
            raise ValueError("domain polynomial ring mismatch")
    dmin = math.ceil(R.degree() / 2)
    if d < dmin:
        raise ValueError(f"half-degree {d} below required {dmin}")
    y_index, z_index = qmod_index_sets(R.denom, d)
    missing = [e for e in standard_pins(n) if e not in set(y_index)]
    if missing:
        raise ValueError(
            f"half-degree {d} leaves pinned exponents {missing} outside y_index; "
            "increase d"
        )
    gy, gz = split_rational_matrix(R, d)
    pencils = [_pencil(gy, gz, R.size, n, "matrix")]
    one = Poly.const(n, 1)
    for k, g in enumerate([one, *gs]):
        ly, lz, s = split_localizer(g, R.denom, d)
        label = "moment" if k == 0 else f"localizer g{k}"
        pencils.append(_pencil(ly, lz, s, n, label))
    return LiftedLMI(
        nvars=n,
        y_index=tuple(y_index),
        z_index=tuple(z_index),
        pins=standard_pins(n),
        pencils=tuple(pencils),
        denom=R.denom,
    )
