"""Exact sparse polynomial algebra over the rationals.

Monomials are exponent tuples, polynomials are {exponent: Fraction} term
maps, and matrix polynomials map exponents to symmetric coefficient
matrices (numpy object arrays holding Fractions).  Everything in this
module is exact; floating point enters only when a caller evaluates at a
float point.

Two monomial orders are used throughout the package:

* graded order for bases: degree ascending, lexicographically descending
  inside a degree block, so the degree-2 basis in two variables reads
  1, x1, x2, x1^2, x1*x2, x2^2;
* pure lexicographic order with x1 > x2 > ... > xn for leading exponents
  and division (`lex_lead`, `lex_reduce`).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

Exponent = tuple[int, ...]

__all__ = [
    "Exponent",
    "Poly",
    "MatPoly",
    "BiForm",
    "basis_exponents",
    "degree_block",
    "lex_lead",
    "lex_reduce",
    "exact_div",
    "neg_hessian_biform",
    "frac_matrix",
    "is_symmetric",
    "is_psd_exact",
]


def _as_fraction(c: object) -> Fraction:
    # Floats are rejected on purpose: this layer is the exact side of the
    # package and silent binary-float conversion would poison it.
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"expected an exact rational, got {type(c).__name__}")


def degree_block(nvars: int, degree: int) -> Iterator[Exponent]:
    """Yield all exponents of total degree `degree`, lex-descending."""
    if nvars == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in degree_block(nvars - 1, degree - first):
            yield (first, *rest)


def basis_exponents(nvars: int, degree: int) -> list[Exponent]:
    """All exponents with total degree <= `degree` in graded order."""
    if nvars < 1:
        raise ValueError("need at least one variable")
    if degree < 0:
        return []
    out: list[Exponent] = []
    for k in range(degree + 1):
        out.extend(degree_block(nvars, k))
    return out


@dataclass(frozen=True, eq=True)
class Poly:
    """Sparse multivariate polynomial with Fraction coefficients.

    `terms` maps exponent tuples to nonzero Fractions; construction
    normalizes (drops zeros, validates tuple lengths).  Instances are
    immutable and compare by value.
    """

    nvars: int
    terms: Mapping[Exponent, Fraction]

    def __post_init__(self) -> None:
        if self.nvars < 1:
            raise ValueError("need at least one variable")
        clean: dict[Exponent, Fraction] = {}
        for exp, c in self.terms.items():
            e = tuple(int(v) for v in exp)
            if len(e) != self.nvars or any(v < 0 for v in e):
                raise ValueError(f"bad exponent {exp!r} for {self.nvars} variables")
            f = _as_fraction(c)
            if f:
                clean[e] = f
        object.__setattr__(self, "terms", clean)

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars, {})

    @classmethod
    def const(cls, nvars: int, c: object) -> "Poly":
        return cls(nvars, {(0,) * nvars: _as_fraction(c)})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        if not 0 <= i < nvars:
            raise ValueError(f"variable index {i} out of range")
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, nvars: int, exp: Sequence[int], c: object = 1) -> "Poly":
        return cls(nvars, {tuple(exp): _as_fraction(c)})

    # -- queries ----------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coeff(self, exp: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exp), Fraction(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, indices: Iterable[int]) -> int:
        """Max combined degree over the given variable slots; -1 if zero."""
        idx = tuple(indices)
        if not self.terms:
            return -1
        return max(sum(e[i] for i in idx) for e in self.terms)

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- arithmetic -------------------------------------------------------

    def _check_ring(self, other: "Poly") -> None:
        if self.nvars != other.nvars:
            raise ValueError("polynomials live in different rings")

    def __add__(self, other: "Poly") -> "Poly":
        if not isinstance(other, Poly):
            return NotImplemented
        self._check_ring(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return Poly(self.nvars, terms)

    def __neg__(self) -> "Poly":
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: object) -> "Poly":
        if isinstance(other, Poly):
            self._check_ring(other)
            terms: dict[Exponent, Fraction] = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    terms[e] = terms.get(e, Fraction(0)) + c1 * c2
            return Poly(self.nvars, terms)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other: object) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c: object) -> "Poly":
        f = _as_fraction(c)
        return Poly(self.nvars, {e: f * v for e, v in self.terms.items()})

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power")
        out = Poly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def diff(self, i: int) -> "Poly":
        """Partial derivative with respect to variable slot `i`."""
        terms: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            d = list(e)
            d[i] -= 1
            terms[tuple(d)] = terms.get(tuple(d), Fraction(0)) + c * e[i]
        return Poly(self.nvars, terms)

    def eval(self, point: Sequence[object]) -> object:
        """Evaluate at a point; exact for Fraction/int input, float otherwise."""
        if len(point) != self.nvars:
            raise ValueError("point dimension mismatch")
        total: object = Fraction(0)
        for e, c in self.terms.items():
            v: object = c
            for x, k in zip(point, e):
                if k:
                    v = v * x**k
            total = total + v
        return total

    def remap(self, new_nvars: int, slot_map: Sequence[int]) -> "Poly":
        """Move variable i to slot `slot_map[i]` of a `new_nvars`-variable ring.

        Used to embed rings (x -> (x, xi)) and to substitute variable blocks
        (x -> u).  Slots must be distinct and in range.
        """
        if len(slot_map) != self.nvars:
            raise ValueError("slot map length mismatch")
        if len(set(slot_map)) != self.nvars or any(
            not 0 <= s < new_nvars for s in slot_map
        ):
            raise ValueError("slot map must be injective and in range")
        terms: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            ne = [0] * new_nvars
            for i, k in enumerate(e):
                ne[slot_map[i]] = k
            terms[tuple(ne)] = c
        return Poly(new_nvars, terms)

    # -- serialization and printing --------------------------------------

    def to_obj(self) -> list[dict]:
        """JSON-friendly term list with rational-as-string coefficients."""
        items = sorted(self.terms.items(), key=lambda t: (sum(t[0]), tuple(-v for v in t[0])))
        return [{"exp": list(e), "coef": str(c)} for e, c in items]

    @classmethod
    def from_obj(cls, nvars: int, obj: Iterable[Mapping]) -> "Poly":
        terms: dict[Exponent, Fraction] = {}
        for item in obj:
            e = tuple(int(v) for v in item["exp"])
            terms[e] = terms.get(e, Fraction(0)) + _as_fraction(item["coef"])
        return cls(nvars, terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        items = sorted(self.terms.items(), key=lambda t: (sum(t[0]), tuple(-v for v in t[0])))
        for e, c in items:
            mono = "*".join(
                f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}"
                for i, k in enumerate(e)
                if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")


def lex_lead(p: Poly) -> Exponent:
    """Leading exponent under pure lex order (x1 > x2 > ... > xn)."""
    if not p.terms:
        raise ValueError("zero polynomial has no leading exponent")
    return max(p.terms)


def lex_reduce(f: Poly, p: Poly) -> tuple[Poly, Poly]:
    """Divide `f` by `p` under pure lex order: f = q*p + r.

    No monomial of the remainder r is componentwise divisible by the
    leading exponent of p.  A single divisor is a Groebner basis of the
    ideal it generates, so r == 0 exactly when p divides f.
    """
    if not p.terms:
        raise ValueError("division by the zero polynomial")
    f._check_ring(p)
    le = lex_lead(p)
    lc = p.terms[le]
    q: dict[Exponent, Fraction] = {}
    r: dict[Exponent, Fraction] = {}
    work = dict(f.terms)
    while work:
        e = max(work)
        c = work.pop(e)
        if not c:
            continue
        if all(a >= b for a, b in zip(e, le)):
            qe = tuple(a - b for a, b in zip(e, le))
            qc = c / lc
            q[qe] = q.get(qe, Fraction(0)) + qc
            # subtract qc * x^qe * p; the cancelled leading term never
            # reappears because every other monomial of p is lex-smaller
            for pe, pc in p.terms.items():
                if pe == le:
                    continue
                we = tuple(a + b for a, b in zip(qe, pe))
                nv = work.get(we, Fraction(0)) - qc * pc
                if nv:
                    work[we] = nv
                else:
                    work.pop(we, None)
        else:
            r[e] = r.get(e, Fraction(0)) + c
    return Poly(f.nvars, q), Poly(f.nvars, r)


def exact_div(f: Poly, p: Poly) -> Poly:
    """Quotient f/p when p divides f exactly; raises otherwise."""
    q, r = lex_reduce(f, p)
    if r:
        raise ValueError("polynomial division left a nonzero remainder")
    return q


# -- exact matrices -------------------------------------------------------


def frac_matrix(rows: Sequence[Sequence[object]]) -> np.ndarray:
    """Build an object-dtype matrix of Fractions from nested values."""
    m = len(rows)
    out = np.empty((m, len(rows[0])), dtype=object)
    for i, row in enumerate(rows):
        if len(row) != len(rows[0]):
            raise ValueError("ragged rows")
        for j, v in enumerate(row):
            out[i, j] = _as_fraction(v)
    return out


def is_symmetric(mat: np.ndarray) -> bool:
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        return False
    m = mat.shape[0]
    return all(mat[i, j] == mat[j, i] for i in range(m) for j in range(i + 1, m))


def is_psd_exact(mat: np.ndarray) -> bool:
    """Exact PSD test for a symmetric Fraction matrix.

    LDL^T with greedy diagonal pivoting: pivot on the largest diagonal
    entry; if every remaining diagonal entry is zero the block must vanish
    entirely (a zero diagonal with a nonzero off-diagonal entry gives an
    indefinite 2x2 minor), and a negative diagonal entry is a witness
    against PSD-ness.
    """
    if not is_symmetric(mat):
        raise ValueError("matrix is not symmetric")
    m = mat.shape[0]
    work = [[Fraction(mat[i, j]) for j in range(m)] for i in range(m)]
    active = list(range(m))
    while active:
        piv = max(active, key=lambda i: work[i][i])
        d = work[piv][piv]
        if d < 0:
            return False
        if d == 0:
            return all(work[i][j] == 0 for i in active for j in active)
        active.remove(piv)
        for i in active:
            f = work[i][piv] / d
            if f:
                for j in active:
                    work[i][j] -= f * work[piv][j]
    return True


class MatPoly:
    """Symmetric matrix polynomial: exponent -> symmetric coefficient matrix.

    Coefficient matrices are object-dtype numpy arrays of Fractions; zero
    matrices are dropped at construction.
    """

    __slots__ = ("nvars", "size", "terms")

    def __init__(self, nvars: int, size: int, terms: Mapping[Exponent, np.ndarray]):
        if nvars < 1 or size < 1:
            raise ValueError("bad dimensions")
        self.nvars = nvars
        self.size = size
        clean: dict[Exponent, np.ndarray] = {}
        for exp, mat in terms.items():
            e = tuple(int(v) for v in exp)
            if len(e) != nvars or any(v < 0 for v in e):
                raise ValueError(f"bad exponent {exp!r}")
            a = np.asarray(mat, dtype=object)
            if a.shape != (size, size):
                raise ValueError(f"coefficient of {e} has shape {a.shape}")
            a = frac_matrix(a.tolist())
            if not is_symmetric(a):
                raise ValueError(f"coefficient of {e} is not symmetric")
            if any(v != 0 for v in a.flat):
                clean[e] = a
        self.terms = clean

    @classmethod
    def from_entries(cls, entries: Sequence[Sequence[Poly]]) -> "MatPoly":
        size = len(entries)
        nvars = entries[0][0].nvars
        terms: dict[Exponent, np.ndarray] = {}
        for i in range(size):
            for j in range(size):
                p = entries[i][j]
                if p.nvars != nvars:
                    raise ValueError("mixed rings in entries")
                if p != entries[j][i]:
                    raise ValueError(f"entries ({i},{j}) and ({j},{i}) differ")
                for e, c in p.terms.items():
                    if e not in terms:
                        terms[e] = frac_matrix(
                            [[0] * size for _ in range(size)]
                        )
                    terms[e][i, j] = c
        return cls(nvars, size, terms)

    def entry(self, i: int, j: int) -> Poly:
        return Poly(self.nvars, {e: m[i, j] for e, m in self.terms.items()})

    def coeff(self, exp: Sequence[int]) -> np.ndarray:
        e = tuple(exp)
        if e in self.terms:
            return self.terms[e].copy()
        return frac_matrix([[0] * self.size for _ in range(self.size)])

    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MatPoly):
            return NotImplemented
        if (self.nvars, self.size) != (other.nvars, other.size):
            return False
        if set(self.terms) != set(other.terms):
            return False
        return all(
            (self.terms[e] == other.terms[e]).all() for e in self.terms
        )

    def __add__(self, other: "MatPoly") -> "MatPoly":
        if not isinstance(other, MatPoly):
            return NotImplemented
        if (self.nvars, self.size) != (other.nvars, other.size):
            raise ValueError("shape or ring mismatch")
        terms = {e: m.copy() for e, m in self.terms.items()}
        for e, m in other.terms.items():
            terms[e] = terms[e] + m if e in terms else m.copy()
        return MatPoly(self.nvars, self.size, terms)

    def __neg__(self) -> "MatPoly":
        return MatPoly(self.nvars, self.size, {e: -m for e, m in self.terms.items()})

    def __sub__(self, other: "MatPoly") -> "MatPoly":
        return self + (-other)

    def __mul__(self, other: object) -> "MatPoly":
        # Matrix-matrix products are deliberately unsupported; the package
        # only ever scales a matrix polynomial by a scalar polynomial.
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("rings differ")
            terms: dict[Exponent, np.ndarray] = {}
            for e1, m in self.terms.items():
                for e2, c in other.terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    add = m * c
                    terms[e] = terms[e] + add if e in terms else add
            return MatPoly(self.nvars, self.size, terms)
        if isinstance(other, (int, Fraction)):
            f = _as_fraction(other)
            return MatPoly(
                self.nvars, self.size, {e: m * f for e, m in self.terms.items()}
            )
        return NotImplemented

    __rmul__ = __mul__

    def eval(self, point: Sequence[object]) -> np.ndarray:
        """Evaluate at a point: object array for exact input, float array else."""
        exact = all(isinstance(v, (int, Fraction)) for v in point)
        if exact:
            acc = frac_matrix([[0] * self.size for _ in range(self.size)])
            for e, m in self.terms.items():
                s = Fraction(1)
                for x, k in zip(point, e):
                    if k:
                        s *= Fraction(x) ** k
                if s:
                    acc = acc + m * s
            return acc
        acc_f = np.zeros((self.size, self.size))
        for e, m in self.terms.items():
            s = 1.0
            for x, k in zip(point, e):
                if k:
                    s *= float(x) ** k
            if s:
                acc_f += m.astype(float) * s
        return acc_f

    def quadform(self) -> Poly:
        """xi^T G(x) xi as a polynomial in (x1..xn, xi1..xim)."""
        n, m = self.nvars, self.size
        terms: dict[Exponent, Fraction] = {}
        for e, mat in self.terms.items():
            for i in range(m):
                for j in range(m):
                    c = mat[i, j]
                    if not c:
                        continue
                    xi = [0] * m
                    xi[i] += 1
                    xi[j] += 1
                    key = e + tuple(xi)
                    terms[key] = terms.get(key, Fraction(0)) + c
        return Poly(n + m, terms)

    def __str__(self) -> str:
        rows = [
            "[" + ", ".join(str(self.entry(i, j)) for j in range(self.size)) + "]"
            for i in range(self.size)
        ]
        return "[" + "; ".join(rows) + "]"


@dataclass(frozen=True)
class BiForm:
    """Symmetric nx-by-nx matrix of polynomials in (x, xi), quadratic in xi.

    The xi block occupies the last `nxi` slots of each entry's ring.  Every
    entry must be homogeneous of degree exactly 2 in xi (the zero entry
    passes vacuously); this is the shape of the negated Hessian of the
    quadratic form xi^T G(x) xi.
    """

    nx: int
    nxi: int
    entries: tuple[tuple[Poly, ...], ...]

    def __post_init__(self) -> None:
        n, m = self.nx, self.nxi
        if len(self.entries) != n or any(len(r) != n for r in self.entries):
            raise ValueError("entry grid is not nx by nx")
        xi_slots = range(n, n + m)
        for i in range(n):
            for j in range(n):
                p = self.entries[i][j]
                if p.nvars != n + m:
                    raise ValueError("entry ring must have nx + nxi variables")
                if p != self.entries[j][i]:
                    raise ValueError(f"entries ({i},{j}) and ({j},{i}) differ")
                for e in p.terms:
                    if sum(e[s] for s in xi_slots) != 2:
                        raise ValueError("entry not homogeneous of degree 2 in xi")

    def entry(self, i: int, j: int) -> Poly:
        return self.entries[i][j]

    def as_matpoly(self) -> MatPoly:
        """The same matrix viewed over the joint (x, xi) ring."""
        return MatPoly.from_entries(self.entries)

    def contract(self, xi: Sequence[object]) -> MatPoly:
        """Substitute a fixed xi, leaving an nx-by-nx matrix polynomial in x."""
        if len(xi) != self.nxi:
            raise ValueError("xi dimension mismatch")
        vals = [_as_fraction(v) for v in xi]
        grid: list[list[Poly]] = []
        for i in range(self.nx):
            row = []
            for j in range(self.nx):
                terms: dict[Exponent, Fraction] = {}
                for e, c in self.entries[i][j].terms.items():
                    xe, be = e[: self.nx], e[self.nx :]
                    s = c
                    for v, k in zip(vals, be):
                        if k:
                            s *= v**k
                    if s:
                        terms[xe] = terms.get(xe, Fraction(0)) + s
                row.append(Poly(self.nx, terms))
            grid.append(row)
        return MatPoly.from_entries(grid)

    def eval(self, x: Sequence[object], xi: Sequence[object]) -> np.ndarray:
        point = list(x) + list(xi)
        exact = all(isinstance(v, (int, Fraction)) for v in point)
        if exact:
            return frac_matrix(
                [
                    [self.entries[i][j].eval(point) for j in range(self.nx)]
                    for i in range(self.nx)
                ]
            )
        return np.array(
            [
                [float(self.entries[i][j].eval([float(v) for v in point])) for j in range(self.nx)]
                for i in range(self.nx)
            ]
        )


def neg_hessian_biform(G: MatPoly) -> BiForm:
    """-d^2/dx_k dx_l [ xi^T G(x) xi ] as a BiForm.

    G is matrix concave on a region exactly when this form is PSD there
    for every xi, which is what the certificate searches test.
    """
    n = G.nvars
    s = G.quadform()
    grid = [[-(s.diff(k).diff(l)) for l in range(n)] for k in range(n)]
    return BiForm(n, G.size, tuple(tuple(r) for r in grid))
