"""Moment liftings of sets cut out by polynomial matrix inequalities.

Given a symmetric matrix polynomial G, the set {x : G(x) >= 0} acquires a
lifted description in pseudomoment variables y_alpha, one per monomial:
the coefficient pencil of G becomes linear in y, and a moment matrix (plus
localizer pencils when domain constraints g_k(x) >= 0 are present) couples
the y's back to an actual point through the pins y_0 = 1, y_{e_i} = x_i.

Everything here is exact: pencil data are Fraction matrices, and floats
appear only once a pencil is handed to the SDP layer.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .polyalg import (
    Exponent,
    MatPoly,
    Poly,
    basis_exponents,
    frac_matrix,
    is_symmetric,
)

# A pencil variable is either a pseudomoment y_alpha or, for rational
# liftings, an auxiliary z_beta standing for x^beta / p(x).
VarKey = tuple[str, Exponent]

__all__ = [
    "VarKey",
    "LinearPencil",
    "LiftedLMI",
    "moment_coeff_matrices",
    "localizer_coeff_matrices",
    "moment_lift",
    "putinar_lift",
    "standard_pins",
    "canonical_lifting",
]


@dataclass(frozen=True)
class LinearPencil:
    """Affine symmetric-matrix map  constant + sum_k var_k * coeffs[k]."""

    size: int
    constant: np.ndarray
    coeffs: Mapping[VarKey, np.ndarray]
    label: str = ""

    def __post_init__(self) -> None:
        c = frac_matrix(np.asarray(self.constant, dtype=object).tolist())
        if c.shape != (self.size, self.size) or not is_symmetric(c):
            raise ValueError("constant block must be symmetric of the stated size")
        clean: dict[VarKey, np.ndarray] = {}
        for key, mat in self.coeffs.items():
            kind, exp = key
            if kind not in ("y", "z"):
                raise ValueError(f"unknown variable kind {kind!r}")
            m = frac_matrix(np.asarray(mat, dtype=object).tolist())
            if m.shape != (self.size, self.size) or not is_symmetric(m):
                raise ValueError(f"coefficient of {key} must be symmetric")
            if any(v != 0 for v in m.flat):
                clean[(kind, tuple(exp))] = m
        object.__setattr__(self, "constant", c)
        object.__setattr__(self, "coeffs", clean)

    def eval(self, assignment: Mapping[VarKey, object]) -> np.ndarray:
        """Evaluate the pencil; exact if every assigned value is rational."""
        exact = all(
            isinstance(assignment.get(k, 0), (int, Fraction)) for k in self.coeffs
        )
        if exact:
            acc = self.constant.copy()
            for key, mat in self.coeffs.items():
                v = Fraction(assignment.get(key, 0))
                if v:
                    acc = acc + mat * v
            return acc
        acc_f = self.constant.astype(float)
        for key, mat in self.coeffs.items():
            v = float(assignment.get(key, 0))
            if v:
                acc_f += mat.astype(float) * v
        return acc_f

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearPencil):
            return NotImplemented
        if self.size != other.size or set(self.coeffs) != set(other.coeffs):
            return False
        if not (self.constant == other.constant).all():
            return False
        return all((self.coeffs[k] == other.coeffs[k]).all() for k in self.coeffs)


def standard_pins(nvars: int) -> dict[Exponent, str]:
    """Pin map: the zero exponent is the constant 1, e_i is coordinate x_i."""
    pins: dict[Exponent, str] = {(0,) * nvars: "1"}
    for i in range(nvars):
        e = [0] * nvars
        e[i] = 1
        pins[tuple(e)] = f"x{i + 1}"
    return pins


@dataclass(frozen=True)
class LiftedLMI:
    """A lifted LMI description: index sets, pins, and linear pencils.

    `y_index` and `z_index` are in graded order.  `pins` fixes y_0 = 1 and
    y_{e_i} = x_i; all other indexed variables are free lifting variables.
    `denom` carries the denominator polynomial for rational liftings so the
    canonical lifting of a point knows what z_beta stands for.
    """

    nvars: int
    y_index: tuple[Exponent, ...]
    z_index: tuple[Exponent, ...]
    pins: Mapping[Exponent, str]
    pencils: tuple[LinearPencil, ...]
    denom: Poly | None = None

    def __post_init__(self) -> None:
        known = {("y", e) for e in self.y_index} | {("z", e) for e in self.z_index}
        for pexp in self.pins:
            if ("y", tuple(pexp)) not in known:
                raise ValueError(f"pinned exponent {pexp} missing from y_index")
        for pencil in self.pencils:
            for key in pencil.coeffs:
                if key not in known:
                    raise ValueError(f"pencil references unknown variable {key}")

    def free_keys(self) -> list[VarKey]:
        """Unpinned variables, y's first, each set in graded order."""
        out: list[VarKey] = [
            ("y", e) for e in self.y_index if e not in self.pins
        ]
        out.extend(("z", e) for e in self.z_index)
        return out

    def n_free(self) -> int:
        return len(self.y_index) - len(self.pins) + len(self.z_index)

    def pin_values(self, x: Sequence[object]) -> dict[VarKey, object]:
        if len(x) != self.nvars:
            raise ValueError("point dimension mismatch")
        vals: dict[VarKey, object] = {}
        for exp, label in self.pins.items():
            vals[("y", exp)] = 1 if label == "1" else x[int(label[1:]) - 1]
        return vals

    def summary(self) -> str:
        sizes = ", ".join(f"{p.size}x{p.size}" for p in self.pencils)
        return (
            f"{len(self.pencils)} pencils ({sizes}), "
            f"{self.n_free()} free lifting variables"
        )

    # -- canonical serialization -----------------------------------------

    def to_json(self) -> str:
        """Canonical text form: graded index sets, sorted keys, rational strings."""

        def mat_obj(m: np.ndarray) -> list[list[str]]:
            return [[str(v) for v in row] for row in m.tolist()]

        obj = {
            "nvars": self.nvars,
            "y_index": [list(e) for e in self.y_index],
            "z_index": [list(e) for e in self.z_index],
            "pins": {",".join(map(str, e)): lab for e, lab in self.pins.items()},
            "pencils": [
                {
                    "label": p.label,
                    "size": p.size,
                    "constant": mat_obj(p.constant),
                    "coeffs": {
                        f"{kind}:{','.join(map(str, exp))}": mat_obj(mat)
                        for (kind, exp), mat in p.coeffs.items()
                    },
                }
                for p in self.pencils
            ],
            "denominator": self.denom.to_obj() if self.denom else None,
        }
        return json.dumps(obj, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "LiftedLMI":
        obj = json.loads(text)
        nvars = int(obj["nvars"])

        def parse_exp(s: str) -> Exponent:
            return tuple(int(v) for v in s.split(","))

        pencils = []
        for p in obj["pencils"]:
            coeffs: dict[VarKey, np.ndarray] = {}
            for key, mat in p["coeffs"].items():
                kind, _, exp = key.partition(":")
                coeffs[(kind, parse_exp(exp))] = frac_matrix(mat)
            pencils.append(
                LinearPencil(
                    size=int(p["size"]),
                    constant=frac_matrix(p["constant"]),
                    coeffs=coeffs,
                    label=p.get("label", ""),
                )
            )
        denom = (
            Poly.from_obj(nvars, obj["denominator"]) if obj.get("denominator") else None
        )
        return cls(
            nvars=nvars,
            y_index=tuple(tuple(e) for e in obj["y_index"]),
            z_index=tuple(tuple(e) for e in obj["z_index"]),
            pins={parse_exp(k): v for k, v in obj["pins"].items()},
            pencils=tuple(pencils),
            denom=denom,
        )


def moment_coeff_matrices(nvars: int, d: int) -> dict[Exponent, np.ndarray]:
    """0/1 coefficient matrices of the degree-d moment matrix.

    With basis b = all exponents of degree <= d in graded order, the matrix
    for alpha has a 1 at (i, j) exactly when b[i] + b[j] = alpha, so that
    [x]_d [x]_d^T = sum_alpha x^alpha * M_alpha.
    """
    basis = basis_exponents(nvars, d)
    s = len(basis)
    out: dict[Exponent, np.ndarray] = {}
    for i in range(s):
        for j in range(s):
            a = tuple(u + v for u, v in zip(basis[i], basis[j]))
            if a not in out:
                out[a] = frac_matrix([[0] * s for _ in range(s)])
            out[a][i, j] = Fraction(1)
    return out


def localizer_coeff_matrices(g: Poly, order: int) -> dict[Exponent, np.ndarray]:
    """Coefficient matrices of g(x) * [x]_e [x]_e^T with e = order - ceil(deg g / 2).

    Entry (i, j) of the matrix for beta is the coefficient of
    x^(beta - b_i - b_j) in g.  The half-degree of g is rounded up, so an
    odd-degree g loses a basis degree rather than overshooting 2*order.
    """
    if not g:
        raise ValueError("localizer for the zero polynomial")
    dk = math.ceil(g.degree() / 2)
    e = order - dk
    if e < 0:
        raise ValueError(f"order {order} too small for a degree-{g.degree()} constraint")
    basis = basis_exponents(g.nvars, e)
    s = len(basis)
    out: dict[Exponent, np.ndarray] = {}
    for i in range(s):
        for j in range(s):
            bb = tuple(u + v for u, v in zip(basis[i], basis[j]))
            for ge, gc in g.terms.items():
                beta = tuple(u + v for u, v in zip(bb, ge))
                if beta not in out:
                    out[beta] = frac_matrix([[0] * s for _ in range(s)])
                out[beta][i, j] += gc
    # degree-cancellation can zero a matrix out; drop those
    return {
        b: m for b, m in out.items() if any(v != 0 for v in m.flat)
    }


def _pencil_from_coeffs(
    mats: Mapping[Exponent, np.ndarray], size: int, label: str
) -> LinearPencil:
    zero = (0,) * len(next(iter(mats)))
    constant = mats.get(zero)
    if constant is None:
        constant = frac_matrix([[0] * size for _ in range(size)])
    coeffs = {("y", e): m for e, m in mats.items() if e != zero}
    # the zero exponent is pinned to 1, but keeping it out of the variable
    # map (folded into the constant) makes pencils directly evaluable
    return LinearPencil(size=size, constant=constant, coeffs=coeffs, label=label)


def moment_lift(G: MatPoly) -> LiftedLMI:
    """Lift {x : G(x) >= 0} at the minimal order d = ceil(deg G / 2).

    Produces two pencils: the coefficient pencil of G in the pseudomoments
    and the order-d moment matrix.  Exactness of the description (equality
    with the direct set) is a property of G, not of this construction; the
    construction itself is always sound.
    """
    if G.degree() < 0:
        raise ValueError("cannot lift the zero matrix polynomial")
    n = G.nvars
    # a constant G still needs an order-1 moment matrix to carry the pins
    d = max(1, math.ceil(G.degree() / 2))
    y_index = tuple(basis_exponents(n, 2 * d))
    gmats = {e: m for e, m in G.terms.items()}
    pencil_g = _pencil_from_coeffs(gmats, G.size, "matrix")
    pencil_m = _pencil_from_coeffs(
        moment_coeff_matrices(n, d), len(basis_exponents(n, d)), "moment"
    )
    return LiftedLMI(
        nvars=n,
        y_index=y_index,
        z_index=(),
        pins=standard_pins(n),
        pencils=(pencil_g, pencil_m),
    )


def putinar_lift(G: MatPoly, gs: Sequence[Poly], order: int) -> LiftedLMI:
    """Order-N lifting of {x in D : G(x) >= 0}, D = {g_k(x) >= 0 for all k}.

    Pencils: the coefficient pencil of G, then one localizer per k = 0..m
    with g_0 = 1 (the bare moment matrix).  Requires order >= ceil(deg G/2)
    and order >= ceil(deg g_k / 2) so every pencil has a nonempty basis.
    """
    n = G.nvars
    d = math.ceil(G.degree() / 2)
    if order < d:
        raise ValueError(f"order {order} below the half-degree {d} of the matrix")
    for g in gs:
        if g.nvars != n:
            raise ValueError("domain polynomial ring mismatch")
    y_index = tuple(basis_exponents(n, 2 * order))
    pencils = [_pencil_from_coeffs(dict(G.terms), G.size, "matrix")]
    one = Poly.const(n, 1)
    for k, g in enumerate([one, *gs]):
        mats = localizer_coeff_matrices(g, order)
        size = len(basis_exponents(n, order - math.ceil(g.degree() / 2)))
        label = "moment" if k == 0 else f"localizer g{k}"
        pencils.append(_pencil_from_coeffs(mats, size, label))
    return LiftedLMI(
        nvars=n,
        y_index=y_index,
        z_index=(),
        pins=standard_pins(n),
        pencils=tuple(pencils),
    )


def canonical_lifting(
    lmi: LiftedLMI, x: Sequence[object]
) -> dict[VarKey, object]:
    """The lifting a real point induces: y_alpha = x^alpha, z_beta = x^beta/p(x).

    Exact when x has rational entries and, for rational liftings, p(x) != 0.
    """
    if len(x) != lmi.nvars:
        raise ValueError("point dimension mismatch")
    vals: dict[VarKey, object] = {}
    exact = all(isinstance(v, (int, Fraction)) for v in x)
    pt = [Fraction(v) if exact else float(v) for v in x]

    def power(e: Exponent) -> object:
        s: object = Fraction(1) if exact else 1.0
        for v, k in zip(pt, e):
            if k:
                s = s * v**k
        return s

    for e in lmi.y_index:
        vals[("y", e)] = power(e)
    if lmi.z_index:
        if lmi.denom is None:
            raise ValueError("rational lifting lacks its denominator polynomial")
        pv = lmi.denom.eval(pt)
        if pv == 0:
            raise ZeroDivisionError("denominator vanishes at the point")
        for e in lmi.z_index:
            vals[("z", e)] = power(e) / pv
    return vals
