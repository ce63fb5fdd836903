"""Certificates of matrix SOS structure and of q-module matrix concavity.

Every search here reduces to one primitive: does a symmetric polynomial
matrix H(z) admit a Gram representation H = V(z)^T W V(z) with W PSD, where
row (i, alpha) of V(z) is z^alpha e_i^T?  The q-module search is the scalar
instance of the same primitive repeated per multiplier pair, tied together
by shared coefficient-matching constraints.

The SDP solver is treated as a heuristic oracle; acceptance is decided by
an independent verification pass.  A near-feasible solver iterate first has
its affine residual distributed over the Gram entries by a min-Frobenius
projection, then must pass two honest checks: every target coefficient
reproduced within COEFF_TOL (relative), and every Gram block with
lambda_min >= -EIG_TOL.  Feasible status is granted only on passing both;
Gram spectrahedra of forms with real zeros have empty interior, so solver
statuses short of optimal are routine here, not failures.  Infeasibility
always carries a separating functional on coefficients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .polyalg import (
    Exponent,
    MatPoly,
    Poly,
    basis_exponents,
    exact_div,
    frac_matrix,
    is_psd_exact,
    neg_hessian_biform,
)
from .ratlift import RationalMatFn
from .sdpcore import SolverOptions, Status, solve_standard

COEFF_TOL = 1e-6  # per-coefficient reconstruction tolerance
EIG_TOL = 1e-8  # Gram blocks must satisfy lambda_min >= -EIG_TOL


@dataclass
class Certificate:
    """Outcome of a certificate search.

    `gram_blocks` maps a block label (an int for single-Gram checks, an
    (i, j) multiplier pair for q-module searches) to a floating PSD matrix,
    and `basis` maps the same label to the list of basis elements indexing
    that Gram — (row, exponent) pairs for matrix checks, bare exponents for
    scalar q-module blocks.  `residual` is the worst relative coefficient
    mismatch of the reconstruction (a Fraction 0 when an exact rational
    Gram was recovered; `exact_grams` then holds it).  On infeasibility
    `dual` is a separating functional: a map from constraint labels
    ((i, j, exponent) or bare exponent) to weights, nonnegative on every
    candidate Gram expansion but positive on the target.
    """

    kind: str  # MatrixSOS | UniformMatrixSOS | QModule
    status: str  # Feasible | Infeasible | InfeasibleByDegree | Unverified
    gram_blocks: dict = field(default_factory=dict)
    basis: dict = field(default_factory=dict)
    residual: object = None
    dual: dict | None = None
    degree: int | None = None
    detail: str = ""
    exact_grams: dict | None = None

    @property
    def feasible(self) -> bool:
        return self.status == "Feasible"

    def to_text(self) -> str:
        """Serialize as documented text: header, then per-block basis/Gram.

        Format: `key: value` header lines (kind, status, residual, degree,
        detail, dual), then per block a `block <label>` line, a `basis:`
        line listing elements in order, and `gram:` lines `<p> <q> <value>`
        for the upper triangle, skipping entries below 1e-12.  Exact
        rational entries print as `num/den`.
        """
        lines = [f"kind: {self.kind}", f"status: {self.status}"]
        if self.residual is not None:
            lines.append(f"residual: {self.residual}")
        if self.degree is not None:
            lines.append(f"degree: {self.degree}")
        if self.detail:
            lines.append(f"detail: {self.detail}")
        if self.dual:
            items = ", ".join(
                f"{k}:{v:.6g}" for k, v in sorted(self.dual.items(), key=str)
            )
            lines.append(f"dual: {items}")
        for label in sorted(self.gram_blocks, key=str):
            W = self.gram_blocks[label]
            exact = self.exact_grams.get(label) if self.exact_grams else None
            lines.append(f"block {label}")
            lines.append(
                "basis: " + "; ".join(_fmt_basis_item(b) for b in self.basis[label])
            )
            lines.append("gram:")
            N = W.shape[0]
            for p in range(N):
                for q in range(p, N):
                    if exact is not None:
                        v = exact[p][q]
                        if v:
                            lines.append(f"  {p} {q} {v}")
                    elif abs(W[p, q]) > 1e-12:
                        lines.append(f"  {p} {q} {W[p, q]!r}")
        return "\n".join(lines) + "\n"


def _fmt_basis_item(item) -> str:
    if (
        isinstance(item, tuple)
        and len(item) == 2
        and isinstance(item[0], int)
        and isinstance(item[1], tuple)
    ):
        return f"row{item[0]}*z^{item[1]}"
    return f"z^{item}"


# -- the shared Gram primitive ------------------------------------------------


def _support_filter(bases: list[list[Exponent]], diag_supports: list[set[Exponent]]):
    """Prune per-row bases to the diagonal-consistency fixpoint.

    An exponent alpha may stay in row i's basis only if 2*alpha lies in the
    support of H_ii or is a sum of two other surviving exponents of the same
    row: otherwise the matching constraint forces the Gram diagonal at
    (i, alpha) to zero, and PSD-ness zeroes the whole row.
    """
    out = [list(b) for b in bases]
    changed = True
    while changed:
        changed = False
        for i, B in enumerate(out):
            keep = []
            Bset = set(B)
            for a in B:
                twice = tuple(2 * k for k in a)
                if twice in diag_supports[i]:
                    keep.append(a)
                    continue
                others = Bset - {a}
                ok = False
                for b in others:
                    rem = tuple(t - s for t, s in zip(twice, b))
                    if min(rem) >= 0 and rem in others:
                        ok = True
                        break
                if ok:
                    keep.append(a)
            if len(keep) != len(B):
                out[i] = keep
                changed = True
    return out


def _min_eig(W: np.ndarray) -> float:
    if W.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh((W + W.T) / 2)[0])


def _svec_index(n: int, r: int, c: int) -> int:
    # upper-triangle row-major position, r <= c
    return r * n - (r * (r - 1)) // 2 + (c - r)


def _project_to_constraints(Ws, data, resid):
    """Min-Frobenius correction of the blocks absorbing the affine residual.

    `data[i]` is the (ks, rs, cs, vs) triplet bundle of block i and `resid`
    the per-constraint defect b - A(W).  The correction spreads a *small*
    solver residual over the Gram entries; callers re-check coefficients
    and eigenvalues afterwards, so it can never manufacture feasibility.
    """
    dims = [W.shape[0] for W in Ws]
    offs = np.concatenate(([0], np.cumsum([n * (n + 1) // 2 for n in dims])))
    ncon = len(resid)
    rows, cols, vals = [], [], []
    rt2 = math.sqrt(2.0)
    for bi, (ks, rs, cs, vs) in enumerate(data):
        n = dims[bi]
        for k, r, c, v in zip(ks, rs, cs, vs):
            if r == c:
                rows.append(k)
                cols.append(offs[bi] + _svec_index(n, r, r))
                vals.append(float(v))
            else:
                lo, hi = (r, c) if r < c else (c, r)
                rows.append(k)
                cols.append(offs[bi] + _svec_index(n, lo, hi))
                vals.append(rt2 * float(v))
    A = sp.csr_matrix((vals, (rows, cols)), shape=(ncon, int(offs[-1])))
    AAt = (A @ A.T).toarray()
    jitter = 1e-12 * max(1.0, float(np.max(np.diag(AAt))))
    cho = sla.cho_factor(AAt + jitter * np.eye(ncon), lower=True)
    dvec = np.zeros(int(offs[-1]))
    r = np.asarray(resid, dtype=float)
    for _ in range(2):  # one refinement pass against roundoff
        lam = sla.cho_solve(cho, r)
        step = A.T @ lam
        dvec += step
        r = r - A @ step
    out = []
    for bi, W in enumerate(Ws):
        n = dims[bi]
        D = np.zeros((n, n))
        k = int(offs[bi])
        for rr in range(n):
            D[rr, rr] = dvec[k]
            k += 1
            for cc in range(rr + 1, n):
                D[rr, cc] = D[cc, rr] = dvec[k] / rt2
                k += 1
        out.append(W + D)
    return out


def _try_exact_gram(W: np.ndarray, pair_lists, targets) -> list | None:
    """Round W to rationals that reproduce every target exactly and stay PSD.

    pair_lists[t] is the list of (p, q, mult) contributions of constraint t;
    targets[t] its exact coefficient.  Returns the rational matrix as nested
    Fractions, or None when no denominator in the ladder works.
    """
    N = W.shape[0]
    for den_cap in (10**4, 10**8, 10**12):
        Wq = [
            [Fraction(float(W[p, q])).limit_denominator(den_cap) for q in range(N)]
            for p in range(N)
        ]
        for p in range(N):
            for q in range(p + 1, N):
                avg = (Wq[p][q] + Wq[q][p]) / 2
                Wq[p][q] = Wq[q][p] = avg
        good = True
        for pairs, tgt in zip(pair_lists, targets):
            acc = Fraction(0)
            for p, q, mult in pairs:
                acc += mult * Wq[p][q]
            if acc != tgt:
                good = False
                break
        if good and is_psd_exact(frac_matrix(Wq)):
            return Wq
    return None


def matrix_sos_check(
    H: MatPoly,
    basis: Sequence[Exponent] | None = None,
    options: SolverOptions | None = None,
    exactify: bool | None = None,
) -> Certificate:
    """Search a PSD Gram W with H(z) = V(z)^T W V(z).

    `basis` fixes the candidate monomials (shared by every block row before
    per-row support pruning); by default all exponents up to half the degree
    of H are used.  Odd total degree is immediately infeasible.
    """
    kind = "MatrixSOS"
    m = H.size
    nv = H.nvars
    deg = H.degree()
    if all(not H.entry(i, j) for i in range(m) for j in range(m)):
        return Certificate(kind, "Feasible", {}, {}, Fraction(0), detail="zero matrix")
    if deg % 2 == 1:
        # a Gram expansion over degree-floor(deg/2) monomials cannot reach
        # any exponent of total degree `deg`; expose one as the functional
        for i in range(m):
            for j in range(i, m):
                for e in H.entry(i, j).terms:
                    if sum(e) == deg:
                        return Certificate(
                            kind,
                            "Infeasible",
                            dual={(i, j, e): 1.0},
                            detail="odd total degree",
                        )
    if basis is None:
        basis = basis_exponents(nv, deg // 2)
    diag_supports = [set(H.entry(i, i).terms) for i in range(m)]
    bases = _support_filter([list(basis) for _ in range(m)], diag_supports)

    rows: list[tuple[int, Exponent]] = [(i, a) for i in range(m) for a in bases[i]]
    pos = {ra: k for k, ra in enumerate(rows)}
    N = len(rows)

    # constraint per (i <= j, exponent): ordered Gram pairs summing there
    con_pairs: dict[tuple[int, int, Exponent], list[tuple[int, int, int]]] = {}
    for i in range(m):
        for j in range(i, m):
            for a in bases[i]:
                for bb in bases[j]:
                    g = tuple(s + t for s, t in zip(a, bb))
                    p, q = pos[(i, a)], pos[(j, bb)]
                    con_pairs.setdefault((i, j, g), []).append((p, q, 1))
    for i in range(m):
        for j in range(i, m):
            for e in H.entry(i, j).terms:
                if (i, j, e) not in con_pairs:
                    return Certificate(
                        kind,
                        "Infeasible",
                        dual={(i, j, e): 1.0},
                        detail=f"support of entry ({i},{j}) at {e} is not "
                        "reachable from the admissible basis",
                    )
    labels = sorted(con_pairs, key=lambda t: (t[0], t[1], sum(t[2]), t[2]))
    targets = [H.entry(i, j).coeff(e) for (i, j, e) in labels]

    if N == 0:
        return Certificate(kind, "Feasible", {}, {}, Fraction(0), detail="empty basis")

    ks, rs, cs, vs = [], [], [], []
    merged_pairs: list[list[tuple[int, int, float]]] = []
    for t, lab in enumerate(labels):
        merged: dict[tuple[int, int], float] = {}
        for p, q, _ in con_pairs[lab]:
            key = (min(p, q), max(p, q))
            merged[key] = merged.get(key, 0.0) + 1.0
        plist = []
        for (p, q), mult in merged.items():
            if p == q:
                ks.append(t), rs.append(p), cs.append(p), vs.append(mult)
            else:
                half = mult / 2.0
                ks.extend((t, t)), rs.extend((p, q)), cs.extend((q, p))
                vs.extend((half, half))
            plist.append((p, q, mult))
        merged_pairs.append(plist)

    opts = options or SolverOptions()
    tgt = np.array([float(v) for v in targets])
    res = solve_standard([N], [np.eye(N)], [(ks, rs, cs, vs)], tgt, opts)
    base_label = 0
    bas = {base_label: rows}
    if res.status is Status.INFEASIBLE and res.ray_y is not None:
        dual = {lab: float(v) for lab, v in zip(labels, res.ray_y) if abs(v) > 1e-12}
        return Certificate(kind, "Infeasible", basis=bas, dual=dual)
    if res.Xs is None:
        return Certificate(
            kind, "Unverified", basis=bas, detail=f"solver status {res.status.value}"
        )
    W = (res.Xs[0] + res.Xs[0].T) / 2

    def recon(Wm: np.ndarray) -> np.ndarray:
        return np.array(
            [sum(mult * Wm[p, q] for p, q, mult in plist) for plist in merged_pairs]
        )

    rvec = tgt - recon(W)
    if 0 < float(np.linalg.norm(rvec)) <= 1e-3 * (1 + float(np.linalg.norm(tgt))):
        W = _project_to_constraints([W], [(ks, rs, cs, vs)], rvec)[0]
    worst = float(np.max(np.abs(recon(W) - tgt) / (1.0 + np.abs(tgt))))
    grams = {base_label: W}
    note = "" if res.status is Status.OPTIMAL else f"; solver {res.status.value}"
    if _min_eig(W) < -EIG_TOL or worst > COEFF_TOL:
        return Certificate(
            kind,
            "Unverified",
            grams,
            bas,
            worst,
            detail="reconstruction residual above tolerance" + note,
        )
    cert = Certificate(kind, "Feasible", grams, bas, worst, detail=note.lstrip("; "))
    if exactify or (exactify is None and N <= 24):
        exact = _try_exact_gram(W, merged_pairs, [Fraction(v) for v in targets])
        if exact is not None:
            cert.exact_grams = {base_label: exact}
            cert.residual = Fraction(0)
            cert.detail = ("exact rational Gram; " + cert.detail).rstrip("; ")
    return cert


# -- concavity wrappers --------------------------------------------------------


def uniform_sos_concavity(
    G: MatPoly, options: SolverOptions | None = None
) -> Certificate:
    """Check -∇²(ξᵀG(x)ξ) = F(ξ,x)ᵀF(ξ,x) with F polynomial in (ξ, x) jointly.

    The Gram basis is {ξ_i x^α : |α| ≤ d−1}, d = ⌈deg G / 2⌉ — degree
    exactly one in ξ, since the Hessian is an exact quadratic form in ξ.
    """
    n, mm = G.nvars, G.size
    if G.degree() < 2:
        return Certificate(
            "UniformMatrixSOS", "Feasible", {}, {}, Fraction(0), detail="zero hessian"
        )
    Hb = neg_hessian_biform(G)
    d = (G.degree() + 1) // 2
    xi_basis: list[Exponent] = []
    for a in basis_exponents(n, d - 1):
        for i in range(mm):
            c = [0] * mm
            c[i] = 1
            xi_basis.append(a + tuple(c))
    cert = matrix_sos_check(Hb.as_matpoly(), basis=xi_basis, options=options)
    cert.kind = "UniformMatrixSOS"
    return cert


def pointwise_sos_concavity(
    G: MatPoly, xi: Sequence[object], options: SolverOptions | None = None
) -> Certificate:
    """Check that -∇²(ξᵀG(x)ξ) is an SOS matrix at one fixed rational ξ."""
    vals = list(xi.tolist() if isinstance(xi, np.ndarray) else xi)
    if not any(Fraction(v) for v in vals):
        raise ValueError("xi must be nonzero")
    if G.degree() < 2:
        return Certificate(
            "MatrixSOS", "Feasible", {}, {}, Fraction(0), detail="zero hessian"
        )
    Hxi = neg_hessian_biform(G).contract(vals)
    return matrix_sos_check(Hxi, options=options)


# -- q-module certificates -----------------------------------------------------


def _linearization_gap_numerator(R: RationalMatFn, nr: int, n: int, mm: int):
    """p(x)q(u)-free numerator of the concavity gap, denominators cleared.

    With G = N/den, the gap  ξᵀG(u)ξ + ∇(ξᵀGξ)|ᵤᵀ(x−u) − ξᵀG(x)ξ  equals
    num_T / (den(x)·den(u)²) where num_T is returned here as an exact
    polynomial over the (x, u, ξ) ring of nr variables.
    """
    xmap = list(range(n)) + list(range(2 * n, 2 * n + mm))
    umap = list(range(n, 2 * n)) + list(range(2 * n, 2 * n + mm))
    sN = R.numerator.quadform()
    sNx = sN.remap(nr, xmap)
    sNu = sN.remap(nr, umap)
    den_x = R.denom.remap(nr, list(range(n)))
    den_u = R.denom.remap(nr, list(range(n, 2 * n)))
    acc = den_x * den_u * sNu - den_u * den_u * sNx
    for k in range(n):
        dNu = sN.diff(k).remap(nr, umap)
        ddu = R.denom.diff(k).remap(nr, list(range(n, 2 * n)))
        lin = Poly.var(nr, k) - Poly.var(nr, n + k)
        acc = acc + den_x * (den_u * dNu - sNu * ddu) * lin
    return acc


def linearization_gap_poly(Gr: RationalMatFn, p: Poly, q: Poly) -> Poly:
    """The exact certificate target p(x)q(u)·gap(x,u,ξ) with denominators
    cleared; raises if (p, q) do not absorb them."""
    n, mm = Gr.nvars, Gr.size
    nr = 2 * n + mm
    num_T = _linearization_gap_numerator(Gr, nr, n, mm)
    px = p.remap(nr, list(range(n)))
    qu = q.remap(nr, list(range(n, 2 * n)))
    den_x = Gr.denom.remap(nr, list(range(n)))
    den_u = Gr.denom.remap(nr, list(range(n, 2 * n)))
    return exact_div(px * qu * num_T, den_x * den_u * den_u)


def qmod_basis(n: int, mm: int, t: int, cap: int, xcap: int | None = None):
    """Monomials x^a u^b ξ_c with |a| ≤ t, |b| ≤ t, |a|+|b| ≤ cap, |c| = 1,
    optionally also |a| ≤ xcap."""
    out: list[Exponent] = []
    amax = t if xcap is None else min(t, xcap)
    for a in basis_exponents(n, amax):
        ra = sum(a)
        for b in basis_exponents(n, min(t, cap - ra)):
            for i in range(mm):
                c = [0] * mm
                c[i] = 1
                out.append(a + b + tuple(c))
    return out


def _solve_qmod(lhs, mults, n, mm, t, caps, opts, xcaps=None):
    """One assembly+solve+verify of the q-module SDP at a given truncation.

    Returns (tag, grams, bases, worst, dual, unmatched): tag is "ok",
    "unmatched" (a target monomial outside every block's reach),
    "infeasible" (solver ray), or "unverified".
    """
    bases: dict[tuple[int, int], list[Exponent]] = {}
    for lab, _gg, di, _dj in mults:
        B = qmod_basis(n, mm, t, caps[lab], None if xcaps is None else xcaps.get(lab))
        if B:
            bases[lab] = B

    con: dict[Exponent, dict[tuple[object, int, int], float]] = {}
    for lab, gg, _di, _dj in mults:
        B = bases.get(lab)
        if not B:
            continue
        for p in range(len(B)):
            for q in range(p, len(B)):
                e = tuple(s + t2 for s, t2 in zip(B[p], B[q]))
                mult = Fraction(1 if p == q else 2)
                for de, cde in gg.terms.items():
                    g = tuple(s + t2 for s, t2 in zip(e, de))
                    key = (lab, p, q)
                    con.setdefault(g, {})
                    con[g][key] = con[g].get(key, 0.0) + float(mult * cde)
    for g in lhs.terms:
        if g not in con:
            return "unmatched", None, bases, None, None, g

    labels = sorted(con, key=lambda e: (sum(e), e))
    block_ids = sorted(bases, key=str)
    bidx = {lab: k for k, lab in enumerate(block_ids)}
    dims = [len(bases[lab]) for lab in block_ids]
    data = [([], [], [], []) for _ in block_ids]
    for tnum, g in enumerate(labels):
        for (lab, p, q), w in con[g].items():
            ks, rs, cs, vs = data[bidx[lab]]
            if p == q:
                ks.append(tnum), rs.append(p), cs.append(p), vs.append(w)
            else:
                ks.extend((tnum, tnum)), rs.extend((p, q)), cs.extend((q, p))
                vs.extend((w / 2.0, w / 2.0))
    tgt = np.array([float(lhs.coeff(g)) for g in labels])
    res = solve_standard(dims, [np.eye(d) for d in dims], data, tgt, opts)
    if res.status is Status.INFEASIBLE and res.ray_y is not None:
        dual = {g: float(v) for g, v in zip(labels, res.ray_y) if abs(v) > 1e-12}
        return "infeasible", None, bases, None, dual, None
    if res.Xs is None:
        return f"unverified: solver {res.status.value}", None, bases, None, None, None

    Ws = [(X + X.T) / 2 for X in res.Xs]

    def recon(Wl) -> np.ndarray:
        out = np.zeros(len(labels))
        for tnum, g in enumerate(labels):
            acc = 0.0
            for (lab, p, q), w in con[g].items():
                acc += w * Wl[bidx[lab]][p, q]
            out[tnum] = acc
        return out

    rvec = tgt - recon(Ws)
    if 0 < float(np.linalg.norm(rvec)) <= 1e-3 * (1 + float(np.linalg.norm(tgt))):
        Ws = _project_to_constraints(Ws, data, rvec)
    worst = float(np.max(np.abs(recon(Ws) - tgt) / (1.0 + np.abs(tgt))))
    if worst > COEFF_TOL or any(_min_eig(W) < -EIG_TOL for W in Ws):
        return "unverified: residual above tolerance", None, bases, worst, None, None
    grams = {lab: W for lab, W in zip(block_ids, Ws)}
    return "ok", grams, bases, worst, None, None


def qmod_certificate_search(
    Gr: RationalMatFn,
    gs: Sequence[Poly],
    p: Poly,
    q: Poly,
    t: int,
    options: SolverOptions | None = None,
) -> Certificate:
    """Search σ_ij SOS in (x, u, ξ) with

        p(x)q(u)·gap(x, u, ξ) = Σ_{i,j} g_i(x) g_j(u) σ_ij(x, u, ξ),

    g_0 = 1, σ degree ≤ 2t in each variable group (x and u separately) and
    exactly 2 in ξ.  The reported half-degree d of the induced lifting is
    the smallest value admitting a verified certificate within the t cap:
    candidates are tried in increasing order, constraining each block's
    x-side degree to ⌊(2d − deg g_i)/2⌋.
    """
    if not p or not q:
        raise ValueError("p and q must be nonzero")
    if t < 1:
        raise ValueError("t must be at least 1")
    n, mm = Gr.nvars, Gr.size
    nr = 2 * n + mm
    opts = options or SolverOptions()
    kind = "QModule"

    try:
        lhs = linearization_gap_poly(Gr, p, q)
    except ValueError as exc:
        raise ValueError("p, q do not clear the denominators of G") from exc

    if not lhs:
        return Certificate(
            kind,
            "Feasible",
            {},
            {},
            Fraction(0),
            degree=max(1, (Gr.degree() + 1) // 2),
            detail="linearization gap is identically zero",
        )

    gs_emb = [(Poly.const(nr, 1), 0)] + [
        (g.remap(nr, list(range(n))), g.degree()) for g in gs
    ]
    gu_emb = [(Poly.const(nr, 1), 0)] + [
        (g.remap(nr, list(range(n, 2 * n))), g.degree()) for g in gs
    ]
    degxu = lhs.degree_in(range(2 * n))
    mults = []
    caps: dict[tuple[int, int], int] = {}
    for i, (gx, di) in enumerate(gs_emb):
        for j, (gu, dj) in enumerate(gu_emb):
            cap = (degxu - di - dj) // 2
            if cap < 0:
                continue
            mults.append(((i, j), gx * gu, di, dj))
            caps[(i, j)] = cap

    # quick reachability bound before any assembly
    degx_lhs = lhs.degree_in(range(n))
    degu_lhs = lhs.degree_in(range(n, 2 * n))
    reach_x = max((di + 2 * min(t, caps[lab]) for lab, _g, di, _dj in mults), default=-1)
    reach_u = max((dj + 2 * min(t, caps[lab]) for lab, _g, _di, dj in mults), default=-1)
    if degx_lhs > reach_x or degu_lhs > reach_u:
        return Certificate(
            kind,
            "InfeasibleByDegree",
            detail=f"target degree ({degx_lhs} in x, {degu_lhs} in u) exceeds "
            f"the reach of the σ cap t={t}",
        )

    d_floor = max(1, (Gr.degree() + 1) // 2)
    d_max = max(
        d_floor,
        max(
            math.ceil((di + 2 * min(t, caps[lab])) / 2)
            for lab, _g, di, _dj in mults
        ),
    )
    last_tag, last_dual, last_unmatched = "unverified: no solve ran", None, None
    for dd in range(d_floor, d_max + 1):
        if dd == d_max:
            xcaps = None  # full basis: rays and unmatched supports are final
        else:
            xcaps = {lab: (2 * dd - di) // 2 for lab, _g, di, _dj in mults}
        tag, grams, bases, worst, dual, unmatched = _solve_qmod(
            lhs, mults, n, mm, t, caps, opts, xcaps
        )
        if tag == "ok":
            return Certificate(
                kind,
                "Feasible",
                grams,
                bases,
                worst,
                degree=dd,
                detail=f"t={t}; blocks {len(grams)}",
            )
        last_tag, last_dual, last_unmatched = tag, dual, unmatched

    if last_tag == "unmatched":
        return Certificate(
            kind,
            "InfeasibleByDegree",
            dual={last_unmatched: 1.0},
            detail=f"monomial {last_unmatched} of the target is outside every "
            "admissible block support",
        )
    if last_tag == "infeasible":
        return Certificate(kind, "Infeasible", dual=last_dual, detail=f"t={t}")
    return Certificate(kind, "Unverified", detail=last_tag)


# -- exact verification --------------------------------------------------------


def sigma_to_poly(nr: int, spec) -> Poly:
    """Materialize a σ multiplier given as a Poly, a ('squares', [(c, f),…])
    sum c·f², or a ('gram', W, basis) rational Gram over monomial exponents."""
    if isinstance(spec, Poly):
        return spec
    tag = spec[0]
    if tag == "squares":
        acc = Poly.zero(nr)
        for c, f in spec[1]:
            acc = acc + f * f * Fraction(c)
        return acc
    if tag == "gram":
        _, W, basis = spec
        acc = Poly.zero(nr)
        for pi, a in enumerate(basis):
            for qi, b in enumerate(basis):
                w = Fraction(W[pi][qi])
                if w:
                    e = tuple(s + t for s, t in zip(a, b))
                    acc = acc + Poly.monomial(nr, e, w)
        return acc
    raise ValueError(f"unknown sigma form {tag!r}")


def verify_identity(lhs: Poly, terms: Sequence[tuple[Poly, Poly, object]]) -> Poly:
    """Exact residual lhs − Σ g_x·g_u·σ over a shared variable ring.

    Each term is (g_x, g_u, σ) with σ in any `sigma_to_poly` form; all
    polynomials must already live in the same ring as `lhs`.  A zero
    residual (the returned Poly is falsy) is the identity holding exactly.
    """
    acc = Poly.zero(lhs.nvars)
    for gx, gu, spec in terms:
        sig = sigma_to_poly(lhs.nvars, spec)
        acc = acc + gx * gu * sig
    return lhs - acc


def matrix_identity_residual(target: MatPoly, parts: Sequence[MatPoly]) -> MatPoly:
    """Exact entrywise residual target − Σ parts for matrix identities."""
    acc = target
    for Pm in parts:
        acc = acc - Pm
    return acc
