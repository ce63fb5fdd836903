"""Embedded dense semidefinite solver and the conic-program surface.

The public surface works on inequality-form programs

    minimize    f^T w
    subject to  F_{b,0} + sum_i w_i F_{b,i}  >=  0     for every block b,

which is how lifted LMIs arrive.  Internally everything is cast to the
standard primal/dual pair

    (P)  min <C, X>  s.t.  <A_k, X> = b_k,  X >= 0
    (D)  max b^T y   s.t.  sum_k y_k A_k + S = C,  S >= 0

(the inequality form enters as (D) with A = -F, b = -f) and solved by a
primal-dual interior-point method on the homogeneous self-dual embedding:
Nesterov-Todd scaling, Mehrotra predictor-corrector, dense Cholesky of the
Schur complement.  Infeasibility and unboundedness come out of the tau/kappa
ray as Farkas-type certificates.

Exact rational inputs are rounded to float64 once, when a program is built;
everything after that is floating point.  The solve path is deterministic:
no randomization, no iteration-order ambiguity.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .momlift import LiftedLMI, VarKey, canonical_lifting

__all__ = [
    "Status",
    "SolverOptions",
    "ConicProgram",
    "PencilBlock",
    "Solution",
    "FeasibilityResult",
    "FeasibilityOracle",
    "solve",
    "solve_standard",
    "feasibility",
    "optimize_linear",
    "plant_lmi_instance",
    "kkt_residuals",
    "EPS_FEAS",
    "EPS_STRICT",
]

# Lifted membership thresholds: In needs t* above -EPS_FEAS, Out needs t*
# below -EPS_STRICT; the band between is a dead zone (Indeterminate).
EPS_FEAS = 1e-7
EPS_STRICT = 1e-5


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    MAX_ITER = "MaxIter"
    NUMERICAL = "Numerical"
    # objective provably outside the caller's dead band; iterate is coarse
    SEPARATED = "Separated"


@dataclass(frozen=True)
class SolverOptions:
    max_iter: int = 200
    tol_gap: float = 1e-8
    tol_feas: float = 1e-8
    step_frac: float = 0.98
    # do-not-care interval (lo, hi) for the objective value: the solve may
    # return SEPARATED as soon as the duality bracket provably avoids it,
    # long before full convergence (sign queries need far less accuracy)
    band: tuple[float, float] | None = None


@dataclass
class PencilBlock:
    """One affine matrix block: constant + sum_i w_i * coeff_i.

    Coefficients are stored as symmetric triplet arrays (var, row, col,
    value) with both halves of each off-diagonal entry present.
    """

    size: int
    constant: np.ndarray
    var_idx: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray

    @classmethod
    def from_matrices(
        cls, constant: np.ndarray, coeff_mats: Sequence[tuple[int, np.ndarray]], size: int
    ) -> "PencilBlock":
        ks, rs, cs, vs = [], [], [], []
        for k, mat in coeff_mats:
            m = np.asarray(mat, dtype=float)
            nz = np.nonzero(m)
            ks.extend([k] * len(nz[0]))
            rs.extend(nz[0].tolist())
            cs.extend(nz[1].tolist())
            vs.extend(m[nz].tolist())
        return cls(
            size=size,
            constant=np.asarray(constant, dtype=float),
            var_idx=np.asarray(ks, dtype=np.intp),
            rows=np.asarray(rs, dtype=np.intp),
            cols=np.asarray(cs, dtype=np.intp),
            vals=np.asarray(vs, dtype=float),
        )

    def value(self, w: np.ndarray) -> np.ndarray:
        out = self.constant.copy()
        np.add.at(out, (self.rows, self.cols), self.vals * w[self.var_idx])
        return out


@dataclass
class ConicProgram:
    """Inequality-form conic program over PSD blocks.

    `bounds[i] = (lo, hi)` (either side may be None) adds scalar blocks
    w_i - lo >= 0 / hi - w_i >= 0 when the program is solved.
    """

    nvar: int
    objective: np.ndarray
    blocks: list[PencilBlock]
    var_labels: list[str] = field(default_factory=list)
    bounds: list[tuple[float | None, float | None]] | None = None

    def __post_init__(self) -> None:
        self.objective = np.asarray(self.objective, dtype=float)
        if self.objective.shape != (self.nvar,):
            raise ValueError("objective length mismatch")
        if not self.var_labels:
            self.var_labels = [f"w{i}" for i in range(self.nvar)]

    def all_blocks(self) -> list[PencilBlock]:
        out = list(self.blocks)
        if self.bounds:
            for i, (lo, hi) in enumerate(self.bounds):
                one = np.ones(1)
                if lo is not None and np.isfinite(lo):
                    out.append(
                        PencilBlock(1, np.array([[-lo]]), np.array([i]),
                                    np.zeros(1, np.intp), np.zeros(1, np.intp), one)
                    )
                if hi is not None and np.isfinite(hi):
                    out.append(
                        PencilBlock(1, np.array([[hi]]), np.array([i]),
                                    np.zeros(1, np.intp), np.zeros(1, np.intp), -one)
                    )
        return out


@dataclass
class Residuals:
    primal: float
    dual: float
    gap: float


@dataclass
class Solution:
    status: Status
    x: np.ndarray | None
    objective: float | None
    duals: list[np.ndarray] | None
    slacks: list[np.ndarray] | None
    residuals: Residuals
    iterations: int
    certificate: dict | None = None


# -- standard-form data and the interior-point engine ----------------------


class _Block:
    """Constraint data of one PSD block of the standard form."""

    __slots__ = ("n", "C", "adj", "pr", "pc", "P", "dense_P")

    def __init__(self, n: int, C: np.ndarray, ks, rs, cs, vs, nvar: int):
        self.n = n
        self.C = np.asarray(C, dtype=float)
        ks = np.asarray(ks, dtype=np.intp)
        rs = np.asarray(rs, dtype=np.intp)
        cs = np.asarray(cs, dtype=np.intp)
        vs = np.asarray(vs, dtype=float)
        # adj maps y -> (sum_k y_k A_k) entries; used for both A and A^T
        self.adj = sp.csr_matrix(
            (vs, (rs * n + cs, ks)), shape=(n * n, nvar)
        )
        # distinct matrix positions carrying any coefficient; the Schur
        # kernel is (npos x npos), never (nnz x nnz)
        flat, inv = np.unique(rs * n + cs, return_inverse=True)
        self.pr = flat // n
        self.pc = flat % n
        npos = len(flat)
        P = sp.csr_matrix((vs, (inv, ks)), shape=(npos, nvar))
        if npos * nvar <= 4_000_000:
            self.dense_P = True
            self.P = P.toarray()
        else:
            self.dense_P = False
            self.P = P

    def apply(self, X: np.ndarray) -> np.ndarray:
        return self.adj.T @ X.ravel()

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        return (self.adj @ y).reshape(self.n, self.n)

    def schur(self, W: np.ndarray, M: np.ndarray) -> None:
        """M += A_k . (W A_l W) over the constraint pairs of this block."""
        npos = len(self.pr)
        if npos == 0:
            return
        Wr = W[self.pr]
        Wc = W[self.pc]
        if self.dense_P:
            K = Wr[:, self.pr] * Wc[:, self.pc]
            M += self.P.T @ (K @ self.P)
            return
        chunk = max(1, 4_000_000 // npos)
        for lo in range(0, npos, chunk):
            hi = min(npos, lo + chunk)
            K = Wr[lo:hi][:, self.pr] * Wc[lo:hi][:, self.pc]
            M += self.P[lo:hi].T @ (K @ self.P)


@dataclass
class StandardResult:
    status: Status  # OPTIMAL / INFEASIBLE (primal) / UNBOUNDED (dual) reuse
    Xs: list[np.ndarray] | None
    y: np.ndarray | None
    Ss: list[np.ndarray] | None
    pobj: float | None
    dobj: float | None
    residuals: Residuals
    iterations: int
    ray_y: np.ndarray | None = None
    ray_Xs: list[np.ndarray] | None = None


def _chol(mat: np.ndarray) -> np.ndarray | None:
    try:
        return np.linalg.cholesky(mat)
    except np.linalg.LinAlgError:
        return None


def _chol_jittered(mat: np.ndarray) -> np.ndarray | None:
    L = _chol(mat)
    if L is not None:
        return L
    scale = max(1.0, float(np.trace(mat)) / mat.shape[0])
    for jit in (1e-14, 1e-12, 1e-10):
        L = _chol(mat + jit * scale * np.eye(mat.shape[0]))
        if L is not None:
            return L
    return None


def _max_step(L: np.ndarray, D: np.ndarray) -> float:
    """Largest alpha with V + alpha*D >= 0, where V = L L^T > 0."""
    T = sla.solve_triangular(L, D, lower=True)
    T = sla.solve_triangular(L, T.T, lower=True)
    T = (T + T.T) / 2
    lam = float(np.linalg.eigvalsh(T)[0])
    if lam >= -1e-16:
        return np.inf
    return 1.0 / (-lam)


def solve_standard(
    block_dims: Sequence[int],
    Cs: Sequence[np.ndarray],
    blocks_data: Sequence[tuple],
    b: np.ndarray,
    options: SolverOptions = SolverOptions(),
    band: tuple[float, float] | None = None,
) -> StandardResult:
    """Solve the standard primal/dual pair on the self-dual embedding.

    `blocks_data[b]` is a triplet bundle (ks, rs, cs, vs) describing the
    constraint matrices of block b; `Cs[b]` its cost matrix; `b` the
    right-hand side.  Returns both sides plus certificates on infeasibility.
    `band` is the early-exit interval in *standard* objective terms (callers
    entering through `solve` have it derived from SolverOptions.band).
    """
    nvar = len(b)
    b = np.asarray(b, dtype=float)
    blocks = [
        _Block(n, C, *data, nvar=nvar)
        for n, C, data in zip(block_dims, Cs, blocks_data)
    ]
    Ntot = sum(block_dims)
    norm_b = float(np.linalg.norm(b))
    norm_C = math.sqrt(sum(float(np.sum(bl.C * bl.C)) for bl in blocks))

    Xs = [np.eye(bl.n) for bl in blocks]
    Ss = [np.eye(bl.n) for bl in blocks]
    y = np.zeros(nvar)
    tau, kappa = 1.0, 1.0

    def A_apply(Ms: Sequence[np.ndarray]) -> np.ndarray:
        out = np.zeros(nvar)
        for bl, M in zip(blocks, Ms):
            out += bl.apply(M)
        return out

    def inner_C(Ms: Sequence[np.ndarray]) -> float:
        return sum(float(np.sum(bl.C * M)) for bl, M in zip(blocks, Ms))

    best = None
    best_merit = np.inf
    best_it = 0
    best_ray = np.inf
    ray_it = 0
    stalls = 0
    recoveries = 0
    pres0 = dres0 = None
    it = 0
    res = Residuals(np.inf, np.inf, np.inf)

    for it in range(1, options.max_iter + 1):
        # residuals of the embedding
        rp = A_apply(Xs) - b * tau
        Rd = [
            -bl.adjoint(y) + bl.C * tau - S for bl, S in zip(blocks, Ss)
        ]
        cx = inner_C(Xs)
        by = float(b @ y)
        rg = by - cx - kappa
        xs_dot = sum(float(np.sum(X * S)) for X, S in zip(Xs, Ss))
        mu = (xs_dot + tau * kappa) / (Ntot + 1)

        # convergence of the de-homogenized iterate
        pobj = cx / tau
        dobj = by / tau
        pres = float(np.linalg.norm(rp / tau)) / (1 + norm_b)
        dres = math.sqrt(
            sum(float(np.sum((R / tau) ** 2)) for R in Rd)
        ) / (1 + norm_C)
        gap = (xs_dot / tau**2) / (1 + abs(pobj) + abs(dobj))
        res = Residuals(pres, dres, gap)
        merit = max(
            pres / options.tol_feas, dres / options.tol_feas, gap / options.tol_gap
        )
        if merit < best_merit:
            best_merit = merit
            best_it = it
            best = (
                [X.copy() for X in Xs],
                y.copy(),
                [S.copy() for S in Ss],
                tau,
                res,
                pobj,
                dobj,
            )
        if pres <= options.tol_feas and dres <= options.tol_feas and gap <= options.tol_gap:
            return StandardResult(
                Status.OPTIMAL,
                [X / tau for X in Xs],
                y / tau,
                [S / tau for S in Ss],
                pobj,
                dobj,
                res,
                it,
            )
        if band is not None and it >= 2:
            # the optimum sits in [dobj - err, pobj + err]: complementarity
            # gap plus first-order corrections for the remaining primal and
            # dual infeasibility (x4 slack for the higher-order part); once
            # that bracket clears the band the sign question is settled
            norm_X = math.sqrt(sum(float(np.sum(X * X)) for X in Xs)) / tau
            norm_y = float(np.linalg.norm(y)) / tau
            err = 4.0 * (
                xs_dot / tau**2
                + pres * (1 + norm_b) * norm_y
                + dres * (1 + norm_C) * norm_X
            )
            if pobj + err < band[0] or dobj - err > band[1]:
                return StandardResult(
                    Status.SEPARATED,
                    [X / tau for X in Xs],
                    y / tau,
                    [S / tau for S in Ss],
                    pobj,
                    dobj,
                    res,
                    it,
                )

        # ray tests: an infeasibility certificate does not depend on tau
        rayq = np.inf
        if by > 0:
            ray_res = math.sqrt(
                sum(float(np.sum((bl.adjoint(y) + S) ** 2)) for bl, S in zip(blocks, Ss))
            )
            if ray_res * (1 + norm_C) <= 1e-2 * options.tol_feas * by * (1 + norm_b):
                return StandardResult(
                    Status.INFEASIBLE, None, None, None, None, None, res, it,
                    ray_y=y / by,
                )
            rayq = ray_res / by
        if cx < 0:
            ray_res = float(np.linalg.norm(A_apply(Xs)))
            if ray_res * (1 + norm_b) <= 1e-2 * options.tol_feas * (-cx) * (1 + norm_C):
                return StandardResult(
                    Status.UNBOUNDED, None, None, None, None, None, res, it,
                    ray_Xs=[X / (-cx) for X in Xs],
                )
            rayq = min(rayq, ray_res / (-cx))
        if rayq < 0.5 * best_ray:
            # a candidate infeasibility certificate is still sharpening
            best_ray = rayq
            ray_it = it

        # conditioning of the Newton system eventually floors the achievable
        # accuracy; once neither the iterate nor a ray has improved for a
        # while, stop grinding
        if best is not None and it - best_it >= 8 and it - ray_it >= 8:
            break

        # Nesterov-Todd scaling per block
        Gs, Ginvs, Ws, lams, Lxs = [], [], [], [], []
        failed = False
        for X, S in zip(Xs, Ss):
            Lx = _chol_jittered(X)
            Ls = _chol_jittered(S)
            if Lx is None or Ls is None:
                failed = True
                break
            U, lam, Vt = np.linalg.svd(Ls.T @ Lx)
            lam = np.maximum(lam, 1e-300)
            G = (Lx @ Vt.T) / np.sqrt(lam)
            Ginv = (np.sqrt(lam)[:, None] * Vt) @ sla.solve_triangular(
                Lx, np.eye(Lx.shape[0]), lower=True
            )
            Gs.append(G)
            Ginvs.append(Ginv)
            Ws.append(G @ G.T)
            lams.append(lam)
            Lxs.append(Lx)
        if failed:
            break

        # Schur complement and shared vectors
        M = np.zeros((nvar, nvar))
        for bl, W in zip(blocks, Ws):
            bl.schur(W, M)
        WCW = [W @ bl.C @ W for bl, W in zip(blocks, Ws)]
        w_vec = A_apply(WCW)
        v_vec = b - w_vec

        cho = None
        scaleM = max(1.0, float(np.max(np.abs(np.diag(M)))))
        for reg in (0.0, 1e-14, 1e-12, 1e-10, 1e-8):
            try:
                cho = sla.cho_factor(M + reg * scaleM * np.eye(nvar), lower=True)
                break
            except np.linalg.LinAlgError:
                continue
        if cho is None:
            break

        WRdW = [W @ R @ W for W, R in zip(Ws, Rd)]
        AWRdW = A_apply(WRdW)
        cWRd = sum(float(np.sum(T * R)) for T, R in zip(WCW, Rd))

        def msolve(rhs: np.ndarray) -> np.ndarray:
            # two refinement passes against the unregularized M recover the
            # digits the factorization loses once cond(M) ~ 1/mu^2
            t = sla.cho_solve(cho, rhs)
            for _ in range(2):
                t = t + sla.cho_solve(cho, rhs - M @ t)
            return t

        # stable form of the dtau denominator delta + v^T M^{-1} u:
        # kappa/tau + b^T M^{-1} b + <r, WrW> with r = C - A^T(M^{-1}w),
        # a sum of nonnegative terms (the naive form cancels catastrophically)
        g_w = msolve(w_vec)
        t_b = msolve(b)
        t2 = t_b + g_w
        pos = 0.0
        for bl, G in zip(blocks, Gs):
            rmat = bl.C - bl.adjoint(g_w)
            pos += float(np.sum((G.T @ rmat @ G) ** 2))
        denom = kappa / tau + max(0.0, float(b @ t_b)) + pos
        if not np.isfinite(denom) or denom <= 0:
            break

        def direction(eta: float, sigma: float, corr, corr_tk: float):
            if corr is None:
                R2 = [-X for X in Xs]
            else:
                R2 = []
                for G, lam, P in zip(Gs, lams, corr):
                    D = -np.diag(lam**2) + sigma * mu * np.eye(len(lam)) - P
                    K = 2.0 / np.add.outer(lam, lam)
                    R2.append(G @ (D * K) @ G.T)
            r1 = -eta * rp - A_apply(R2) + eta * AWRdW
            r2 = (
                -eta * rg
                + inner_C(R2)
                - eta * cWRd
                + (sigma * mu - tau * kappa - corr_tk) / tau
            )
            t1 = msolve(r1)
            dtau = (r2 - float(v_vec @ t1)) / denom
            dy = t1 + t2 * dtau
            dSs = [
                -bl.adjoint(dy) + bl.C * dtau + eta * R
                for bl, R in zip(blocks, Rd)
            ]
            dXs = [
                R2b - W @ dS @ W for R2b, W, dS in zip(R2, Ws, dSs)
            ]
            dXs = [(D + D.T) / 2 for D in dXs]
            dSs = [(D + D.T) / 2 for D in dSs]
            dkappa = (sigma * mu - tau * kappa - corr_tk - kappa * dtau) / tau
            return dXs, dy, dSs, dtau, dkappa

        def step_bound(dXs, dSs, dtau, dkappa) -> float:
            a = np.inf
            for X, S, dX, dS, Lx in zip(Xs, Ss, dXs, dSs, Lxs):
                a = min(a, _max_step(Lx, dX))
                Ls = _chol_jittered(S)
                if Ls is None:
                    return 0.0
                a = min(a, _max_step(Ls, dS))
            if dtau < 0:
                a = min(a, -tau / dtau)
            if dkappa < 0:
                a = min(a, -kappa / dkappa)
            return a

        # Complementarity can outrun feasibility near the end; further
        # centering steps then only grind mu down and wreck the Schur
        # conditioning.  A recovery step (eta=1, sigma=0.9) re-targets
        # feasibility while nearly holding complementarity.  sigma=1 exactly
        # would ride the embedding's tau-scaling null direction.
        if pres0 is None:
            pres0 = max(pres, 1e-300)
            dres0 = max(dres, 1e-300)
        theta = max(pres / pres0, dres / dres0)
        lagging = pres > options.tol_feas or dres > options.tol_feas
        if lagging and recoveries < 8 and mu < 3e-2 * theta:
            recoveries += 1
            zero_corr = [np.zeros((len(lam), len(lam))) for lam in lams]
            dX, dy, dS, dtau, dkappa = direction(1.0, 0.9, zero_corr, 0.0)
            amax = step_bound(dX, dS, dtau, dkappa)
            alpha = min(1.0, options.step_frac * amax)
            if not np.isfinite(alpha) or alpha <= 1e-10:
                break  # no recovery possible: numerical floor reached
            Xs = [(X + alpha * D) for X, D in zip(Xs, dX)]
            Ss = [(S + alpha * D) for S, D in zip(Ss, dS)]
            Xs = [(X + X.T) / 2 for X in Xs]
            Ss = [(S + S.T) / 2 for S in Ss]
            y = y + alpha * dy
            tau += alpha * dtau
            kappa += alpha * dkappa
            if not np.isfinite(tau) or tau <= 0 or kappa < 0:
                break
            continue

        # predictor
        dXa, dya, dSa, dtaua, dkappaa = direction(1.0, 0.0, None, 0.0)
        amax = step_bound(dXa, dSa, dtaua, dkappaa)
        a_aff = min(1.0, options.step_frac * amax)
        mu_aff = (
            sum(
                float(np.sum((X + a_aff * dX) * (S + a_aff * dS)))
                for X, S, dX, dS in zip(Xs, Ss, dXa, dSa)
            )
            + (tau + a_aff * dtaua) * (kappa + a_aff * dkappaa)
        ) / (Ntot + 1)
        sigma = min(0.99999, max(1e-8, (max(mu_aff, 0.0) / mu) ** 3))

        # corrector
        corr = []
        for G, Ginv, dX, dS in zip(Gs, Ginvs, dXa, dSa):
            dxh = Ginv @ dX @ Ginv.T
            dsh = G.T @ dS @ G
            corr.append((dxh @ dsh + dsh @ dxh) / 2)
        corr_tk = dtaua * dkappaa
        dX, dy, dS, dtau, dkappa = direction(1.0 - sigma, sigma, corr, corr_tk)
        amax = step_bound(dX, dS, dtau, dkappa)
        alpha = min(1.0, options.step_frac * amax)
        if not np.isfinite(alpha) or alpha <= 1e-10:
            stalls += 1
            if stalls >= 3:
                break
            alpha = min(1.0, 0.5 * amax) if np.isfinite(amax) and amax > 0 else 0.0
            if alpha <= 0:
                break
        else:
            stalls = 0

        Xs = [(X + alpha * D) for X, D in zip(Xs, dX)]
        Ss = [(S + alpha * D) for S, D in zip(Ss, dS)]
        Xs = [(X + X.T) / 2 for X in Xs]
        Ss = [(S + S.T) / 2 for S in Ss]
        y = y + alpha * dy
        tau += alpha * dtau
        kappa += alpha * dkappa
        if not np.isfinite(tau) or tau <= 0 or kappa < 0:
            break

    status = Status.MAX_ITER if it >= options.max_iter else Status.NUMERICAL
    if best is not None:
        Xs, y, Ss, tau, bres, pobj, dobj = best
        # An iterate within a small factor of the tolerances is the
        # formulation's numerical floor, not a solver failure; residuals are
        # reported so the caller can judge.
        if best_merit <= 10.0:
            status = Status.OPTIMAL
        return StandardResult(
            status,
            [X / tau for X in Xs],
            y / tau,
            [S / tau for S in Ss],
            pobj,
            dobj,
            bres,
            it,
        )
    return StandardResult(status, None, None, None, None, None, res, it)


# -- inequality-form surface ------------------------------------------------


def _standard_data(prog: ConicProgram):
    """Cast the inequality form to standard data: A = -F, b = -f, C = F0."""
    blocks = prog.all_blocks()
    dims = [bl.size for bl in blocks]
    Cs = [bl.constant for bl in blocks]
    data = [(bl.var_idx, bl.rows, bl.cols, -bl.vals) for bl in blocks]
    return dims, Cs, data, -prog.objective, blocks


def solve(prog: ConicProgram, options: SolverOptions = SolverOptions()) -> Solution:
    """Solve an inequality-form program; w comes back in `x`.

    Status mapping from the embedding: a primal-infeasibility ray of the
    standard form is an improving ray for this problem (Unbounded); a
    dual-infeasibility ray is a Farkas certificate that no w satisfies the
    pencils (Infeasible).
    """
    dims, Cs, data, b, blocks = _standard_data(prog)
    band = None
    if options.band is not None:
        # standard objective = -(inequality objective): flip and swap
        lo, hi = options.band
        band = (-hi, -lo)
    r = solve_standard(dims, Cs, data, b, options, band=band)
    if r.status is Status.OPTIMAL:
        w = r.y
        return Solution(
            status=Status.OPTIMAL,
            x=w,
            objective=float(prog.objective @ w),
            duals=r.Xs,
            slacks=r.Ss,
            residuals=r.residuals,
            iterations=r.iterations,
        )
    if r.status is Status.INFEASIBLE:
        # standard-primal infeasible => improving ray here => unbounded
        return Solution(
            Status.UNBOUNDED, None, None, None, None, r.residuals, r.iterations,
            certificate={"ray_w": r.ray_y},
        )
    if r.status is Status.UNBOUNDED:
        # standard-dual infeasible => Farkas multipliers => infeasible here
        return Solution(
            Status.INFEASIBLE, None, None, None, None, r.residuals, r.iterations,
            certificate={"farkas_blocks": r.ray_Xs},
        )
    w = r.y if r.y is not None else None
    return Solution(
        r.status,
        w,
        float(prog.objective @ w) if w is not None else None,
        r.Xs,
        r.Ss,
        r.residuals,
        r.iterations,
    )


def kkt_residuals(prog: ConicProgram, sol: Solution) -> dict[str, float]:
    """Independent KKT check of an Optimal solution (floating point).

    Reports worst primal eigenvalue violation, stationarity residual of the
    multipliers, complementarity gap, all relative to data scale.
    """
    if sol.status is not Status.OPTIMAL or sol.x is None or sol.duals is None:
        raise ValueError("KKT check needs an Optimal solution")
    blocks = prog.all_blocks()
    w = sol.x
    scale = 1.0 + float(np.max(np.abs(prog.objective), initial=0.0))
    peig = 0.0
    stat = -prog.objective.astype(float).copy()
    gap = 0.0
    dobj = 0.0
    for bl, Xb in zip(blocks, sol.duals):
        V = bl.value(w)
        lam = float(np.linalg.eigvalsh((V + V.T) / 2)[0])
        peig = min(peig, lam)
        scale = max(scale, float(np.max(np.abs(V))))
        np.add.at(
            stat,
            bl.var_idx,
            bl.vals * Xb[bl.rows, bl.cols],
        )
        gap += float(np.sum(V * Xb))
        dobj += float(np.sum(bl.constant * Xb))
        dual_eig = float(np.linalg.eigvalsh((Xb + Xb.T) / 2)[0])
        peig = min(peig, dual_eig)
    pobj = float(prog.objective @ w)
    return {
        "primal_eig": -peig / scale,
        "stationarity": float(np.max(np.abs(stat))) / scale,
        # complementarity in the customary benchmark normalization
        "comp_gap": abs(gap) / (1.0 + abs(pobj) + abs(dobj)),
    }


# -- lifted-LMI helpers ------------------------------------------------------


@dataclass
class FeasibilityResult:
    verdict: str  # "In" | "Out" | "Indeterminate"
    t_star: float | None
    solution: Solution


class FeasibilityOracle:
    """Reusable membership tester for one lifted LMI.

    Builds the float program template once; each query folds the pinned
    coordinates of x into the constants and solves
        max t  s.t.  every pencil - t*I >= 0,  t <= 1.
    """

    def __init__(self, lmi: LiftedLMI, options: SolverOptions = SolverOptions()):
        self.lmi = lmi
        # a verdict needs the sign of t* against the dead zone, not t* to
        # working precision; the band lets deep points exit in a few steps
        # (objective is -t, so the t-band flips)
        self.options = replace(options, band=(EPS_FEAS, EPS_STRICT))
        free = lmi.free_keys()
        self.col: dict[VarKey, int] = {k: i for i, k in enumerate(free)}
        self.t_col = len(free)
        self.nvar = len(free) + 1
        self.templates = []
        blocks = []
        for p in lmi.pencils:
            coeff_mats = []
            pinned = []
            for key, mat in p.coeffs.items():
                fm = mat.astype(float)
                if key[0] == "y" and key[1] in lmi.pins:
                    pinned.append((key[1], fm))
                else:
                    coeff_mats.append((self.col[key], fm))
            coeff_mats.append((self.t_col, -np.eye(p.size)))
            block = PencilBlock.from_matrices(
                p.constant.astype(float), coeff_mats, p.size
            )
            blocks.append(block)
            self.templates.append((p.constant.astype(float), pinned, block))
        blocks.append(
            PencilBlock(
                1, np.array([[1.0]]), np.array([self.t_col]),
                np.zeros(1, np.intp), np.zeros(1, np.intp), -np.ones(1),
            )
        )
        self.objective = np.zeros(self.nvar)
        self.objective[self.t_col] = -1.0  # maximize t
        labels = [f"{k[0]}{k[1]}" for k in free] + ["t"]
        self._prog = ConicProgram(self.nvar, self.objective, blocks, labels)

    def query(self, x: Sequence[float]) -> FeasibilityResult:
        xf = [float(v) for v in x]
        for constant, pinned, block in self.templates:
            c = constant.copy()
            for exp, mat in pinned:
                # pinned exponents are unit vectors; value is the coordinate
                deg = sum(exp)
                c += mat * (xf[exp.index(1)] if deg else 1.0)
            block.constant = c
        sol = solve(self._prog, self.options)
        if sol.status in (Status.OPTIMAL, Status.SEPARATED):
            # SEPARATED leaves t approximate, but provably on the same side
            # of the dead zone as t*, which is all the thresholds read
            t_star = float(sol.x[self.t_col])
            if t_star >= -EPS_FEAS:
                verdict = "In"
            elif t_star < -EPS_STRICT:
                verdict = "Out"
            else:
                verdict = "Indeterminate"
            return FeasibilityResult(verdict, t_star, sol)
        if sol.status is Status.INFEASIBLE:
            # cannot happen for a well-formed lifting (t can always drop),
            # but map it to Out with no margin rather than crash
            return FeasibilityResult("Out", None, sol)
        if sol.x is not None:
            # the max-t supremum need not be attained (lifting variables can
            # blow up as t approaches it), leaving the gap floored; the best
            # iterate still brackets t* within [t - O(dres), t + gap + O(pres)],
            # so the sign can be trusted when the bracket is narrow
            res = sol.residuals
            t_val = float(sol.x[self.t_col])
            if max(res.primal, res.dual) <= 1e-6 and res.gap <= 1e-6:
                if t_val - 10 * res.dual >= -EPS_FEAS:
                    return FeasibilityResult("In", t_val, sol)
                if t_val + res.gap + 10 * res.primal < -EPS_STRICT:
                    return FeasibilityResult("Out", t_val, sol)
            return FeasibilityResult("Indeterminate", t_val, sol)
        return FeasibilityResult("Indeterminate", None, sol)

    def witness(self, x: Sequence[float]) -> float:
        """Smallest pencil eigenvalue at the canonical lifting of x.

        The canonical lifting is a feasible assignment, so the return value
        is a certified lower bound on the query optimum t*; a nonnegative
        value settles In without a solve.  -inf at a denominator zero.
        """
        try:
            vals = canonical_lifting(self.lmi, [float(v) for v in x])
        except ZeroDivisionError:
            return -math.inf
        worst = math.inf
        for p in self.lmi.pencils:
            m = p.eval(vals)
            worst = min(worst, float(np.linalg.eigvalsh(m)[0]))
        return worst


def feasibility(
    lmi: LiftedLMI, x: Sequence[float], options: SolverOptions = SolverOptions()
) -> FeasibilityResult:
    """One-shot lifted membership test at x; see FeasibilityOracle."""
    return FeasibilityOracle(lmi, options).query(x)


def optimize_linear(
    lmi: LiftedLMI,
    c: Sequence[float],
    options: SolverOptions = SolverOptions(),
    sense: str = "min",
) -> Solution:
    """Optimize c^T x over the lifted set (coordinates are the pinned y's).

    Decision variables are every indexed y (except y_0, folded into the
    constants) and every z.  Returns the Solution of the inequality-form
    program; the optimizing point is read off the coordinate slots by the
    caller (see `coordinate_values`).
    """
    if len(c) != lmi.nvars:
        raise ValueError("objective dimension mismatch")
    sgn = 1.0 if sense == "min" else -1.0
    zero = (0,) * lmi.nvars
    keys: list[VarKey] = [("y", e) for e in lmi.y_index if e != zero]
    keys += [("z", e) for e in lmi.z_index]
    col = {k: i for i, k in enumerate(keys)}
    blocks = []
    for p in lmi.pencils:
        coeff_mats = [
            (col[key], mat.astype(float)) for key, mat in p.coeffs.items()
        ]
        blocks.append(
            PencilBlock.from_matrices(p.constant.astype(float), coeff_mats, p.size)
        )
    obj = np.zeros(len(keys))
    for i in range(lmi.nvars):
        e = [0] * lmi.nvars
        e[i] = 1
        key = ("y", tuple(e))
        if key in col:
            obj[col[key]] = sgn * float(c[i])
    prog = ConicProgram(len(keys), obj, blocks, [f"{k}" for k in keys])
    sol = solve(prog, options)
    if sol.status is Status.OPTIMAL and sense == "max":
        sol.objective = -sol.objective
    return sol


def coordinate_values(lmi: LiftedLMI, sol: Solution) -> np.ndarray:
    """Read the point coordinates out of an optimize_linear solution."""
    zero = (0,) * lmi.nvars
    keys: list[VarKey] = [("y", e) for e in lmi.y_index if e != zero]
    keys += [("z", e) for e in lmi.z_index]
    col = {k: i for i, k in enumerate(keys)}
    out = np.zeros(lmi.nvars)
    for i in range(lmi.nvars):
        e = [0] * lmi.nvars
        e[i] = 1
        out[i] = sol.x[col[("y", tuple(e))]]
    return out


# -- planted instances -------------------------------------------------------


def plant_lmi_instance(
    rng: np.random.Generator, nvar: int, block_dims: Sequence[int]
) -> tuple[ConicProgram, np.ndarray, float]:
    """Random inequality-form program with a known optimal point.

    Per block, a random orthogonal frame splits eigenvalues into
    complementary supports for the slack S* and multiplier X*; the
    constants are back-solved so w* is feasible with slack S*, and the
    objective is chosen to make (w*, X*) a KKT pair.  Strong duality then
    pins the optimal value to f^T w*.

    Requires enough total block degrees of freedom for the coefficient
    matrices to be linearly independent (generic position), else the
    Newton systems would be singular.
    """
    dof = sum(n * (n + 1) // 2 for n in block_dims)
    if dof < nvar:
        raise ValueError(
            f"{nvar} variables need total block dof >= {nvar}, got {dof}"
        )
    w_star = rng.standard_normal(nvar)
    coeffs = []
    Ss, Xs = [], []
    for n in block_dims:
        mats = []
        for _ in range(nvar):
            B = rng.standard_normal((n, n))
            mats.append((B + B.T) / 2)
        coeffs.append(mats)
        Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        k = rng.integers(1, n) if n > 1 else 1
        s_eigs = np.zeros(n)
        x_eigs = np.zeros(n)
        s_eigs[:k] = rng.uniform(0.5, 2.0, size=k)
        x_eigs[k:] = rng.uniform(0.5, 2.0, size=n - k)
        Ss.append(Q @ np.diag(s_eigs) @ Q.T)
        Xs.append(Q @ np.diag(x_eigs) @ Q.T)
    blocks = []
    f = np.zeros(nvar)
    for n, mats, S_st, X_st in zip(block_dims, coeffs, Ss, Xs):
        const = S_st - sum(w_star[i] * mats[i] for i in range(nvar))
        blocks.append(
            PencilBlock.from_matrices(const, list(enumerate(mats)), n)
        )
        for i in range(nvar):
            f[i] += float(np.sum(X_st * mats[i]))
    prog = ConicProgram(nvar, f, blocks)
    return prog, w_star, float(f @ w_star)
