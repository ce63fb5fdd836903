"""Empirical verification that a lifted LMI describes its target set.

The theory layer proves containments; this layer samples them.  A direct
oracle evaluates G(x) and the domain polynomials at a point; a lifted
oracle asks the SDP layer whether the pinned pencils admit any lifting.
The two are compared over seeded point clouds, support functions are
probed against a brute-force grid, and boundaries are traced for figure
data.

Verdict accounting is deliberately asymmetric.  The containment
"direct-In implies lifted-In" is unconditional, so any exception is a
construction bug and is recorded separately from ordinary disagreements.
The converse can fail legitimately for truncated liftings: those points
are relaxation slack, not errors, and the report keeps them apart.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .momlift import LiftedLMI
from .polyalg import MatPoly, Poly
from .ratlift import RationalMatFn
from .sdpcore import (
    EPS_FEAS,
    FeasibilityOracle,
    SolverOptions,
    Status,
    optimize_linear,
)

__all__ = [
    "EIG_MARGIN",
    "POLE_EPS",
    "SetProblem",
    "member_direct",
    "member_margin",
    "Disagreement",
    "MembershipReport",
    "compare_membership",
    "SupportRecord",
    "support_compare",
    "boundary_trace",
    "trace_to_csv",
]

# Direct-oracle dead zone: eigenvalues within EIG_MARGIN of zero are
# boundary noise, never evidence of disagreement.
EIG_MARGIN = 1e-6
# A rational G is considered unevaluable when |denominator| drops below this.
POLE_EPS = 1e-6

Box = Sequence[tuple[float, float]]


@dataclass(frozen=True)
class SetProblem:
    """The set S = {x in D : G(x) >= 0} with D = {x : g_k(x) >= 0 for all k}."""

    matrix: MatPoly | RationalMatFn
    domain: tuple[Poly, ...] = ()
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "domain", tuple(self.domain))
        for g in self.domain:
            if g.nvars != self.matrix.nvars:
                raise ValueError("domain polynomial ring mismatch")

    @property
    def nvars(self) -> int:
        return self.matrix.nvars

    @property
    def size(self) -> int:
        return self.matrix.size


def member_margin(
    G: MatPoly | RationalMatFn,
    gs: Sequence[Poly],
    x: Sequence[object],
    eps: float = EIG_MARGIN,
) -> tuple[str, float]:
    """Direct membership verdict plus the margin that produced it.

    The margin is the most violated domain value for DomainViolation, the
    denominator value for PoleNear, and the smallest eigenvalue of G(x)
    otherwise.
    """
    xf = [float(v) for v in x]
    if gs:
        gmin = min(float(g.eval(xf)) for g in gs)
        if gmin < -eps:
            return "DomainViolation", gmin
    if isinstance(G, RationalMatFn):
        den = float(G.denom.eval(xf))
        if abs(den) < POLE_EPS:
            return "PoleNear", den
    mat = np.asarray(G.eval(xf), dtype=float)
    lam = float(np.linalg.eigvalsh(mat)[0])
    if lam >= eps:
        return "In", lam
    if lam <= -eps:
        return "Out", lam
    return "Boundary", lam


def member_direct(
    G: MatPoly | RationalMatFn,
    gs: Sequence[Poly],
    x: Sequence[object],
    eps: float = EIG_MARGIN,
) -> str:
    """In / Out / Boundary / DomainViolation / PoleNear at the point x."""
    return member_margin(G, gs, x, eps)[0]


def _feasible_point(problem: SetProblem, x: Sequence[float]) -> bool:
    """Closed-set membership x in S, no dead zone; poles count as outside."""
    xf = [float(v) for v in x]
    for g in problem.domain:
        if float(g.eval(xf)) < 0.0:
            return False
    G = problem.matrix
    if isinstance(G, RationalMatFn) and abs(float(G.denom.eval(xf))) < POLE_EPS:
        return False
    mat = np.asarray(G.eval(xf), dtype=float)
    return float(np.linalg.eigvalsh(mat)[0]) >= 0.0


# -- membership cross-checks -------------------------------------------------


@dataclass(frozen=True)
class Disagreement:
    point: tuple[float, ...]
    direct: str
    direct_margin: float
    lifted: str
    lifted_margin: float | None

    @property
    def kind(self) -> str:
        """'slack': the lifting overshoots (Out-by-direct, In-by-lifted) --
        expected for truncated hierarchies.  'unsound': the forbidden
        direction (In-by-direct, Out-by-lifted)."""
        return "slack" if self.lifted == "In" else "unsound"


@dataclass(frozen=True)
class MembershipReport:
    samples: int
    agree: int
    disagreements: tuple[Disagreement, ...]
    indeterminate: int
    seed: int
    # direct-In samples whose lifted margin fell below -EPS_FEAS, dead zone
    # included; nonempty means the construction violates S subset of L
    soundness_exceptions: tuple[Disagreement, ...] = ()

    def __post_init__(self) -> None:
        if self.agree + len(self.disagreements) + self.indeterminate != self.samples:
            raise ValueError("agree + disagreements + indeterminate != samples")

    @property
    def slack(self) -> tuple[Disagreement, ...]:
        return tuple(d for d in self.disagreements if d.kind == "slack")

    @property
    def unsound(self) -> tuple[Disagreement, ...]:
        return tuple(d for d in self.disagreements if d.kind == "unsound")

    def summary(self) -> str:
        return (
            f"{self.samples} sampled, {len(self.disagreements)} disagreements, "
            f"{self.indeterminate} indeterminate (seed {self.seed})"
        )

    def to_text(self) -> str:
        lines = [self.summary()]
        for tag, recs in (
            ("slack", self.slack),
            ("unsound", self.unsound),
            ("soundness-exception", self.soundness_exceptions),
        ):
            for d in recs:
                pt = ",".join(f"{v:.9g}" for v in d.point)
                lm = "none" if d.lifted_margin is None else f"{d.lifted_margin:.3e}"
                lines.append(
                    f"{tag}: x=({pt}) direct={d.direct}({d.direct_margin:.3e}) "
                    f"lifted={d.lifted}({lm})"
                )
        return "\n".join(lines)


def _sample_point(
    rng: np.random.Generator, lo: np.ndarray, hi: np.ndarray, den: Poly | None
) -> np.ndarray:
    """Uniform draw in the box; rational problems resample near-pole points."""
    scale = float(max(np.max(hi - lo), 1e-30))
    for _ in range(64):
        x = lo + (hi - lo) * rng.random(len(lo))
        if den is None or abs(float(den.eval(list(x)))) >= 1e-4 * scale:
            return x
    return x  # box hugs the pole set; let the PoleNear verdict speak


def compare_membership(
    problem: SetProblem,
    lmi: LiftedLMI,
    box: Box,
    count: int,
    seed: int,
    eps: float = EIG_MARGIN,
    options: SolverOptions = SolverOptions(),
) -> MembershipReport:
    """Cross-check direct and lifted membership on seeded uniform samples.

    Each sample uses its own substream (seed, i), so the report does not
    depend on evaluation order.  A sample counts as a disagreement only
    when both oracles are outside their dead zones.
    """
    if count < 1:
        raise ValueError("need at least one sample")
    if len(box) != problem.nvars:
        raise ValueError("box dimension mismatch")
    lo = np.array([float(a) for a, _ in box])
    hi = np.array([float(b) for _, b in box])
    if np.any(hi < lo):
        raise ValueError("empty box")
    den = problem.matrix.denom if isinstance(problem.matrix, RationalMatFn) else None
    oracle = FeasibilityOracle(lmi, options)

    agree = 0
    indeterminate = 0
    disagreements: list[Disagreement] = []
    exceptions: list[Disagreement] = []
    for i in range(count):
        rng = np.random.default_rng((seed, i))
        x = _sample_point(rng, lo, hi, den)
        dv, dm = member_margin(problem.matrix, problem.domain, x, eps)
        # the canonical lifting of x is feasible, so a clean eigenvalue
        # there already certifies In (t* >= wit) without a solve
        wit = oracle.witness(x)
        if wit >= -EPS_FEAS:
            lverdict, lmargin = "In", wit
        else:
            lifted = oracle.query(x)
            lverdict, lmargin = lifted.verdict, lifted.t_star
        record = Disagreement(tuple(float(v) for v in x), dv, dm, lverdict, lmargin)
        d_state = {"In": "in", "Out": "out", "DomainViolation": "out"}.get(dv, "dead")
        l_state = {"In": "in", "Out": "out"}.get(lverdict, "dead")
        if d_state == "dead" or l_state == "dead":
            indeterminate += 1
        elif d_state == l_state:
            agree += 1
        else:
            disagreements.append(record)
        if dv == "In" and (lmargin is None or lmargin < -EPS_FEAS):
            exceptions.append(record)
    return MembershipReport(
        samples=count,
        agree=agree,
        disagreements=tuple(disagreements),
        indeterminate=indeterminate,
        seed=seed,
        soundness_exceptions=tuple(exceptions),
    )


# -- support functions --------------------------------------------------------


class _GridEval:
    """Float evaluation of polynomials on flattened grid columns.

    Power arrays are cached across entries; 2x2 matrices get a closed-form
    smallest eigenvalue, larger sizes a stacked eigvalsh.
    """

    def __init__(self, cols: Sequence[np.ndarray]):
        self.cols = [np.asarray(c, dtype=float) for c in cols]
        self._pw: dict[tuple[int, int], np.ndarray] = {}

    def _power(self, i: int, k: int) -> np.ndarray:
        key = (i, k)
        if key not in self._pw:
            self._pw[key] = self.cols[i] ** k
        return self._pw[key]

    def poly(self, p: Poly) -> np.ndarray:
        out = np.zeros_like(self.cols[0])
        for e, c in p.terms.items():
            term = np.full_like(out, float(c))
            for i, k in enumerate(e):
                if k:
                    term = term * self._power(i, k)
            out += term
        return out

    def lambda_min(self, G: MatPoly | RationalMatFn) -> np.ndarray:
        """Smallest eigenvalue of G pointwise; NaN where a denominator dies.

        A negative denominator flips the spectrum, so the rational case
        needs both extreme eigenvalues of the numerator.
        """
        num = G.numerator if isinstance(G, RationalMatFn) else G
        m = num.size
        if m == 2:
            a = self.poly(num.entry(0, 0))
            b = self.poly(num.entry(0, 1))
            c = self.poly(num.entry(1, 1))
            mid = 0.5 * (a + c)
            rad = np.sqrt(0.25 * (a - c) ** 2 + b**2)
            lo, hi = mid - rad, mid + rad
        else:
            stack = np.empty((len(self.cols[0]), m, m))
            for i in range(m):
                for j in range(i, m):
                    v = self.poly(num.entry(i, j))
                    stack[:, i, j] = v
                    stack[:, j, i] = v
            eig = np.linalg.eigvalsh(stack)
            lo, hi = eig[:, 0], eig[:, -1]
        if not isinstance(G, RationalMatFn):
            return lo
        den = self.poly(G.denom)
        bad = np.abs(den) < POLE_EPS
        safe = np.where(bad, 1.0, den)
        lam = np.where(safe > 0, lo / safe, hi / safe)
        return np.where(bad, np.nan, lam)


def _grid_axes(box: Box, step: float) -> list[np.ndarray]:
    axes = []
    for lo, hi in box:
        lo, hi = float(lo), float(hi)
        m = max(1, int(round((hi - lo) / step))) + 1
        axes.append(np.linspace(lo, hi, m))
    return axes


def _classify_chunked(
    problem: SetProblem, flat: np.ndarray, chunk: int = 1 << 21
) -> tuple[np.ndarray, np.ndarray]:
    """(inside, margin) arrays over the rows of flat; NaN margins are outside."""
    inside = np.empty(len(flat), dtype=bool)
    margin = np.empty(len(flat))
    for lo in range(0, len(flat), chunk):
        part = flat[lo : lo + chunk]
        ev = _GridEval([part[:, j] for j in range(part.shape[1])])
        lam = ev.lambda_min(problem.matrix)
        ok = np.nan_to_num(lam, nan=-np.inf) >= 0.0
        for g in problem.domain:
            ok &= ev.poly(g) >= 0.0
        inside[lo : lo + len(part)] = ok
        margin[lo : lo + len(part)] = lam
    return inside, margin


def _polish(
    problem: SetProblem,
    c: np.ndarray,
    x0: np.ndarray,
    box: Box,
    step: float,
    rounds: int = 40,
) -> tuple[float, np.ndarray]:
    """Coordinate descent from the best grid point, halving the step when stuck."""
    lo = np.array([float(a) for a, _ in box])
    hi = np.array([float(b) for _, b in box])
    x = np.array(x0, dtype=float)
    best = float(c @ x)
    h = float(step)
    for _ in range(rounds):
        moved = False
        for j in range(len(x)):
            for s in (h, -h):
                cand = x.copy()
                cand[j] += s
                if np.any(cand < lo) or np.any(cand > hi):
                    continue
                val = float(c @ cand)
                if val >= best:
                    continue
                if _feasible_point(problem, cand):
                    x, best, moved = cand, val, True
        if not moved:
            h *= 0.5
    return best, x


@dataclass(frozen=True)
class SupportRecord:
    direction: tuple[float, ...]
    lifted: float | None
    grid: float | None
    status: str  # "ok" | "Unbounded" | "Infeasible" | "Numerical"

    @property
    def gap(self) -> float | None:
        """Signed lifted - grid; negative means the lifting reaches further."""
        if self.lifted is None or self.grid is None:
            return None
        return self.lifted - self.grid


def support_compare(
    problem: SetProblem,
    lmi: LiftedLMI,
    directions: Iterable[Sequence[float]],
    box: Box,
    step: float = 1e-3,
    options: SolverOptions = SolverOptions(),
) -> list[SupportRecord]:
    """min c.x over the lifted set vs. a polished grid oracle, per direction.

    The caller asserts S is contained in the box; the feasibility mask is
    built once and reused across directions.  Expected gap for an exact
    representation: within [-(grid error), +1e-6].
    """
    pts: np.ndarray | None = None
    out: list[SupportRecord] = []
    for direction in directions:
        c = np.array([float(v) for v in direction])
        if len(c) != problem.nvars:
            raise ValueError("direction dimension mismatch")
        sol = optimize_linear(lmi, c, options)
        if sol.status is not Status.OPTIMAL:
            tag = {Status.UNBOUNDED: "Unbounded", Status.INFEASIBLE: "Infeasible"}.get(
                sol.status, "Numerical"
            )
            out.append(SupportRecord(tuple(c), None, None, tag))
            continue
        if pts is None:
            axes = _grid_axes(box, step)
            mesh = np.meshgrid(*axes, indexing="ij")
            flat = np.stack([m.ravel() for m in mesh], axis=1)
            inside, _ = _classify_chunked(problem, flat)
            pts = flat[inside]
        if len(pts) == 0:
            out.append(SupportRecord(tuple(c), float(sol.objective), None, "ok"))
            continue
        vals = pts @ c
        x0 = pts[int(np.argmin(vals))]
        gmin, _ = _polish(problem, c, x0, box, step)
        out.append(SupportRecord(tuple(c), float(sol.objective), gmin, "ok"))
    return out


# -- boundary tracing ----------------------------------------------------------


def _bisect_edge(
    feasible: Callable[[np.ndarray], bool], a: np.ndarray, b: np.ndarray, depth: int = 10
) -> np.ndarray:
    """Shrink [a, b] with a inside and b outside to width |b - a| / 2**depth."""
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    for _ in range(depth):
        mid = 0.5 * (a + b)
        if feasible(mid):
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def boundary_trace(
    problem: SetProblem | LiftedLMI,
    box: Box,
    resolution: int | Sequence[int],
    options: SolverOptions = SolverOptions(),
) -> list[tuple[tuple[float, ...], str, float]]:
    """Grid points classified In, plus bisected boundary crossings.

    Rows are (point, "In" | "Boundary", margin) in deterministic order:
    In points in row-major grid order, then crossings ordered by axis and
    grid index.  Crossings are refined to width (grid step)/2**10.  Only
    n in {2, 3} is supported; figure data is the purpose.
    """
    lifted = isinstance(problem, LiftedLMI)
    n = problem.nvars
    if n not in (2, 3):
        raise ValueError("boundary tracing works in 2 or 3 variables only")
    res = [int(resolution)] * n if isinstance(resolution, int) else [int(r) for r in resolution]
    if len(res) != n or any(r < 2 for r in res):
        raise ValueError("resolution needs at least two points per axis")
    axes = [np.linspace(float(lo), float(hi), r) for (lo, hi), r in zip(box, res)]
    mesh = np.meshgrid(*axes, indexing="ij")
    flat = np.stack([m.ravel() for m in mesh], axis=1)

    if lifted:
        oracle = FeasibilityOracle(problem, options)

        def lifted_bound(pt: np.ndarray) -> float:
            # canonical-witness first: a clean eigenvalue there settles In
            # without a solve; margins are lower bounds on t* either way
            wit = oracle.witness(pt)
            if wit >= -EPS_FEAS:
                return wit
            t = oracle.query(pt).t_star
            return float(t) if t is not None else -np.inf

        margins = np.array([lifted_bound(pt) for pt in flat])
        inside = margins >= -EPS_FEAS

        def feasible(pt: np.ndarray) -> bool:
            return lifted_bound(pt) >= -EPS_FEAS

        def margin_at(pt: np.ndarray) -> float:
            return lifted_bound(pt)

    else:
        inside, margins = _classify_chunked(problem, flat)

        def feasible(pt: np.ndarray) -> bool:
            return _feasible_point(problem, pt)

        def margin_at(pt: np.ndarray) -> float:
            return member_margin(problem.matrix, problem.domain, pt, eps=0.0)[1]

    shape = tuple(res)
    inside_nd = inside.reshape(shape)
    margins_nd = margins.reshape(shape)
    coords_nd = [m.reshape(shape) for m in mesh]

    rows: list[tuple[tuple[float, ...], str, float]] = []
    for idx in np.ndindex(*shape):
        if inside_nd[idx]:
            pt = tuple(float(c[idx]) for c in coords_nd)
            rows.append((pt, "In", float(margins_nd[idx])))

    def point_at(idx: tuple[int, ...]) -> np.ndarray:
        return np.array([axes[j][idx[j]] for j in range(n)])

    for axis in range(n):
        for idx in np.ndindex(*shape):
            if idx[axis] + 1 >= shape[axis]:
                continue
            jdx = tuple(v + 1 if j == axis else v for j, v in enumerate(idx))
            if inside_nd[idx] == inside_nd[jdx]:
                continue
            a, b = (idx, jdx) if inside_nd[idx] else (jdx, idx)
            mid = _bisect_edge(feasible, point_at(a), point_at(b))
            rows.append((tuple(float(v) for v in mid), "Boundary", margin_at(mid)))
    return rows


def trace_to_csv(rows: Sequence[tuple[tuple[float, ...], str, float]]) -> str:
    """Comma-separated cloud: coordinates, classification, margin."""
    n = len(rows[0][0]) if rows else 0
    header = ",".join([f"x{i + 1}" for i in range(n)] + ["class", "margin"])
    lines = [header]
    for pt, cls, margin in rows:
        lines.append(",".join([f"{v:.12g}" for v in pt] + [cls, f"{margin:.6e}"]))
    return "\n".join(lines) + "\n"
