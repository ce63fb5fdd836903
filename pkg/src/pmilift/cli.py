"""Command-line front end: problem files, liftings, certificates, checks.

A problem file is a JSON object describing a symmetric matrix G (polynomial
or rational) and the set S = {x in D : G(x) >= 0}:

    {
      "n": 2,                  number of variables
      "m": 2,                  matrix size
      "numerator": [           G = sum of x^exp * mat
        {"exp": [0, 0], "mat": [["7", "5"], ["5", "11"]]},
        ...
      ],
      "denominator": [{"exp": [1, 1], "coef": 1}],     optional, default 1
      "q": [...],              optional second multiplier (same encoding as
                               denominator); defaults to denominator^2
      "domain": [ [...], ... ] optional list of polynomials g_k >= 0
      "metadata": {"name": "...", "notes": "..."}
    }

Rational entries parse as integers, decimal strings ("0.25"), or "p/q"
strings.  Subcommands: lift, certify, member, verify, optimize, trace.

Output discipline: the data artifact (lifting, certificate, report, point
cloud) goes to --out when given, otherwise to stdout; human summary lines
then move to stderr so pipes stay clean.  Verdict lines of `member`,
`verify` and `optimize` are the data and always print to stdout.

Exit codes: 0 ok, 1 certificate infeasible, 2 parse error, 3 construction
error, 4 numerical/unverified, 5 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .certify import (
    Certificate,
    pointwise_sos_concavity,
    qmod_certificate_search,
    uniform_sos_concavity,
)
from .harness import (
    SetProblem,
    boundary_trace,
    compare_membership,
    member_margin,
    support_compare,
    trace_to_csv,
)
from .momlift import LiftedLMI, moment_lift, putinar_lift
from .polyalg import MatPoly, Poly, frac_matrix
from .ratlift import IndexEscape, RationalMatFn, qmod_lift
from .sdpcore import EPS_FEAS, FeasibilityOracle, SolverOptions

__all__ = ["ProblemFile", "CliError", "load_problem", "build_lifting", "main", "entry"]


class CliError(Exception):
    """Failure with a contracted exit code; message goes to stderr."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


PARSE, CONSTRUCTION, NUMERICAL, VERIFY_FAIL = 2, 3, 4, 5


def _as_frac(v: object, path: str) -> Fraction:
    if isinstance(v, bool):
        raise CliError(PARSE, f"{path}: booleans are not rationals")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        # read the decimal the author typed, not its binary image
        return Fraction(str(v))
    if isinstance(v, str):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError):
            raise CliError(PARSE, f"{path}: cannot parse rational {v!r}") from None
    raise CliError(PARSE, f"{path}: expected a rational, got {type(v).__name__}")


def _exp_tuple(obj: object, n: int, path: str) -> tuple[int, ...]:
    if not isinstance(obj, (list, tuple)):
        raise CliError(PARSE, f"{path}: exponent must be a list")
    if len(obj) != n:
        raise CliError(PARSE, f"{path}: exponent has length {len(obj)}, expected {n}")
    out = []
    for i, v in enumerate(obj):
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise CliError(PARSE, f"{path}[{i}]: exponents are nonnegative integers")
        out.append(v)
    return tuple(out)


def _poly_from_obj(obj: object, n: int, path: str) -> Poly:
    if not isinstance(obj, list):
        raise CliError(PARSE, f"{path}: a polynomial is a list of terms")
    terms: dict[tuple[int, ...], Fraction] = {}
    for k, item in enumerate(obj):
        tp = f"{path}[{k}]"
        if not isinstance(item, dict) or "exp" not in item or "coef" not in item:
            raise CliError(PARSE, f"{tp}: each term needs 'exp' and 'coef'")
        e = _exp_tuple(item["exp"], n, f"{tp}.exp")
        terms[e] = terms.get(e, Fraction(0)) + _as_frac(item["coef"], f"{tp}.coef")
    return Poly(n, terms)


@dataclass(frozen=True)
class ProblemFile:
    """Parsed problem: the matrix (with q attached when rational), domain,
    and free-form metadata."""

    matrix: MatPoly | RationalMatFn
    domain: tuple[Poly, ...]
    metadata: dict
    name: str

    @property
    def nvars(self) -> int:
        return self.matrix.nvars

    @property
    def size(self) -> int:
        return self.matrix.size

    def set_problem(self) -> SetProblem:
        return SetProblem(self.matrix, self.domain, self.name)

    @classmethod
    def from_obj(cls, obj: object) -> "ProblemFile":
        if not isinstance(obj, dict):
            raise CliError(PARSE, "problem file must be a JSON object")
        for fieldname in ("n", "m", "numerator"):
            if fieldname not in obj:
                raise CliError(PARSE, f"missing field {fieldname!r}")
        n, m = obj["n"], obj["m"]
        for label, v in (("n", n), ("m", m)):
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise CliError(PARSE, f"{label} must be a positive integer")

        if not isinstance(obj["numerator"], list) or not obj["numerator"]:
            raise CliError(PARSE, "numerator: need a nonempty list of terms")
        terms: dict[tuple[int, ...], np.ndarray] = {}
        for k, item in enumerate(obj["numerator"]):
            path = f"numerator[{k}]"
            if not isinstance(item, dict) or "exp" not in item or "mat" not in item:
                raise CliError(PARSE, f"{path}: each term needs 'exp' and 'mat'")
            e = _exp_tuple(item["exp"], n, f"{path}.exp")
            rows = item["mat"]
            if not isinstance(rows, list) or len(rows) != m or any(
                not isinstance(r, list) or len(r) != m for r in rows
            ):
                raise CliError(PARSE, f"{path}.mat: expected an {m}x{m} matrix")
            mat = [
                [_as_frac(rows[i][j], f"{path}.mat[{i}][{j}]") for j in range(m)]
                for i in range(m)
            ]
            for i in range(m):
                for j in range(i + 1, m):
                    if mat[i][j] != mat[j][i]:
                        raise CliError(
                            PARSE,
                            f"{path}.mat[{i}][{j}] != {path}.mat[{j}][{i}]: "
                            "matrix must be symmetric",
                        )
            acc = terms.get(e)
            fm = frac_matrix(mat)
            terms[e] = fm if acc is None else acc + fm
        numerator = MatPoly(n, m, terms)

        den = None
        if obj.get("denominator") is not None:
            den = _poly_from_obj(obj["denominator"], n, "denominator")
            if not den:
                raise CliError(PARSE, "denominator: must be nonzero")
        q = None
        if obj.get("q") is not None:
            q = _poly_from_obj(obj["q"], n, "q")

        domain = []
        if obj.get("domain") is not None:
            if not isinstance(obj["domain"], list):
                raise CliError(PARSE, "domain: expected a list of polynomials")
            domain = [
                _poly_from_obj(g, n, f"domain[{k}]") for k, g in enumerate(obj["domain"])
            ]

        metadata = obj.get("metadata") or {}
        if not isinstance(metadata, dict):
            raise CliError(PARSE, "metadata: expected an object")
        one = Poly(n, {(0,) * n: Fraction(1)})
        if den is not None and den != one:
            matrix: MatPoly | RationalMatFn = RationalMatFn(numerator, den, q)
        else:
            if q is not None:
                raise CliError(PARSE, "q is only meaningful with a denominator")
            matrix = numerator
        return cls(matrix, tuple(domain), metadata, str(metadata.get("name", "")))


def load_problem(path: str) -> ProblemFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(PARSE, f"cannot read {path}: {exc}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(PARSE, f"{path}: {exc}") from None
    return ProblemFile.from_obj(obj)


def build_lifting(
    pf: ProblemFile,
    mode: str = "auto",
    order: int | None = None,
    halfdeg: int | None = None,
) -> LiftedLMI:
    """Dispatch the lifting construction; mode 'auto' picks by problem shape.

    auto: rational matrix -> qmod; polynomial with domain -> putinar;
    plain polynomial -> sos.  Default order/half-degree is ceil(deg/2).
    """
    G = pf.matrix
    rational = isinstance(G, RationalMatFn)
    if mode == "auto":
        mode = "qmod" if rational else ("putinar" if pf.domain else "sos")
    try:
        if mode == "sos":
            if rational:
                raise CliError(CONSTRUCTION, "sos lifting needs a polynomial matrix")
            if pf.domain:
                raise CliError(
                    CONSTRUCTION,
                    "sos lifting takes no domain constraints; use --mode putinar",
                )
            return moment_lift(G)
        if mode == "putinar":
            if rational:
                raise CliError(CONSTRUCTION, "putinar lifting needs a polynomial matrix")
            N = order if order is not None else max(1, (G.degree() + 1) // 2)
            return putinar_lift(G, list(pf.domain), N)
        if mode == "qmod":
            if not rational:
                raise CliError(
                    CONSTRUCTION, "qmod lifting needs a rational matrix (denominator)"
                )
            d = halfdeg if halfdeg is not None else max(1, (G.degree() + 1) // 2)
            return qmod_lift(G, list(pf.domain), d)
    except (IndexEscape, ValueError) as exc:
        raise CliError(CONSTRUCTION, str(exc)) from None
    raise CliError(PARSE, f"unknown mode {mode!r}")


# -- shared option plumbing ----------------------------------------------------


def _solver_options(args: argparse.Namespace) -> SolverOptions:
    return SolverOptions(
        max_iter=args.max_iter, tol_gap=args.tol_gap, tol_feas=args.tol_feas
    )


def _sci(v: float) -> str:
    mant, exp = f"{float(v):.2e}".split("e")
    return f"{mant}e{int(exp)}"


def _emit(text: str, args: argparse.Namespace, summary: Sequence[str]) -> None:
    """Data to --out (summary to stdout) or data to stdout (summary to stderr)."""
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            raise CliError(PARSE, f"cannot write {args.out}: {exc}") from None
        for line in summary:
            print(line)
    else:
        sys.stdout.write(text)
        for line in summary:
            print(line, file=sys.stderr)


def _parse_point(text: str, n: int) -> list[float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != n:
        raise CliError(PARSE, f"point has {len(parts)} coordinates, expected {n}")
    return [float(_as_frac(p, f"x[{i}]")) for i, p in enumerate(parts)]


def _parse_box(text: str, n: int) -> list[tuple[float, float]]:
    ranges = [p.strip() for p in text.split(",")]
    if len(ranges) != n:
        raise CliError(PARSE, f"box has {len(ranges)} ranges, expected {n}")
    out = []
    for i, r in enumerate(ranges):
        lo, sep, hi = r.partition(":")
        if not sep:
            raise CliError(PARSE, f"box[{i}]: expected lo:hi, got {r!r}")
        a = float(_as_frac(lo.strip(), f"box[{i}].lo"))
        b = float(_as_frac(hi.strip(), f"box[{i}].hi"))
        if b < a:
            raise CliError(PARSE, f"box[{i}]: empty range {r!r}")
        out.append((a, b))
    return out


def _lifting_for(args: argparse.Namespace, pf: ProblemFile) -> LiftedLMI:
    if getattr(args, "lifting", None):
        try:
            text = Path(args.lifting).read_text()
            return LiftedLMI.from_json(text)
        except OSError as exc:
            raise CliError(PARSE, f"cannot read {args.lifting}: {exc}") from None
        except (ValueError, KeyError) as exc:
            raise CliError(PARSE, f"{args.lifting}: {exc}") from None
    return build_lifting(pf, args.mode, args.order, args.halfdeg)


def _lifted_verdict(oracle: FeasibilityOracle, x: Sequence[float]):
    """Witness-first lifted membership: (verdict, margin-or-None)."""
    wit = oracle.witness(x)
    if wit >= -EPS_FEAS:
        return "In", wit
    r = oracle.query(x)
    return r.verdict, r.t_star


# -- subcommands ---------------------------------------------------------------


def cmd_lift(args: argparse.Namespace) -> int:
    pf = load_problem(args.file)
    lmi = build_lifting(pf, args.mode, args.order, args.halfdeg)
    _emit(lmi.to_json(), args, [lmi.summary()])
    return 0


def cmd_certify(args: argparse.Namespace) -> int:
    pf = load_problem(args.file)
    opts = _solver_options(args)
    G = pf.matrix
    if args.kind == "uniform-sos-concave":
        if isinstance(G, RationalMatFn):
            raise CliError(
                CONSTRUCTION, "uniform-sos-concave applies to polynomial matrices"
            )
        cert = uniform_sos_concavity(G, options=opts)
    elif args.kind == "pointwise":
        if isinstance(G, RationalMatFn):
            raise CliError(CONSTRUCTION, "pointwise applies to polynomial matrices")
        if not args.xi:
            raise CliError(PARSE, "--xi is required for --kind pointwise")
        parts = [p.strip() for p in args.xi.split(",")]
        if len(parts) != G.size:
            raise CliError(PARSE, f"xi has {len(parts)} entries, expected {G.size}")
        xi = [_as_frac(p, f"xi[{i}]") for i, p in enumerate(parts)]
        try:
            cert = pointwise_sos_concavity(G, xi, options=opts)
        except ValueError as exc:
            raise CliError(PARSE, str(exc)) from None
    elif args.kind == "qmod":
        if not isinstance(G, RationalMatFn):
            raise CliError(CONSTRUCTION, "qmod certificates need a rational matrix")
        if args.tcap is None:
            raise CliError(PARSE, "--tcap is required for --kind qmod")
        try:
            cert = qmod_certificate_search(
                G, list(pf.domain), G.denom, G.q_or_default(), args.tcap, options=opts
            )
        except ValueError as exc:
            raise CliError(CONSTRUCTION, str(exc)) from None
    else:  # pragma: no cover - argparse restricts choices
        raise CliError(PARSE, f"unknown kind {args.kind!r}")

    line = f"{cert.kind}: {cert.status}"
    if cert.degree is not None:
        line += f" (d={cert.degree})"
    if cert.detail:
        line += f" [{cert.detail}]"
    _emit(cert.to_text(), args, [line])
    return {"Feasible": 0, "Infeasible": 1, "InfeasibleByDegree": 1}.get(
        cert.status, NUMERICAL
    )


_DIRECT_STATE = {"In": "in", "Out": "out", "DomainViolation": "out"}
_LIFTED_STATE = {"In": "in", "Out": "out"}


def cmd_member(args: argparse.Namespace) -> int:
    pf = load_problem(args.file)
    x = _parse_point(args.point, pf.nvars)
    dv, dm = member_margin(pf.matrix, pf.domain, x)
    lmi = _lifting_for(args, pf)
    if lmi.nvars != pf.nvars:
        raise CliError(CONSTRUCTION, "lifting and problem have different variables")
    lv, lm = _lifted_verdict(FeasibilityOracle(lmi, _solver_options(args)), x)
    lifted_txt = f"lifted: {lv}" + (f" (margin {_sci(lm)})" if lm is not None else "")
    print(f"direct: {dv} (margin {_sci(dm)})  {lifted_txt}")
    d_state = _DIRECT_STATE.get(dv, "dead")
    l_state = _LIFTED_STATE.get(lv, "dead")
    if "dead" in (d_state, l_state) or d_state == l_state:
        return 0
    print("hard disagreement between direct and lifted membership", file=sys.stderr)
    return VERIFY_FAIL


def cmd_verify(args: argparse.Namespace) -> int:
    pf = load_problem(args.file)
    lmi = _lifting_for(args, pf)
    box = _parse_box(args.box, pf.nvars)
    try:
        report = compare_membership(
            pf.set_problem(), lmi, box, args.count, args.seed,
            options=_solver_options(args),
        )
    except ValueError as exc:
        raise CliError(PARSE, str(exc)) from None
    _emit(report.to_text(), args, [report.summary()])
    if report.soundness_exceptions or report.unsound:
        return VERIFY_FAIL
    if report.slack and not args.slack_ok:
        return VERIFY_FAIL
    return 0


def cmd_optimize(args: argparse.Namespace) -> int:
    pf = load_problem(args.file)
    lmi = _lifting_for(args, pf)
    c = _parse_point(args.c, pf.nvars)
    box = _parse_box(args.box, pf.nvars)
    rec = support_compare(
        pf.set_problem(), lmi, [c], box,
        step=args.grid_step, options=_solver_options(args),
    )[0]
    if rec.status == "Unbounded":
        print("lifted: unbounded below in this direction")
        return 0
    if rec.status != "ok":
        print(f"lifted: {rec.status}")
        return NUMERICAL
    print(
        f"lifted: {rec.lifted:.9g}  grid: {rec.grid:.9g}  gap: {_sci(rec.gap)}"
    )
    if abs(rec.gap) > args.gap_tol:
        print(f"gap exceeds tolerance {args.gap_tol:g}", file=sys.stderr)
        return VERIFY_FAIL
    return 0


def cmd_trace(args: argparse.Namespace) -> int:
    pf = load_problem(args.file)
    box = _parse_box(args.box, pf.nvars)
    parts = args.resolution.lower().split("x")
    try:
        res = [int(p) for p in parts]
    except ValueError:
        raise CliError(PARSE, f"bad resolution {args.resolution!r}") from None
    if len(res) == 1:
        res = res * pf.nvars
    try:
        rows = boundary_trace(pf.set_problem(), box, res)
    except ValueError as exc:
        raise CliError(PARSE, str(exc)) from None
    n_in = sum(1 for _, cls, _ in rows if cls == "In")
    _emit(
        trace_to_csv(rows), args,
        [f"{len(rows)} rows ({n_in} In, {len(rows) - n_in} Boundary)"],
    )
    return 0


# -- parser --------------------------------------------------------------------


def _add_mode_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--mode", choices=["auto", "sos", "putinar", "qmod"], default="auto",
        help="lifting construction (auto: by problem shape)",
    )
    p.add_argument("--order", type=int, default=None, help="putinar relaxation order N")
    p.add_argument("--halfdeg", type=int, default=None, help="qmod half-degree d")
    p.add_argument(
        "--lifting", default=None, metavar="FILE",
        help="reuse a serialized lifting instead of constructing one",
    )


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-gap", type=float, default=1e-8)
    common.add_argument("--tol-feas", type=float, default=1e-8)
    common.add_argument("--max-iter", type=int, default=200)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="write the data artifact here")

    parser = argparse.ArgumentParser(
        prog="pmilift",
        description="Lifted linear matrix inequality representations of "
        "polynomial and rational matrix inequality sets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lift", parents=[common], help="construct and serialize a lifting")
    p.add_argument("file")
    _add_mode_flags(p)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("certify", parents=[common], help="search a concavity/q-module certificate")
    p.add_argument("file")
    p.add_argument(
        "--kind", required=True, choices=["uniform-sos-concave", "pointwise", "qmod"]
    )
    p.add_argument("--xi", default=None, help="direction for --kind pointwise, e.g. 1,1,1")
    p.add_argument("--tcap", type=int, default=None, help="multiplier degree cap for --kind qmod")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("member", parents=[common], help="direct vs lifted membership at a point")
    p.add_argument("file")
    p.add_argument("-x", "--point", required=True, help="comma-separated coordinates")
    _add_mode_flags(p)
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("verify", parents=[common], help="sampled direct-vs-lifted agreement report")
    p.add_argument("file")
    p.add_argument("--box", required=True, help="sampling box lo:hi,lo:hi,...")
    p.add_argument("--count", type=int, default=2000)
    p.add_argument(
        "--slack-ok", action="store_true",
        help="treat lifted-In/direct-Out points as expected relaxation slack",
    )
    _add_mode_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("optimize", parents=[common], help="linear optimization over the lifted set, grid-checked")
    p.add_argument("file")
    p.add_argument("--c", required=True, help="objective vector, e.g. 1,0")
    p.add_argument("--box", required=True, help="grid box containing the set")
    p.add_argument("--grid-step", type=float, default=1e-3)
    p.add_argument("--gap-tol", type=float, default=2e-3)
    _add_mode_flags(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("trace", parents=[common], help="grid + boundary point cloud for figures")
    p.add_argument("file")
    p.add_argument("--box", required=True)
    p.add_argument("--resolution", required=True, help="grid resolution, e.g. 200x200")
    p.set_defaults(func=cmd_trace)
    return parser


# Flags whose values may start with "-" (negative coordinates, boxes).
# argparse only recognizes bare negative numbers, so "--box -2:2,-2:2" would
# be read as a missing argument; fusing to "--box=-2:2,-2:2" sidesteps that.
_FUSE_FLAGS = {"--box", "--c", "--xi", "--point", "-x"}


def _fuse_flag_values(argv: Sequence[str]) -> list[str]:
    out: list[str] = []
    skip = False
    for i, tok in enumerate(argv):
        if skip:
            skip = False
            continue
        if tok in _FUSE_FLAGS and i + 1 < len(argv):
            name = "--point" if tok == "-x" else tok
            out.append(f"{name}={argv[i + 1]}")
            skip = True
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    args = _build_parser().parse_args(_fuse_flag_values(argv))
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return exc.code


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
