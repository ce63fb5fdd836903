"""Generate fixture problem files + expected-results sidecars, then validate
round-trips and lift summaries through the CLI layer."""
import json
from fractions import Fraction as F
from pathlib import Path

from pmilift.polyalg import Poly, MatPoly
from pmilift.ratlift import RationalMatFn
from pmilift import cli

FIXDIR = Path("src/pmilift/fixtures")
FIXDIR.mkdir(parents=True, exist_ok=True)


def P(nvars, terms):
    return Poly(nvars, {tuple(k): F(v) for k, v in terms.items()})


def coef_obj(c: F):
    return int(c) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def poly_obj(p: Poly):
    items = sorted(p.terms.items(), key=lambda t: (sum(t[0]), tuple(-v for v in t[0])))
    return [{"exp": list(e), "coef": coef_obj(c)} for e, c in items]


def mat_terms_obj(M: MatPoly):
    items = sorted(M.terms.items(), key=lambda t: (sum(t[0]), tuple(-v for v in t[0])))
    return [
        {
            "exp": list(e),
            "mat": [[coef_obj(mat[i, j]) for j in range(M.size)] for i in range(M.size)],
        }
        for e, mat in items
    ]


def write_problem(name, numerator, den=None, domain=(), metadata=None):
    obj = {
        "n": numerator.nvars,
        "m": numerator.size,
        "numerator": mat_terms_obj(numerator),
    }
    if den is not None:
        obj["denominator"] = poly_obj(den)
    if domain:
        obj["domain"] = [poly_obj(g) for g in domain]
    obj["metadata"] = metadata or {}
    path = FIXDIR / f"{name}.json"
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path


def write_sidecar(name, data):
    path = FIXDIR / f"{name}.expected.json"
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


# ---- choi_quadratic ----
G_choi = MatPoly.from_entries([
    [P(3, {(0,0,0): 2, (2,0,0): -1, (0,0,2): -2}), P(3, {(0,0,0): 1, (1,1,0): 1}), P(3, {(1,0,1): 1})],
    [P(3, {(0,0,0): 1, (1,1,0): 1}), P(3, {(0,0,0): 2, (0,2,0): -1, (2,0,0): -2}), P(3, {(0,0,0): 1, (0,1,1): 1})],
    [P(3, {(1,0,1): 1}), P(3, {(0,0,0): 1, (0,1,1): 1}), P(3, {(0,0,0): 2, (0,0,2): -1, (0,2,0): -2})],
])
write_problem(
    "choi_quadratic", G_choi,
    metadata={
        "name": "choi_quadratic",
        "notes": "3x3 quadratic matrix set in three variables; the negated "
        "curvature form is the classical Choi biquadratic (positive but not "
        "a sum of squares), so no uniform concavity certificate exists.",
    },
)
write_sidecar("choi_quadratic", {
    "problem": "choi_quadratic.json",
    "lift": {"mode": "sos", "summary": "2 pencils (3x3, 4x4), 6 free lifting variables"},
    "certify": [
        {"kind": "uniform-sos-concave", "status": "Infeasible", "exit": 1},
        {"kind": "pointwise", "xi": "1,1,1", "status": "Feasible", "exit": 0},
    ],
    "member": [
        {"x": "0,0,0", "contains": ["direct: In (margin 5.86e-1)", "lifted: In"], "exit": 0},
        {"x": "2,0,0", "contains": ["direct: Out", "lifted: Out"], "exit": 0},
    ],
    "verify": {"box": "-2:2,-2:2,-2:2", "count": 2000, "seed": 42,
               "disagreements": 0, "slack_ok": False},
})

# ---- quartic_planar ----
G_q = MatPoly.from_entries([
    [P(2, {(0,0): 2, (4,0): -2, (2,2): -4, (0,4): -2}), P(2, {(0,0): 3, (3,1): -1, (1,3): -1})],
    [P(2, {(0,0): 3, (3,1): -1, (1,3): -1}), P(2, {(0,0): 5, (4,0): -1, (2,2): -4, (0,4): -1})],
])
write_problem(
    "quartic_planar", G_q,
    metadata={
        "name": "quartic_planar",
        "notes": "2x2 quartic matrix set in the plane; uniformly matrix "
        "sos-concave, so the moment lifting represents the set exactly.",
    },
)
write_sidecar("quartic_planar", {
    "problem": "quartic_planar.json",
    "lift": {"mode": "sos", "summary": "2 pencils (2x2, 6x6), 12 free lifting variables"},
    "certify": [
        {"kind": "uniform-sos-concave", "status": "Feasible", "exit": 0},
    ],
    "member": [
        {"x": "0,0", "contains": ["direct: In", "lifted: In"], "exit": 0},
        {"x": "2,0", "contains": ["direct: Out", "lifted: Out"], "exit": 0},
    ],
    "verify": {"box": "-1.5:1.5,-1.5:1.5", "count": 2000, "seed": 42,
               "disagreements": 0, "slack_ok": False},
    "optimize": {"c": "1,0", "box": "-1.5:1.5,-1.5:1.5", "gap_tol": 2e-3, "exit": 0},
})

# ---- orthant_rational ----
p44 = P(2, {(1,1): 1})
A44 = MatPoly.from_entries([
    [P(2, {(0,0): 7, (1,0): -1, (0,1): 2}), P(2, {(0,0): 5})],
    [P(2, {(0,0): 5}), P(2, {(0,0): 11, (0,1): -1})],
])
B44 = MatPoly.from_entries([
    [P(2, {(1,0): 1, (0,3): 1}), P(2, {(0,2): 1})],
    [P(2, {(0,2): 1}), P(2, {(0,1): 1})],
])
N44 = A44 * p44 - B44
gs44 = [P(2, {(1,0): 1}), P(2, {(0,1): 1})]
write_problem(
    "orthant_rational", N44, den=p44, domain=gs44,
    metadata={
        "name": "orthant_rational",
        "notes": "2x2 rational matrix over the open positive orthant, "
        "denominator x1*x2; q-module certificate exists at t=2 with lifting "
        "half-degree 2.",
    },
)
write_sidecar("orthant_rational", {
    "problem": "orthant_rational.json",
    "lift": {"mode": "qmod", "halfdeg": 2,
             "summary": "4 pencils (2x2, 6x6, 3x3, 3x3), 12 free lifting variables"},
    "certify": [
        {"kind": "qmod", "tcap": 2, "status": "Feasible", "degree": 2, "exit": 0},
    ],
    "member": [
        {"x": "1,1", "contains": ["direct: In", "lifted: In"], "exit": 0},
        {"x": "0,1", "contains": ["direct: PoleNear"], "exit": 0},
    ],
    "verify": {"box": "0:20,0:20", "count": 2000, "seed": 42,
               "disagreements": 0, "slack_ok": False},
})

# ---- plane_rational ----
p45 = P(2, {(2,0): 1, (0,2): 1})
A45 = MatPoly.from_entries([
    [P(2, {(0,0): 1, (2,0): -2, (1,1): -2, (0,2): -1}), P(2, {(2,0): 1})],
    [P(2, {(2,0): 1}), P(2, {(0,0): 1, (2,0): -1})],
])
E45 = MatPoly.from_entries([
    [P(2, {(0,4): -1}), P(2, {(0,4): 1})],
    [P(2, {(0,4): 1}), P(2, {(0,4): -1})],
])
N45 = A45 * p45 + E45
write_problem(
    "plane_rational", N45, den=p45,
    metadata={
        "name": "plane_rational",
        "notes": "2x2 rational matrix on the plane, denominator x1^2+x2^2 "
        "(one removable singularity at the origin); q-module certificate "
        "exists at t=3 with lifting half-degree 2.",
    },
)
write_sidecar("plane_rational", {
    "problem": "plane_rational.json",
    "lift": {"mode": "qmod", "halfdeg": 2,
             "summary": "2 pencils (2x2, 6x6), 12 free lifting variables"},
    "certify": [
        {"kind": "qmod", "tcap": 3, "status": "Feasible", "degree": 2, "exit": 0},
    ],
    "member": [
        {"x": "1/2,0", "contains": ["direct: In", "lifted: In"], "exit": 0},
        {"x": "1,1", "contains": ["direct: Out", "lifted: Out"], "exit": 0},
        {"x": "0,0", "contains": ["direct: PoleNear"], "exit": 0},
    ],
    "verify": {"box": "-1.5:1.5,-1.5:1.5", "count": 2000, "seed": 42,
               "disagreements": 0, "slack_ok": False},
    "optimize": {"c": "1,0", "box": "-1.5:1.5,-1.5:1.5", "gap_tol": 2e-3, "exit": 0},
    "trace": {"box": "-1.5:1.5,-1.5:1.5", "resolution": "40x40"},
})

# ---- hyperbola_quadratic ----
Qx = MatPoly.from_entries([
    [P(2, {(1,1): 1, (0,0): 2}), P(2, {(1,1): 1}), P(2, {})],
    [P(2, {(1,1): 1}), P(2, {(1,1): 1, (0,0): -1}), P(2, {})],
    [P(2, {}), P(2, {}), P(2, {(1,0): 1, (0,1): 1})],
])
gs_orth = [P(2, {(1,0): 1}), P(2, {(0,1): 1})]
write_problem(
    "hyperbola_quadratic", Qx, domain=gs_orth,
    metadata={
        "name": "hyperbola_quadratic",
        "notes": "3x3 quadratic matrix cutting out {x >= 0 : x1*x2 >= 2}; "
        "not matrix concave on the orthant, so truncated liftings strictly "
        "relax the set (expected slack points, e.g. (1,1)).",
    },
)
write_sidecar("hyperbola_quadratic", {
    "problem": "hyperbola_quadratic.json",
    "lift": {"mode": "putinar", "order": 1,
             "summary": "4 pencils (3x3, 3x3, 1x1, 1x1), 3 free lifting variables"},
    "certify": [
        {"kind": "uniform-sos-concave", "status": "Infeasible", "exit": 1},
        {"kind": "pointwise", "xi": "1,0,0", "status": "Infeasible", "exit": 1},
    ],
    "member": [
        {"x": "3,1", "contains": ["direct: In", "lifted: In"], "exit": 0},
        {"x": "-1,1", "contains": ["direct: DomainViolation", "lifted: Out"], "exit": 0},
        {"x": "1,1", "contains": ["direct: Out", "lifted: In"], "exit": 5},
    ],
    "verify": {"box": "0:3,0:3", "count": 400, "seed": 42,
               "disagreements": 0, "slack_ok": True, "min_slack": 1},
})

# ---- validation: round-trip + lift summaries + a member line ----
import contextlib, io

expected_matrices = {
    "choi_quadratic": G_choi,
    "quartic_planar": G_q,
    "orthant_rational": RationalMatFn(N44, p44),
    "plane_rational": RationalMatFn(N45, p45),
    "hyperbola_quadratic": Qx,
}
def same_matpoly(a: MatPoly, b: MatPoly) -> bool:
    return set(a.terms) == set(b.terms) and all(
        (a.terms[e] == b.terms[e]).all() for e in a.terms
    )


for name, want in expected_matrices.items():
    pf = cli.load_problem(str(FIXDIR / f"{name}.json"))
    got = pf.matrix
    if isinstance(want, RationalMatFn):
        assert isinstance(got, RationalMatFn)
        assert same_matpoly(got.numerator, want.numerator)
        assert got.denom == want.denom
    else:
        assert isinstance(got, MatPoly)
        assert same_matpoly(got, want), name
    side = json.loads((FIXDIR / f"{name}.expected.json").read_text())
    lift = side["lift"]
    lmi = cli.build_lifting(pf, lift["mode"], lift.get("order"), lift.get("halfdeg"))
    assert lmi.summary() == lift["summary"], (name, lmi.summary())
    print(f"{name}: round-trip + lift summary OK -> {lmi.summary()}")

buf = io.StringIO()
with contextlib.redirect_stdout(buf):
    rc = cli.main(["member", str(FIXDIR / "choi_quadratic.json"), "-x", "0,0,0"])
line = buf.getvalue().strip()
print("member line:", repr(line), "rc:", rc)
assert rc == 0 and "direct: In (margin 5.86e-1)" in line and "lifted: In" in line

buf = io.StringIO()
with contextlib.redirect_stdout(buf):
    rc = cli.main(["member", str(FIXDIR / "hyperbola_quadratic.json"), "-x", "1,1"])
print("slack member line:", repr(buf.getvalue().strip()), "rc:", rc)
assert rc == 5

print("ALL FIXTURE CHECKS PASSED")
