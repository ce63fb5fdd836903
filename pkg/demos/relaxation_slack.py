"""What breaks without concavity: infeasible certificates and lifting slack.

Two cautionary examples.  A 3x3 quadratic matrix whose curvature form is
the classical Choi biquadratic: positive, hence the set is convex, but not
a sum of squares, so the uniform certificate search must come back
infeasible (a pointwise certificate still exists for each fixed direction).
And a hyperbola-slab set {x >= 0 : x1*x2 >= 2} whose defining matrix is not
matrix concave on the orthant: its truncated lifting strictly contains the
set, and sampling finds the slack immediately.
"""

from pathlib import Path

from pmilift import (
    SetProblem,
    compare_membership,
    pointwise_sos_concavity,
    putinar_lift,
    uniform_sos_concavity,
)
from pmilift.cli import load_problem

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "pmilift" / "fixtures"

# -- the Choi-type matrix: convex set, no uniform sos certificate --------------
pf = load_problem(str(FIXTURES / "choi_quadratic.json"))
G = pf.matrix

cert = uniform_sos_concavity(G)
print(f"uniform sos-concavity: {cert.status}")
assert not cert.feasible
# the infeasibility certificate is a separating functional on coefficients
print("separating functional on", len(cert.dual), "coefficient positions")

cert_pt = pointwise_sos_concavity(G, (1, 1, 1))
print(f"pointwise certificate at xi = (1,1,1): {cert_pt.status}")
assert cert_pt.feasible
if cert_pt.exact_grams:
    print("  (exact rational Gram recovered; residual is identically zero)")

# -- the hyperbola slab: visible relaxation slack ------------------------------
pf = load_problem(str(FIXTURES / "hyperbola_quadratic.json"))
Q, gs = pf.matrix, pf.domain
lmi = putinar_lift(Q, list(gs), 1)
print("\nhyperbola slab lifting:", lmi.summary())

problem = SetProblem(Q, gs, "hyperbola_quadratic")
report = compare_membership(problem, lmi, [(0, 3), (0, 3)], 300, seed=11)
print("membership cross-check:", report.summary())

# every disagreement should be one-sided: the lifting over-approximates,
# it must never cut away true points of S
assert report.slack and not report.unsound and not report.soundness_exceptions
print(f"{len(report.slack)} slack points, e.g. x = {report.slack[0].point}:")
print(f"  direct: {report.slack[0].direct} (margin {report.slack[0].direct_margin:.3f})")
print(f"  lifted: {report.slack[0].lifted} (margin {report.slack[0].lifted_margin:.3f})")
print("the truncated lifting projects onto the whole orthant here, so every")
print("orthant point with x1*x2 < 2 is slack; higher-order liftings shrink it.")
