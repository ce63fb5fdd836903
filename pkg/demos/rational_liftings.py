"""Liftings for rational matrix inequalities.

Two sets defined by G(x) = numerator(x) / p(x):

  * an orthant example with p = x1*x2, domain x1 >= 0, x2 >= 0;
  * a plane example with p = x1^2 + x2^2 (singular only at the origin).

The denominator is handled by a second family of lifting variables
z_beta = x^beta / p(x), indexed by the exponents beta not divisible by the
lex-leading monomial of p.  A q-module concavity certificate (multipliers
g_i(x) g_j(u) with SOS coefficients) validates each lifting at half-degree 2.
"""

from pathlib import Path

from pmilift import (
    SetProblem,
    compare_membership,
    member_margin,
    qmod_certificate_search,
    qmod_index_sets,
    qmod_lift,
)
from pmilift.cli import load_problem

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "pmilift" / "fixtures"

for name, tcap in (("orthant_rational", 2), ("plane_rational", 3)):
    pf = load_problem(str(FIXTURES / f"{name}.json"))
    R = pf.matrix
    print(f"== {name} ==")
    print(f"denominator p = {R.denom}")

    # index sets: y for ordinary moments, z for denominator-scaled ones
    y_idx, z_idx = qmod_index_sets(R.denom, 2)
    print(f"y-index ({len(y_idx)}):", y_idx)
    print(f"z-index ({len(z_idx)}):", z_idx)

    lmi = qmod_lift(R, list(pf.domain), 2)
    print("lifting:", lmi.summary())

    # the certificate that makes the lifting mean something
    cert = qmod_certificate_search(
        R, list(pf.domain), R.denom, R.q_or_default(), tcap
    )
    print(f"q-module certificate (t <= {tcap}): {cert.status}, d = {cert.degree}")
    assert cert.feasible

    # margins near the singular locus: the direct test reports PoleNear
    # instead of guessing a sign from a blown-up evaluation
    probe = (0.0, 1.0) if name == "orthant_rational" else (0.0, 0.0)
    verdict, margin = member_margin(R, pf.domain, probe)
    print(f"direct verdict at {probe}: {verdict} (margin {margin:.3g})")

    box = [(0, 20), (0, 20)] if name == "orthant_rational" else [(-1.5, 1.5), (-1.5, 1.5)]
    report = compare_membership(SetProblem(R, pf.domain, name), lmi, box, 200, seed=3)
    print("membership cross-check:", report.summary())
    assert not report.disagreements and not report.soundness_exceptions
    print()
