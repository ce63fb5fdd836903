"""Probe deterministic behaviors the tests will pin."""
import time
from fractions import Fraction as F

import numpy as np

from pmilift.polyalg import Poly, MatPoly
from pmilift.momlift import moment_lift
from pmilift.ratlift import RationalMatFn, qmod_lift, IndexEscape
from pmilift.sdpcore import (
    SolverOptions, Status, solve_standard, optimize_linear, coordinate_values,
    FeasibilityOracle, plant_lmi_instance, solve, kkt_residuals,
)
from pmilift.certify import matrix_sos_check, qmod_certificate_search


def P(nvars, terms):
    return Poly(nvars, {tuple(k): F(v) for k, v in terms.items()})


# 1. IndexEscape with a lex-lead of non-maximal total degree
p_bad = P(2, {(1, 0): 1, (0, 2): -1})
R_bad = RationalMatFn(MatPoly.from_entries([[P(2, {(2, 0): 1})]]), p_bad)
for d in (1, 2):
    try:
        qmod_lift(R_bad, [], d)
        print(f"escape d={d}: NO RAISE")
    except IndexEscape as e:
        print(f"escape d={d}: IndexEscape: {e}")

# 2. qmod t=1 on the orthant example
p44 = P(2, {(1, 1): 1})
A44 = MatPoly.from_entries([
    [P(2, {(0, 0): 7, (1, 0): -1, (0, 1): 2}), P(2, {(0, 0): 5})],
    [P(2, {(0, 0): 5}), P(2, {(0, 0): 11, (0, 1): -1})],
])
B44 = MatPoly.from_entries([
    [P(2, {(1, 0): 1, (0, 3): 1}), P(2, {(0, 2): 1})],
    [P(2, {(0, 2): 1}), P(2, {(0, 1): 1})],
])
R44 = RationalMatFn(A44 * p44 - B44, p44)
gs44 = [P(2, {(1, 0): 1}), P(2, {(0, 1): 1})]
t0 = time.time()
c1 = qmod_certificate_search(R44, gs44, p44, R44.q_or_default(), t=1)
print(f"orthant qmod t=1: {c1.status} [{time.time()-t0:.1f}s] {c1.detail}")

# 3a. SEPARATED on deep Out points of the quartic
G_q = MatPoly.from_entries([
    [P(2, {(0, 0): 2, (4, 0): -2, (2, 2): -4, (0, 4): -2}),
     P(2, {(0, 0): 3, (3, 1): -1, (1, 3): -1})],
    [P(2, {(0, 0): 3, (3, 1): -1, (1, 3): -1}),
     P(2, {(0, 0): 5, (4, 0): -1, (2, 2): -4, (0, 4): -1})],
])
lmi_q = moment_lift(G_q)
oracle = FeasibilityOracle(lmi_q)
for pt in [(2.0, 0.0), (0.0, 2.0), (-2.0, 0.0), (1.5, 1.5), (1.2, 0.0)]:
    r = oracle.query(pt)
    print(f"query {pt}: verdict={r.verdict} t*={r.t_star:.4g} status={r.solution.status.value} it={r.solution.iterations}")

# 3b. solve_standard band with impossible tolerances: min x s.t. x = 2
opts = SolverOptions(tol_gap=1e-300, tol_feas=1e-300, max_iter=50)
r = solve_standard([1], [np.eye(1)],
                   [(np.array([0]), np.array([0]), np.array([0]), np.array([1.0]))],
                   np.array([2.0]), opts, band=(-1.0, 1.0))
print(f"band standard: status={r.status.value} pobj={r.pobj:.6g} dobj={r.dobj:.6g} it={r.iterations}")

# 4. planted instances at acceptance sizes
rng = np.random.default_rng(2718)
worst_abs, worst_rel, worst_kkt, tmax = 0.0, 0.0, 0.0, 0.0
vals = []
for trial in range(50):
    nvar = int(rng.integers(2, 101))
    dims = []
    while sum(n * (n + 1) // 2 for n in dims) < nvar:
        dims.append(int(rng.integers(2, 21)))
    prog, w_star, val = plant_lmi_instance(rng, nvar, dims)
    t0 = time.perf_counter()
    sol = solve(prog)
    dt = time.perf_counter() - t0
    assert sol.status is Status.OPTIMAL, (trial, sol.status, nvar, dims)
    aerr = abs(sol.objective - val)
    kk = kkt_residuals(prog, sol)
    worst_abs = max(worst_abs, aerr)
    worst_rel = max(worst_rel, aerr / (1 + abs(val)))
    worst_kkt = max(worst_kkt, max(kk.values()))
    tmax = max(tmax, dt)
    vals.append(abs(val))
print(f"planted 50: worst abs {worst_abs:.2e}, worst rel {worst_rel:.2e}, "
      f"worst kkt {worst_kkt:.2e}, slowest {tmax*1e3:.0f} ms, |val| max {max(vals):.1f}")

# 5. Motzkin form is not a sum of squares
motzkin = P(2, {(4, 2): 1, (2, 4): 1, (2, 2): -3, (0, 0): 1})
t0 = time.time()
c = matrix_sos_check(MatPoly.from_entries([[motzkin]]))
print(f"motzkin: {c.status} [{time.time()-t0:.2f}s] dual keys: {sorted(c.dual or {})}")

# 6. unit disk: optimize_linear exact
G_disk = MatPoly.from_entries([[P(2, {(0, 0): 1, (2, 0): -1, (0, 2): -1})]])
lmi_d = moment_lift(G_disk)
sol = optimize_linear(lmi_d, [1.0, 0.0])
xy = coordinate_values(lmi_d, sol)
print(f"disk min x1: {sol.status.value} obj={sol.objective:.9f} at ({xy[0]:.6f},{xy[1]:.6f})")

# 7. zero-gap rational certificate (constant G in disguise)
Rconst = RationalMatFn(
    MatPoly.from_entries([[P(2, {(1, 1): 1}), Poly.zero(2)],
                          [Poly.zero(2), P(2, {(1, 1): 2})]]),
    P(2, {(1, 1): 1}),
)
c = qmod_certificate_search(Rconst, [], Rconst.denom, Rconst.q_or_default(), t=1)
print(f"zero-gap qmod: {c.status} d={c.degree} detail={c.detail!r}")

# 8. clearing failure: p,q that do not absorb the denominators
try:
    one2 = Poly.const(2, 1)
    qmod_certificate_search(R44, gs44, one2, one2, t=2)
    print("clearing: NO RAISE")
except ValueError as e:
    print(f"clearing: ValueError: {e}")
