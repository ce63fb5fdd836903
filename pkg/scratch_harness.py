"""Harness checks: membership agreement, support gaps, traces, slack regression."""
import math
import time
from fractions import Fraction as F

import numpy as np

from pmilift.polyalg import Poly, MatPoly
from pmilift.momlift import moment_lift, putinar_lift
from pmilift.ratlift import RationalMatFn, qmod_lift
from pmilift.harness import (
    SetProblem, member_direct, member_margin, compare_membership,
    support_compare, boundary_trace, trace_to_csv,
)
from pmilift.sdpcore import SolverOptions, optimize_linear, Status


def P(nvars, terms):
    return Poly(nvars, {tuple(k): F(v) for k, v in terms.items()})


# ---- problems ----
G_choi = MatPoly.from_entries([
    [P(3, {(0,0,0): 2, (2,0,0): -1, (0,0,2): -2}), P(3, {(0,0,0): 1, (1,1,0): 1}), P(3, {(1,0,1): 1})],
    [P(3, {(0,0,0): 1, (1,1,0): 1}), P(3, {(0,0,0): 2, (0,2,0): -1, (2,0,0): -2}), P(3, {(0,0,0): 1, (0,1,1): 1})],
    [P(3, {(1,0,1): 1}), P(3, {(0,0,0): 1, (0,1,1): 1}), P(3, {(0,0,0): 2, (0,0,2): -1, (0,2,0): -2})],
])
prob_choi = SetProblem(G_choi)
lmi_choi = moment_lift(G_choi)

G_q = MatPoly.from_entries([
    [P(2, {(0,0): 2, (4,0): -2, (2,2): -4, (0,4): -2}), P(2, {(0,0): 3, (3,1): -1, (1,3): -1})],
    [P(2, {(0,0): 3, (3,1): -1, (1,3): -1}), P(2, {(0,0): 5, (4,0): -1, (2,2): -4, (0,4): -1})],
])
prob_q = SetProblem(G_q)
lmi_q = moment_lift(G_q)

p44 = P(2, {(1,1): 1})
A44 = MatPoly.from_entries([
    [P(2, {(0,0): 7, (1,0): -1, (0,1): 2}), P(2, {(0,0): 5})],
    [P(2, {(0,0): 5}), P(2, {(0,0): 11, (0,1): -1})],
])
B44 = MatPoly.from_entries([
    [P(2, {(1,0): 1, (0,3): 1}), P(2, {(0,2): 1})],
    [P(2, {(0,2): 1}), P(2, {(0,1): 1})],
])
R44 = RationalMatFn(A44 * p44 - B44, p44)
gs44 = (P(2, {(1,0): 1}), P(2, {(0,1): 1}))
prob_44 = SetProblem(R44, gs44)
lmi_44 = qmod_lift(R44, gs44, 2)

p45 = P(2, {(2,0): 1, (0,2): 1})
A45 = MatPoly.from_entries([
    [P(2, {(0,0): 1, (2,0): -2, (1,1): -2, (0,2): -1}), P(2, {(2,0): 1})],
    [P(2, {(2,0): 1}), P(2, {(0,0): 1, (2,0): -1})],
])
E45 = MatPoly.from_entries([
    [P(2, {(0,4): -1}), P(2, {(0,4): 1})],
    [P(2, {(0,4): 1}), P(2, {(0,4): -1})],
])
R45 = RationalMatFn(A45 * p45 + E45, p45)
prob_45 = SetProblem(R45)
lmi_45 = qmod_lift(R45, [], 2)

Qx = MatPoly.from_entries([
    [P(2, {(1,1): 1, (0,0): 2}), P(2, {(1,1): 1}), P(2, {})],
    [P(2, {(1,1): 1}), P(2, {(1,1): 1, (0,0): -1}), P(2, {})],
    [P(2, {}), P(2, {}), P(2, {(1,0): 1, (0,1): 1})],
])
gs_orth = (P(2, {(1,0): 1}), P(2, {(0,1): 1}))
prob_hyp = SetProblem(Qx, gs_orth)
lmi_hyp = putinar_lift(Qx, gs_orth, 1)
print("hyperbola lifting:", lmi_hyp.summary())

# ---- member_direct spot checks ----
v, m = member_margin(G_choi, (), (0, 0, 0), 1e-9)
assert v == "In" and abs(m - (2 - math.sqrt(2))) < 1e-12, (v, m)
assert member_direct(G_choi, (), (2, 0, 0)) == "Out"
assert member_direct(R44, gs44, (0, 1)) == "PoleNear"
assert member_direct(Qx, gs_orth, (-1, 1)) == "DomainViolation"
assert member_direct(Qx, gs_orth, (2, 2)) == "In"       # x1x2 = 4 > 2
assert member_direct(Qx, gs_orth, (1, 2)) == "Boundary"  # x1x2 = 2 exactly
assert member_direct(Qx, gs_orth, (3, 1)) == "In"
assert member_direct(Qx, gs_orth, (1, 1)) == "Out"
print("member_direct spot checks OK")

# ---- quick membership comparisons (small counts first) ----
t0 = time.time()
rep = compare_membership(prob_choi, lmi_choi, [(-2, 2)] * 3, 200, 42)
print(f"choi 200: {rep.summary()}  [{time.time()-t0:.1f}s]")
assert not rep.disagreements and not rep.soundness_exceptions, rep.to_text()

t0 = time.time()
rep = compare_membership(prob_q, lmi_q, [(-1.5, 1.5)] * 2, 200, 42)
print(f"quartic 200: {rep.summary()}  [{time.time()-t0:.1f}s]")
assert not rep.disagreements and not rep.soundness_exceptions, rep.to_text()

t0 = time.time()
rep = compare_membership(prob_44, lmi_44, [(0, 20)] * 2, 200, 42)
print(f"orthant 200: {rep.summary()}  [{time.time()-t0:.1f}s]")
assert not rep.disagreements and not rep.soundness_exceptions, rep.to_text()

t0 = time.time()
rep = compare_membership(prob_45, lmi_45, [(-1.5, 1.5)] * 2, 200, 42)
print(f"plane 200: {rep.summary()}  [{time.time()-t0:.1f}s]")
assert not rep.disagreements and not rep.soundness_exceptions, rep.to_text()

# ---- slack regression on the hyperbola set ----
t0 = time.time()
rep = compare_membership(prob_hyp, lmi_hyp, [(0, 3)] * 2, 400, 42)
print(f"hyperbola 400: {rep.summary()}  slack={len(rep.slack)} unsound={len(rep.unsound)}  [{time.time()-t0:.1f}s]")
assert len(rep.slack) > 0, "expected relaxation slack"
assert len(rep.unsound) == 0 and not rep.soundness_exceptions

# ---- degenerate box ----
rep = compare_membership(prob_q, lmi_q, [(0.1, 0.1), (0.2, 0.2)], 5, 7)
assert rep.samples == 5 and rep.agree + len(rep.disagreements) + rep.indeterminate == 5

# ---- support functions ----
rng = np.random.default_rng(42)
dirs = []
for _ in range(5):
    d = rng.standard_normal(2)
    dirs.append(d / np.linalg.norm(d))
t0 = time.time()
recs = support_compare(prob_q, lmi_q, dirs, [(-1.5, 1.5)] * 2, 1e-3)
dt = time.time() - t0
for r in recs:
    print(f"quartic dir=({r.direction[0]:+.3f},{r.direction[1]:+.3f}) lifted={r.lifted:.6f} grid={r.grid:.6f} gap={r.gap:+.2e}")
    assert r.status == "ok" and abs(r.gap) <= 2e-3, r
print(f"quartic supports: 5 dirs in {dt:.1f}s")

t0 = time.time()
recs = support_compare(prob_45, lmi_45, dirs, [(-1.5, 1.5)] * 2, 1e-3)
dt = time.time() - t0
for r in recs:
    print(f"plane dir=({r.direction[0]:+.3f},{r.direction[1]:+.3f}) lifted={r.lifted:.6f} grid={r.grid:.6f} gap={r.gap:+.2e}")
    assert r.status == "ok" and abs(r.gap) <= 2e-3, r
print(f"plane supports: 5 dirs in {dt:.1f}s")

# trivial: G = I is unbounded in every direction
G_id = MatPoly.from_entries([[P(2, {(0,0): 1}), P(2, {})], [P(2, {}), P(2, {(0,0): 1})]])
lmi_id = moment_lift(G_id)
recs = support_compare(SetProblem(G_id), lmi_id, [(1.0, 0.0), (0.0, -1.0)], [(-1, 1)] * 2, 1e-1)
for r in recs:
    assert r.status == "Unbounded", r
print("identity matrix -> Unbounded per direction OK")

# ---- boundary traces ----
rows = boundary_trace(prob_q, [(-1.5, 1.5)] * 2, 60)
n_in = sum(1 for _, c, _ in rows if c == "In")
n_bd = sum(1 for _, c, _ in rows if c == "Boundary")
print(f"quartic trace 60x60: {n_in} In, {n_bd} Boundary")
assert n_in > 0 and n_bd > 0
for pt, c, mg in rows:
    if c == "Boundary":
        assert abs(mg) < 1e-2, (pt, mg)
csv = trace_to_csv(rows)
assert csv.splitlines()[0] == "x1,x2,class,margin"

rows = boundary_trace(prob_44, [(0.01, 20), (0.01, 20)], 50)
n_in = sum(1 for _, c, _ in rows if c == "In")
print(f"orthant trace 50x50: {n_in} In, {len(rows)-n_in} Boundary")
assert n_in > 0

# empty set -> empty cloud
G_neg = MatPoly.from_entries([[P(2, {(0,0): -1})]])
assert boundary_trace(SetProblem(G_neg), [(-1, 1)] * 2, 10) == []

# n outside {2,3}
try:
    boundary_trace(prob_choi, [(-2, 2)] * 3, 5)
    ok3 = True
except ValueError:
    ok3 = False
assert ok3, "n=3 should be allowed"
try:
    boundary_trace(SetProblem(MatPoly.from_entries([[P(1, {(0,): 1})]])), [(-1, 1)], 5)
    raise SystemExit("n=1 should be rejected")
except ValueError:
    pass

# reproducibility
r1 = compare_membership(prob_q, lmi_q, [(-1.5, 1.5)] * 2, 50, 9)
r2 = compare_membership(prob_q, lmi_q, [(-1.5, 1.5)] * 2, 50, 9)
assert r1 == r2
print("ALL HARNESS CHECKS PASSED")
