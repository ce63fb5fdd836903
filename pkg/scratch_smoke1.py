"""Smoke: momlift/ratlift reproduce printed pencils; sdpcore solves planted instances."""
from fractions import Fraction as F

import numpy as np

from pmilift.polyalg import Poly, MatPoly, frac_matrix
from pmilift.momlift import moment_lift, putinar_lift
from pmilift.ratlift import RationalMatFn, qmod_lift, qmod_index_sets
from pmilift import sdpcore


def P(nvars, terms):
    return Poly(nvars, {tuple(k): F(v) for k, v in terms.items()})


# ---- Example: Choi-type quadratic, 3 vars ----
n = 3
G_choi = MatPoly.from_entries([
    [P(3, {(0,0,0): 2, (2,0,0): -1, (0,0,2): -2}), P(3, {(0,0,0): 1, (1,1,0): 1}), P(3, {(1,0,1): 1})],
    [P(3, {(0,0,0): 1, (1,1,0): 1}), P(3, {(0,0,0): 2, (0,2,0): -1, (2,0,0): -2}), P(3, {(0,0,0): 1, (0,1,1): 1})],
    [P(3, {(1,0,1): 1}), P(3, {(0,0,0): 1, (0,1,1): 1}), P(3, {(0,0,0): 2, (0,0,2): -1, (0,2,0): -2})],
])
lmi = moment_lift(G_choi)
print("choi pencils:", [(p.label, p.size) for p in lmi.pencils])
print("choi n_free:", lmi.n_free())
assert lmi.n_free() == 6, lmi.n_free()
# printed matrix pencil entries
mat = [p for p in lmi.pencils if p.label == "matrix"][0]
e200 = ("y", (2,0,0)); e002 = ("y", (0,0,2)); e110 = ("y", (1,1,0)); e101 = ("y", (1,0,1)); e020 = ("y", (0,2,0)); e011=("y",(0,1,1))
assert mat.constant[0][0] == F(2) and mat.coeffs[e200][0][0] == F(-1) and mat.coeffs[e002][0][0] == F(-2)
assert mat.constant[0][1] == F(1) and mat.coeffs[e110][0][1] == F(1)
assert mat.coeffs[e101][0][2] == F(1) and mat.constant[0][2] == 0
assert mat.coeffs[e020][1][1] == F(-1) and mat.coeffs[e200][1][1] == F(-2)
assert mat.coeffs[e002][2][2] == F(-1) and mat.coeffs[e020][2][2] == F(-2)
mom = [p for p in lmi.pencils if p.label == "moment"][0]
assert mom.size == 4
assert mom.constant[0][0] == F(1)
# row 1: 1, x1, x2, x3
assert mom.coeffs[("y",(1,0,0))][0][1] == F(1)
assert mom.coeffs[("y",(0,1,0))][0][2] == F(1)
assert mom.coeffs[("y",(0,0,1))][0][3] == F(1)
assert mom.coeffs[("y",(2,0,0))][1][1] == F(1)
assert mom.coeffs[("y",(1,1,0))][1][2] == F(1)
assert mom.coeffs[("y",(0,1,1))][2][3] == F(1)
print("choi printed pencil OK")

# ---- quartic planar (coefficient-4 via G entries) ----
G_q = MatPoly.from_entries([
    [P(2, {(0,0): 2, (4,0): -2, (2,2): -4, (0,4): -2}), P(2, {(0,0): 3, (3,1): -1, (1,3): -1})],
    [P(2, {(0,0): 3, (3,1): -1, (1,3): -1}), P(2, {(0,0): 5, (4,0): -1, (2,2): -4, (0,4): -1})],
])
lmi_q = moment_lift(G_q)
print("quartic pencils:", [(p.label, p.size) for p in lmi_q.pencils])
assert lmi_q.n_free() == 12, lmi_q.n_free()
mat = [p for p in lmi_q.pencils if p.label == "matrix"][0]
assert mat.size == 2
y40, y22, y04, y31, y13 = ("y",(4,0)), ("y",(2,2)), ("y",(0,4)), ("y",(3,1)), ("y",(1,3))
assert mat.coeffs[y40][0][0] == F(-2) and mat.coeffs[y22][0][0] == F(-4) and mat.coeffs[y04][0][0] == F(-2)
assert mat.coeffs[y31][0][1] == F(-1) and mat.coeffs[y13][0][1] == F(-1)
assert mat.coeffs[y22][1][1] == F(-4)  # G-entry-derived golden
mom = [p for p in lmi_q.pencils if p.label == "moment"][0]
assert mom.size == 6
# printed row 1: 1, x1, x2, y20, y11, y02
assert mom.coeffs[("y",(2,0))][0][3] == F(1)
assert mom.coeffs[("y",(1,1))][0][4] == F(1)
assert mom.coeffs[("y",(0,2))][0][5] == F(1)
assert mom.coeffs[("y",(0,4))][5][5] == F(1)
assert mom.coeffs[("y",(1,3))][4][5] == F(1)
print("quartic printed pencil OK")

# ---- orthant rational (4.4-style) ----
p44 = P(2, {(1,1): 1})
# numerator = p*A - B
A44 = MatPoly.from_entries([
    [P(2, {(0,0): 7, (1,0): -1, (0,1): 2}), P(2, {(0,0): 5})],
    [P(2, {(0,0): 5}), P(2, {(0,0): 11, (0,1): -1})],
])
B44 = MatPoly.from_entries([
    [P(2, {(1,0): 1, (0,3): 1}), P(2, {(0,2): 1})],
    [P(2, {(0,2): 1}), P(2, {(0,1): 1})],
])
N44 = A44 * p44 - B44
R44 = RationalMatFn(N44, p44)
gs44 = [P(2, {(1,0): 1}), P(2, {(0,1): 1})]
y_idx, z_idx = qmod_index_sets(p44, 2)
print("4.4 z-index:", z_idx)
assert z_idx == [(0,0),(1,0),(0,1),(2,0),(0,2),(3,0),(0,3),(4,0),(0,4)], z_idx
assert set(y_idx) == {(0,0),(1,0),(0,1),(2,0),(1,1),(0,2)}
L44 = qmod_lift(R44, gs44, 2)
print("4.4 pencils:", [(pc.label, pc.size) for pc in L44.pencils])
matp = [pc for pc in L44.pencils if pc.label == "matrix"][0]
z10, z03, z02, z01 = ("z",(1,0)), ("z",(0,3)), ("z",(0,2)), ("z",(0,1))
assert matp.constant[0][0] == F(7) and matp.coeffs[("y",(1,0))][0][0] == F(-1) and matp.coeffs[("y",(0,1))][0][0] == F(2)
assert matp.coeffs[z10][0][0] == F(-1) and matp.coeffs[z03][0][0] == F(-1)
assert matp.constant[0][1] == F(5) and matp.coeffs[z02][0][1] == F(-1)
assert matp.coeffs[z01][1][1] == F(-1) and matp.constant[1][1] == F(11)
mom = [pc for pc in L44.pencils if pc.label == "moment"][0]
assert mom.size == 6
# printed: y-part (1,5)=1; z-part (1,1)=z00,(1,4)=z20,(2,4)=z30,(4,4)=z40,(6,6)=z04
assert mom.constant[0][4] == F(1)
assert mom.coeffs[("z",(0,0))][0][0] == F(1)
assert mom.coeffs[("z",(2,0))][0][3] == F(1)
assert mom.coeffs[("z",(3,0))][1][3] == F(1)
assert mom.coeffs[("z",(4,0))][3][3] == F(1)
assert mom.coeffs[("z",(0,4))][5][5] == F(1)
assert mom.coeffs[("y",(2,0))][3][4] == F(1)  # printed row 4: 0,0,x1,0,y20,y11
loc1 = [pc for pc in L44.pencils if pc.label.endswith("g1")][0]
assert loc1.size == 3
assert loc1.coeffs[("z",(1,0))][0][0] == F(1) and loc1.coeffs[("z",(3,0))][1][1] == F(1)
assert loc1.constant[0][2] == F(1)  # printed (1,3)=1
assert loc1.coeffs[("y",(0,1))][2][2] == F(1)  # printed (3,3)=x2
loc2 = [pc for pc in L44.pencils if pc.label.endswith("g2")][0]
assert loc2.coeffs[("z",(0,1))][0][0] == F(1) and loc2.coeffs[("z",(0,3))][2][2] == F(1)
assert loc2.constant[0][1] == F(1) and loc2.coeffs[("y",(0,1))][1][2] == F(1)
print("4.4 printed pencils OK; n_free:", L44.n_free())

# ---- plane rational (4.5-style) ----
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
R45 = RationalMatFn(N45, p45)
y_idx, z_idx = qmod_index_sets(p45, 2)
print("4.5 z-index:", z_idx)
assert z_idx == [(0,0),(1,0),(0,1),(1,1),(0,2),(1,2),(0,3),(1,3),(0,4)], z_idx
L45 = qmod_lift(R45, [], 2)
matp = [pc for pc in L45.pencils if pc.label == "matrix"][0]
z04 = ("z",(0,4))
assert matp.constant[0][0] == F(1) and matp.coeffs[("y",(2,0))][0][0] == F(-2)
assert matp.coeffs[("y",(1,1))][0][0] == F(-2) and matp.coeffs[("y",(0,2))][0][0] == F(-1)
assert matp.coeffs[z04][0][0] == F(-1)
assert matp.coeffs[("y",(2,0))][0][1] == F(1) and matp.coeffs[z04][0][1] == F(1)
assert matp.coeffs[("y",(2,0))][1][1] == F(-1) and matp.coeffs[z04][1][1] == F(-1)
mom = [pc for pc in L45.pencils if pc.label == "moment"][0]
assert mom.size == 6
# printed entry (4,4): y20 - y02 + z04 ; (2,2): 1 - z02 ... check a few
assert mom.coeffs[("y",(2,0))][3][3] == F(1) and mom.coeffs[("y",(0,2))][3][3] == F(-1)
assert mom.coeffs[("z",(0,4))][3][3] == F(1)
assert mom.constant[1][1] == F(1) and mom.coeffs[("z",(0,2))][1][1] == F(-1)
assert mom.coeffs[("z",(1,1))][0][4] == F(1)   # printed row1 z-part: z00,z10,z01,-z02,z11,z02
assert mom.coeffs[("z",(0,2))][0][3] == F(-1)
assert mom.coeffs[("z",(1,3))][3][4] == F(-1)  # printed (4,5) = -z13
print("4.5 printed pencils OK; n_free:", L45.n_free())
