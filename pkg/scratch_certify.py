"""Reading checks for certify: entrywise Hessian identity closure, uniform /
pointwise outcomes on the worked examples, exact qmod identities, searches."""
import time
from fractions import Fraction as F

import numpy as np

from pmilift.polyalg import (
    Poly, MatPoly, neg_hessian_biform, basis_exponents,
)
from pmilift.ratlift import RationalMatFn
from pmilift.certify import (
    matrix_sos_check, uniform_sos_concavity, pointwise_sos_concavity,
    qmod_certificate_search, verify_identity, linearization_gap_poly,
    matrix_identity_residual,
)


def P(nvars, terms):
    return Poly(nvars, {tuple(k): F(v) for k, v in terms.items()})


# ================= quartic planar: which G22 reading closes H1+..+H4? ========
def quartic_G(c22):
    return MatPoly.from_entries([
        [P(2, {(0, 0): 2, (4, 0): -2, (2, 2): -4, (0, 4): -2}),
         P(2, {(0, 0): 3, (3, 1): -1, (1, 3): -1})],
        [P(2, {(0, 0): 3, (3, 1): -1, (1, 3): -1}),
         P(2, {(0, 0): 5, (4, 0): -1, (2, 2): -c22, (0, 4): -1})],
    ])

# ring (x1, x2, xi1, xi2)
x1 = P(4, {(1, 0, 0, 0): 1}); x2 = P(4, {(0, 1, 0, 0): 1})
xi1 = P(4, {(0, 0, 1, 0): 1}); xi2 = P(4, {(0, 0, 0, 1): 1})
zero4 = Poly.zero(4)

v1 = xi1 * 2 * x1 + xi2 * x2
v2 = xi1 * 2 * x2 + xi2 * x1
H1 = MatPoly.from_entries([[v1 * v1 * 2, v1 * v2 * 2], [v2 * v1 * 2, v2 * v2 * 2]])
s = xi1 * xi1 + xi2 * xi2
H2 = MatPoly.from_entries([[s * x1 * x1 * 8, s * x1 * x2 * 8],
                           [s * x1 * x2 * 8, s * x2 * x2 * 8]])
M = [[xi1 * x1, xi2 * x2, xi2 * x1], [xi2 * x1, xi1 * x2, xi2 * x2]]
H3 = MatPoly.from_entries([
    [sum((M[0][k] * M[0][k] for k in range(3)), zero4) * 2,
     sum((M[0][k] * M[1][k] for k in range(3)), zero4) * 2],
    [sum((M[1][k] * M[0][k] for k in range(3)), zero4) * 2,
     sum((M[1][k] * M[1][k] for k in range(3)), zero4) * 2],
])
xtx = xi1 * x1 + xi2 * x2
common = xtx * xtx + xi2 * xi2 * x1 * x1
d1 = xi1 * xi1 * (x1 * x1 * 2 + x2 * x2 * 4)
d2 = xi1 * xi1 * (x1 * x1 * 3 + x2 * x2 * 3)
H4 = MatPoly.from_entries([[(common + d1) * 2, zero4], [zero4, (common + d2) * 2]])
Hsum = H1 + H2 + H3 + H4

for c22 in (3, 4):
    Hb = neg_hessian_biform(quartic_G(c22)).as_matpoly()
    resid = matrix_identity_residual(Hb, [Hsum])
    ok = all(not resid.entry(i, j) for i in range(2) for j in range(2))
    print(f"quartic G22 mixed coeff {c22}: identity closes = {ok}")
    if not ok:
        bad = {(i, j): dict(resid.entry(i, j).terms) for i in range(2)
               for j in range(2) if resid.entry(i, j)}
        print("   residual entries:", bad)

# ================= uniform / pointwise outcomes ==============================
t0 = time.time()
cert = uniform_sos_concavity(quartic_G(4))
print(f"quartic uniform (coeff 4): {cert.status} residual={cert.residual} "
      f"[{time.time()-t0:.2f}s]")
t0 = time.time()
cert3 = uniform_sos_concavity(quartic_G(3))
print(f"quartic uniform (coeff 3): {cert3.status} residual={cert3.residual} "
      f"[{time.time()-t0:.2f}s]")

G_choi = MatPoly.from_entries([
    [P(3, {(0, 0, 0): 2, (2, 0, 0): -1, (0, 0, 2): -2}),
     P(3, {(0, 0, 0): 1, (1, 1, 0): 1}), P(3, {(1, 0, 1): 1})],
    [P(3, {(0, 0, 0): 1, (1, 1, 0): 1}),
     P(3, {(0, 0, 0): 2, (0, 2, 0): -1, (2, 0, 0): -2}),
     P(3, {(0, 0, 0): 1, (0, 1, 1): 1})],
    [P(3, {(1, 0, 1): 1}), P(3, {(0, 0, 0): 1, (0, 1, 1): 1}),
     P(3, {(0, 0, 0): 2, (0, 0, 2): -1, (0, 2, 0): -2})],
])
t0 = time.time()
cert = uniform_sos_concavity(G_choi)
print(f"choi uniform: {cert.status} dual={cert.dual} [{time.time()-t0:.2f}s]")
cert = pointwise_sos_concavity(G_choi, [1, 1, 1])
print(f"choi pointwise (1,1,1): {cert.status} residual={cert.residual} "
      f"exact={cert.exact_grams is not None}")

Q5 = MatPoly.from_entries([
    [P(2, {(1, 1): 1, (0, 0): 2}), P(2, {(1, 1): 1}), Poly.zero(2)],
    [P(2, {(1, 1): 1}), P(2, {(1, 1): 1, (0, 0): -1}), Poly.zero(2)],
    [Poly.zero(2), Poly.zero(2), P(2, {(1, 0): 1, (0, 1): 1})],
])
cert = uniform_sos_concavity(Q5)
print(f"hyperbola uniform: {cert.status} dual={cert.dual}")
cert = pointwise_sos_concavity(Q5, [1, 0, 0])
print(f"hyperbola pointwise (1,0,0): {cert.status} dual={cert.dual}")

# ================= orthant rational: exact identity + search ================
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
q44 = R44.q_or_default()
lhs44 = linearization_gap_poly(R44, p44, q44)
print("4.4 lhs terms:", len(lhs44.terms), "deg:", lhs44.degree())

# ring (x1, x2, u1, u2, xi1, xi2)
def P6(terms):
    return P(6, terms)

sq1 = P6({(0, 0, 1, 1, 0, 1): 1, (1, 0, 0, 1, 0, 1): -1,
          (0, 1, 1, 1, 1, 0): 1, (1, 0, 0, 2, 1, 0): -1})  # u2*(...)
sq2 = P6({(0, 0, 1, 1, 1, 0): 1, (0, 1, 1, 0, 1, 0): -1})  # u1*xi1*(u2-x2)
one6 = Poly.const(6, 1)
resid = verify_identity(lhs44, [
    (P6({(0, 1, 0, 0, 0, 0): 1}), one6, ("squares", [(1, sq1)])),
    (P6({(1, 0, 0, 0, 0, 0): 1}), one6, ("squares", [(1, sq2)])),
])
print("4.4 printed identity residual zero:", not resid)
if resid:
    print("   residual:", dict(list(resid.terms.items())[:8]))

t0 = time.time()
cert44 = qmod_certificate_search(R44, gs44, p44, q44, t=2)
print(f"4.4 qmod t=2: {cert44.status} d={cert44.degree} "
      f"residual={cert44.residual} [{time.time()-t0:.1f}s] {cert44.detail}")

# ================= plane rational: exact identity + search ==================
p45 = P(2, {(2, 0): 1, (0, 2): 1})
A45 = MatPoly.from_entries([
    [P(2, {(0, 0): 1, (2, 0): -2, (1, 1): -2, (0, 2): -1}), P(2, {(2, 0): 1})],
    [P(2, {(2, 0): 1}), P(2, {(0, 0): 1, (2, 0): -1})],
])
E45 = MatPoly.from_entries([
    [P(2, {(0, 4): -1}), P(2, {(0, 4): 1})],
    [P(2, {(0, 4): 1}), P(2, {(0, 4): -1})],
])
R45 = RationalMatFn(A45 * p45 + E45, p45)
q45 = R45.q_or_default()
lhs45 = linearization_gap_poly(R45, p45, q45)
print("4.5 lhs terms:", len(lhs45.terms), "deg:", lhs45.degree())

fs = [
    (1, {(0, 2, 1, 1, 0, 0): -1, (2, 0, 1, 1, 0, 0): -1,
         (0, 1, 1, 2, 0, 0): 1, (1, 0, 2, 1, 0, 0): 1}),
    (1, {(0, 2, 1, 1, 0, 0): -1, (2, 0, 1, 1, 0, 0): 1,
         (0, 1, 1, 2, 0, 0): 1, (1, 0, 2, 1, 0, 0): -1}),
    (F(1, 2), {(1, 1, 0, 2, 0, 0): -1, (1, 0, 0, 3, 0, 0): 1,
               (1, 1, 2, 0, 0, 0): -1, (0, 1, 3, 0, 0, 0): 1}),
    (F(1, 2), {(1, 1, 0, 2, 0, 0): 1, (1, 0, 0, 3, 0, 0): -1,
               (1, 1, 2, 0, 0, 0): -1, (0, 1, 3, 0, 0, 0): 1}),
    (F(1, 2), {(0, 2, 0, 2, 0, 0): 1, (0, 1, 0, 3, 0, 0): -1,
               (2, 0, 2, 0, 0, 0): -1, (1, 0, 3, 0, 0, 0): 1}),
    (F(1, 2), {(0, 2, 0, 2, 0, 0): -1, (0, 1, 0, 3, 0, 0): 1,
               (2, 0, 2, 0, 0, 0): -1, (1, 0, 3, 0, 0, 0): 1}),
    (1, {(1, 1, 1, 1, 0, 0): -2, (1, 0, 1, 2, 0, 0): 1, (0, 1, 2, 1, 0, 0): 1}),
    (1, {(2, 0, 0, 2, 0, 0): 1, (0, 2, 2, 0, 0, 0): -1}),
    (1, {(1, 0, 1, 2, 0, 0): -1, (0, 1, 2, 1, 0, 0): 1}),
]
xi_diff = P6({(0, 0, 0, 0, 1, 0): 1, (0, 0, 0, 0, 0, 1): -1})
squares = [(c, P6(t) * xi_diff) for c, t in fs]
xvars = [P6({(1, 0, 0, 0, 0, 0): 1}), P6({(0, 1, 0, 0, 0, 0): 1})]
uvars = [P6({(0, 0, 1, 0, 0, 0): 1}), P6({(0, 0, 0, 1, 0, 0): 1})]
xi1_6 = P6({(0, 0, 0, 0, 1, 0): 1})
# second term: ||x||^2 ||u||^4 (x1+x2-u1-u2)^2 xi1^2 as explicit squares
lin45 = xvars[0] + xvars[1] - uvars[0] - uvars[1]
for i in range(2):
    for j in range(2):
        for k in range(2):
            squares.append((1, xvars[i] * uvars[j] * uvars[k] * lin45 * xi1_6))
resid = verify_identity(lhs45, [(one6, one6, ("squares", squares))])
print("4.5 corrected identity residual zero:", not resid)
if resid:
    print("   residual terms:", len(resid.terms), dict(list(resid.terms.items())[:6]))

t0 = time.time()
cert45 = qmod_certificate_search(R45, [], p45, q45, t=3)
print(f"4.5 qmod t=3: {cert45.status} d={cert45.degree} "
      f"residual={cert45.residual} [{time.time()-t0:.1f}s] {cert45.detail}")
