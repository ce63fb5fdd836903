"""Smoke: interior-point engine on planted, infeasible, and unbounded programs."""
import time

import numpy as np

from pmilift import sdpcore
from pmilift.sdpcore import (
    ConicProgram, PencilBlock, SolverOptions, Status, plant_lmi_instance, solve,
    solve_standard, kkt_residuals,
)

rng = np.random.default_rng(7)

# planted instances
worst_obj, worst_kkt, tmax = 0.0, 0.0, 0.0
for trial in range(12):
    nvar = int(rng.integers(2, 30))
    dims = []
    while sum(n * (n + 1) // 2 for n in dims) < nvar:
        dims.append(int(rng.integers(2, 9)))
    prog, w_star, val = plant_lmi_instance(rng, nvar, dims)
    t0 = time.perf_counter()
    sol = solve(prog)
    dt = time.perf_counter() - t0
    assert sol.status is Status.OPTIMAL, (trial, sol.status, nvar, dims)
    err = abs(sol.objective - val) / (1 + abs(val))
    kk = kkt_residuals(prog, sol)
    worst_obj = max(worst_obj, err)
    worst_kkt = max(worst_kkt, max(kk.values()))
    tmax = max(tmax, dt)
print(f"planted: worst obj err {worst_obj:.2e}, worst kkt {worst_kkt:.2e}, slowest {tmax*1e3:.1f} ms")

# infeasible: w*0 >= 1 and -w0 - 1 >= 0 simultaneously
blocks = [
    PencilBlock(1, np.array([[-1.0]]), np.array([0]), np.zeros(1, np.intp), np.zeros(1, np.intp), np.ones(1)),
    PencilBlock(1, np.array([[-1.0]]), np.array([0]), np.zeros(1, np.intp), np.zeros(1, np.intp), -np.ones(1)),
]
prog = ConicProgram(1, np.array([1.0]), blocks)
sol = solve(prog)
print("infeasible program ->", sol.status, "iters", sol.iterations)
assert sol.status is Status.INFEASIBLE, sol.status

# unbounded: minimize -w0 s.t. w0 >= 0
blocks = [PencilBlock(1, np.array([[0.0]]), np.array([0]), np.zeros(1, np.intp), np.zeros(1, np.intp), np.ones(1))]
prog = ConicProgram(1, np.array([-1.0]), blocks)
sol = solve(prog)
print("unbounded program ->", sol.status, "iters", sol.iterations)
assert sol.status is Status.UNBOUNDED, sol.status

# bounds field: minimize w0 with w0 in [-3, 5] and trivial PSD block
blocks = [PencilBlock(1, np.array([[1.0]]), np.array([0]), np.zeros(1, np.intp), np.zeros(1, np.intp), np.zeros(1))]
prog = ConicProgram(1, np.array([1.0]), blocks, bounds=[(-3.0, 5.0)])
sol = solve(prog)
assert sol.status is Status.OPTIMAL and abs(sol.x[0] + 3) < 1e-6, (sol.status, sol.x)
print("bounds OK:", sol.x[0])

# standard-form Gram-style: min tr(W) s.t. W11=1, W22=2, W12+W21=0 -> X=diag(1,2)
ks = np.array([0, 1, 2, 2])
rs = np.array([0, 1, 0, 1])
cs = np.array([0, 1, 1, 0])
vs = np.array([1.0, 1.0, 1.0, 1.0])
r = solve_standard([2], [np.eye(2)], [(ks, rs, cs, vs)], np.array([1.0, 2.0, 0.0]))
assert r.status is Status.OPTIMAL
assert np.allclose(r.Xs[0], np.diag([1.0, 2.0]), atol=1e-6), r.Xs[0]
print("standard form OK, pobj", r.pobj)

# standard-form infeasible: W11 = -1
r = solve_standard([1], [np.eye(1)], [(np.array([0]), np.array([0]), np.array([0]), np.array([1.0]))], np.array([-1.0]))
print("standard infeasible ->", r.status)
assert r.status is Status.INFEASIBLE
