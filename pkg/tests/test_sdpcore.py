"""Interior-point engine, feasibility oracle, planted instances."""

import math

import numpy as np
import pytest

from pmilift.momlift import moment_lift
from pmilift.polyalg import MatPoly, Poly
from pmilift.sdpcore import (
    EPS_FEAS,
    ConicProgram,
    FeasibilityOracle,
    PencilBlock,
    SolverOptions,
    Status,
    coordinate_values,
    feasibility,
    kkt_residuals,
    optimize_linear,
    plant_lmi_instance,
    solve,
    solve_standard,
)
from pmilift.ratlift import qmod_lift

from conftest import P, orthant_rational, quartic_matrix


# -- planted instances ---------------------------------------------------------

def test_planted_instances_recovered():
    rng = np.random.default_rng(7)
    for trial in range(8):
        nvar = int(rng.integers(2, 30))
        dims = []
        while sum(n * (n + 1) // 2 for n in dims) < nvar:
            dims.append(int(rng.integers(2, 9)))
        prog, w_star, val = plant_lmi_instance(rng, nvar, dims)
        sol = solve(prog)
        assert sol.status is Status.OPTIMAL, (trial, sol.status)
        assert abs(sol.objective - val) / (1 + abs(val)) <= 1e-6
        kk = kkt_residuals(prog, sol)
        assert set(kk) == {"primal_eig", "stationarity", "comp_gap"}
        assert max(kk.values()) <= 1e-7, (trial, kk)


def test_plant_needs_enough_block_freedom():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        plant_lmi_instance(rng, 10, [2])


# -- infeasible / unbounded detection --------------------------------------------

def _scalar_block(constant, coeff):
    return PencilBlock(
        1, np.array([[float(constant)]]), np.array([0]),
        np.zeros(1, np.intp), np.zeros(1, np.intp), np.array([float(coeff)]),
    )


def test_infeasible_program_certified():
    # w >= 1 and -w >= 1 cannot hold together
    prog = ConicProgram(1, np.array([1.0]), [
        _scalar_block(-1.0, 1.0), _scalar_block(-1.0, -1.0),
    ])
    sol = solve(prog)
    assert sol.status is Status.INFEASIBLE
    assert sol.certificate and "farkas_blocks" in sol.certificate


def test_unbounded_program_certified():
    # minimize -w subject to w >= 0
    prog = ConicProgram(1, np.array([-1.0]), [_scalar_block(0.0, 1.0)])
    sol = solve(prog)
    assert sol.status is Status.UNBOUNDED
    assert sol.certificate and "ray_w" in sol.certificate


def test_variable_bounds():
    prog = ConicProgram(1, np.array([1.0]), [_scalar_block(0.0, 0.0)],
                        bounds=[(-3.0, 5.0)])
    sol = solve(prog)
    assert sol.status is Status.OPTIMAL
    assert abs(sol.x[0] + 3) < 1e-6


def test_kkt_requires_optimal():
    prog = ConicProgram(1, np.array([-1.0]), [_scalar_block(0.0, 1.0)])
    sol = solve(prog)
    with pytest.raises(ValueError):
        kkt_residuals(prog, sol)


# -- standard form ----------------------------------------------------------------

def test_standard_form_diagonal_target():
    # min tr(W) s.t. W11 = 1, W22 = 2, W12 + W21 = 0
    ks = np.array([0, 1, 2, 2])
    rs = np.array([0, 1, 0, 1])
    cs = np.array([0, 1, 1, 0])
    vs = np.array([1.0, 1.0, 1.0, 1.0])
    r = solve_standard([2], [np.eye(2)], [(ks, rs, cs, vs)], np.array([1.0, 2.0, 0.0]))
    assert r.status is Status.OPTIMAL
    assert np.allclose(r.Xs[0], np.diag([1.0, 2.0]), atol=1e-6)
    assert abs(r.pobj - 3.0) < 1e-6


def test_standard_form_infeasible():
    one = (np.array([0]), np.array([0]), np.array([0]), np.array([1.0]))
    r = solve_standard([1], [np.eye(1)], [one], np.array([-1.0]))
    assert r.status is Status.INFEASIBLE


def test_standard_form_band_separation():
    # min x s.t. x = 2 with unreachable tolerances: the duality bracket
    # clears the (-1, 1) band long before convergence
    one = (np.array([0]), np.array([0]), np.array([0]), np.array([1.0]))
    opts = SolverOptions(tol_gap=1e-300, tol_feas=1e-300, max_iter=50)
    r = solve_standard([1], [np.eye(1)], [one], np.array([2.0]), opts,
                       band=(-1.0, 1.0))
    assert r.status is Status.SEPARATED
    assert r.pobj > 1.0 and r.dobj > 1.0


# -- lifted optimization -------------------------------------------------------------

def test_unit_disk_support():
    G = MatPoly.from_entries([[P(2, {(0, 0): 1, (2, 0): -1, (0, 2): -1})]])
    lmi = moment_lift(G)
    sol = optimize_linear(lmi, [1.0, 0.0])
    assert sol.status is Status.OPTIMAL
    assert abs(sol.objective + 1.0) <= 1e-6
    xy = coordinate_values(lmi, sol)
    assert abs(xy[0] + 1.0) <= 1e-5 and abs(xy[1]) <= 1e-5

    top = optimize_linear(lmi, [0.0, 1.0], sense="max")
    assert abs(top.objective - 1.0) <= 1e-6


def test_optimize_dimension_mismatch():
    lmi = moment_lift(quartic_matrix())
    with pytest.raises(ValueError):
        optimize_linear(lmi, [1.0, 0.0, 0.0])


# -- feasibility oracle ----------------------------------------------------------------

def test_oracle_verdicts_on_quartic():
    lmi = moment_lift(quartic_matrix())
    oracle = FeasibilityOracle(lmi)
    inside = oracle.query((0.0, 0.0))
    assert inside.verdict == "In" and inside.t_star >= -EPS_FEAS
    outside = oracle.query((2.0, 0.0))
    assert outside.verdict == "Out" and outside.t_star < -1e-5


def test_oracle_band_exit_observed():
    # deep outside points should settle by bracket separation, not full
    # convergence
    lmi = moment_lift(quartic_matrix())
    oracle = FeasibilityOracle(lmi)
    statuses = [oracle.query(pt).solution.status
                for pt in ((2.0, 0.0), (-2.0, 0.0), (1.5, 1.5))]
    assert all(s in (Status.SEPARATED, Status.OPTIMAL) for s in statuses)
    assert Status.SEPARATED in statuses


def test_witness_shortcut():
    lmi = moment_lift(quartic_matrix())
    oracle = FeasibilityOracle(lmi)
    assert oracle.witness((0.0, 0.0)) >= -EPS_FEAS
    assert oracle.witness((2.0, 0.0)) < -1e-3

    R, gs = orthant_rational()
    rat = FeasibilityOracle(qmod_lift(R, gs, 2))
    assert rat.witness((0.0, 1.0)) == -math.inf  # denominator pole
    assert rat.witness((1.0, 1.0)) >= -EPS_FEAS


def test_feasibility_convenience_wrapper():
    lmi = moment_lift(quartic_matrix())
    res = feasibility(lmi, (0.0, 0.0))
    assert res.verdict == "In"
    assert res.solution is not None
