"""Trace the IPM on one failing planted instance."""
import numpy as np

from pmilift import sdpcore
from pmilift.sdpcore import plant_lmi_instance, _standard_data, solve_standard, SolverOptions

rng = np.random.default_rng(7)
nvar = int(rng.integers(2, 30))
dims = []
while sum(n * (n + 1) // 2 for n in dims) < nvar:
    dims.append(int(rng.integers(2, 9)))
print("nvar", nvar, "dims", dims)
prog, w_star, val = plant_lmi_instance(rng, nvar, dims)

# monkeypatch a trace into solve_standard by running a copy with prints
import pmilift.sdpcore as core

sdims, Cs, data, b, blocks = _standard_data(prog)

# manual loop replicating solve_standard with tracing
import scipy.linalg as sla

nv = len(b)
bl_objs = [core._Block(n, C, *dat, nvar=nv) for n, C, dat in zip(sdims, Cs, data)]
Ntot = sum(sdims)
Xs = [np.eye(bl.n) for bl in bl_objs]
Ss = [np.eye(bl.n) for bl in bl_objs]
y = np.zeros(nv)
tau = kappa = 1.0
norm_b = float(np.linalg.norm(b))
norm_C = np.sqrt(sum(float(np.sum(bl.C * bl.C)) for bl in bl_objs))

def A_apply(Ms):
    out = np.zeros(nv)
    for bl, M in zip(bl_objs, Ms):
        out += bl.apply(M)
    return out

def inner_C(Ms):
    return sum(float(np.sum(bl.C * M)) for bl, M in zip(bl_objs, Ms))

for it in range(1, 31):
    rp = A_apply(Xs) - b * tau
    Rd = [-bl.adjoint(y) + bl.C * tau - S for bl, S in zip(bl_objs, Ss)]
    cx = inner_C(Xs)
    by = float(b @ y)
    rg = by - cx - kappa
    xs_dot = sum(float(np.sum(X * S)) for X, S in zip(Xs, Ss))
    mu = (xs_dot + tau * kappa) / (Ntot + 1)
    pres = float(np.linalg.norm(rp / tau)) / (1 + norm_b)
    dres = np.sqrt(sum(float(np.sum((R / tau) ** 2)) for R in Rd)) / (1 + norm_C)
    gap = (xs_dot / tau**2) / (1 + abs(cx / tau) + abs(by / tau))
    print(f"it {it:2d} mu {mu:9.2e} tau {tau:8.2e} kappa {kappa:8.2e} pres {pres:.2e} dres {dres:.2e} gap {gap:.2e}")
    if pres < 1e-8 and dres < 1e-8 and gap < 1e-8:
        print("CONVERGED, pobj", cx / tau, "dobj", by / tau, "planted", val)
        break

    Gs, Ginvs, Ws, lams, Lxs = [], [], [], [], []
    for X, S in zip(Xs, Ss):
        Lx = np.linalg.cholesky(X)
        Ls = np.linalg.cholesky(S)
        U, lam, Vt = np.linalg.svd(Ls.T @ Lx)
        G = (Lx @ Vt.T) / np.sqrt(lam)
        Ginv = (np.sqrt(lam)[:, None] * Vt) @ sla.solve_triangular(Lx, np.eye(Lx.shape[0]), lower=True)
        Gs.append(G); Ginvs.append(Ginv); Ws.append(G @ G.T); lams.append(lam); Lxs.append(Lx)

    M = np.zeros((nv, nv))
    for bl, W in zip(bl_objs, Ws):
        bl.schur(W, M)
    WCW = [W @ bl.C @ W for bl, W in zip(bl_objs, Ws)]
    w_vec = A_apply(WCW)
    u_vec = w_vec + b
    v_vec = b - w_vec
    cWc = sum(float(np.sum(bl.C * T)) for bl, T in zip(bl_objs, WCW))
    delta = cWc + kappa / tau
    cho = sla.cho_factor(M, lower=True)
    WRdW = [W @ R @ W for W, R in zip(Ws, Rd)]
    AWRdW = A_apply(WRdW)
    cWRd = sum(float(np.sum(T * R)) for T, R in zip(WCW, Rd))

    def direction(eta, sigma, corr, corr_tk):
        if corr is None:
            R2 = [-X for X in Xs]
        else:
            R2 = []
            for G, lam, Pc in zip(Gs, lams, corr):
                D = -np.diag(lam**2) + sigma * mu * np.eye(len(lam)) - Pc
                K = 2.0 / np.add.outer(lam, lam)
                R2.append(G @ (D * K) @ G.T)
        r1 = -eta * rp - A_apply(R2) + eta * AWRdW
        r2 = -eta * rg + inner_C(R2) - eta * cWRd + (sigma * mu - tau * kappa - corr_tk) / tau
        t1 = sla.cho_solve(cho, r1)
        t2 = sla.cho_solve(cho, u_vec)
        denom = delta + float(v_vec @ t2)
        dtau = (r2 - float(v_vec @ t1)) / denom
        dy = t1 + t2 * dtau
        dSs = [-bl.adjoint(dy) + bl.C * dtau + eta * R for bl, R in zip(bl_objs, Rd)]
        dXs = [R2b - W @ dS @ W for R2b, W, dS in zip(R2, Ws, dSs)]
        dXs = [(D + D.T) / 2 for D in dXs]
        dSs = [(D + D.T) / 2 for D in dSs]
        dkappa = (sigma * mu - tau * kappa - corr_tk - kappa * dtau) / tau
        return dXs, dy, dSs, dtau, dkappa

    def check(dXs, dy, dSs, dtau, dkappa, eta, tag):
        e1 = np.linalg.norm(A_apply(dXs) - b * dtau + eta * rp)
        e3 = abs(float(b @ dy) - inner_C(dXs) - dkappa + eta * rg)
        print(f"   {tag}: |primal eq| {e1:.2e}  |gap eq| {e3:.2e}")

    dXa, dya, dSa, dtaua, dkappaa = direction(1.0, 0.0, None, 0.0)
    if it <= 2:
        check(dXa, dya, dSa, dtaua, dkappaa, 1.0, "aff")

    def step_bound(dXs, dSs, dtau, dkappa):
        a = np.inf
        for X, S, dX, dS, Lx in zip(Xs, Ss, dXs, dSs, Lxs):
            a = min(a, core._max_step(Lx, dX))
            Ls = np.linalg.cholesky(S)
            a = min(a, core._max_step(Ls, dS))
        if dtau < 0:
            a = min(a, -tau / dtau)
        if dkappa < 0:
            a = min(a, -kappa / dkappa)
        return a

    amax = step_bound(dXa, dSa, dtaua, dkappaa)
    a_aff = min(1.0, 0.98 * amax)
    mu_aff = (sum(float(np.sum((X + a_aff * dX) * (S + a_aff * dS))) for X, S, dX, dS in zip(Xs, Ss, dXa, dSa))
              + (tau + a_aff * dtaua) * (kappa + a_aff * dkappaa)) / (Ntot + 1)
    sigma = min(0.99999, max(1e-8, (max(mu_aff, 0.0) / mu) ** 3))
    corr = []
    for G, Ginv, dX, dS in zip(Gs, Ginvs, dXa, dSa):
        dxh = Ginv @ dX @ Ginv.T
        dsh = G.T @ dS @ G
        corr.append((dxh @ dsh + dsh @ dxh) / 2)
    corr_tk = dtaua * dkappaa
    dX, dy, dS, dtau, dkappa = direction(1.0 - sigma, sigma, corr, corr_tk)
    amax = step_bound(dX, dS, dtau, dkappa)
    alpha = min(1.0, 0.98 * amax)
    print(f"   a_aff {a_aff:.3f} sigma {sigma:.3e} alpha {alpha:.3f}")
    Xs = [(X + alpha * D) for X, D in zip(Xs, dX)]
    Ss = [(S + alpha * D) for S, D in zip(Ss, dS)]
    Xs = [(X + X.T) / 2 for X in Xs]
    Ss = [(S + S.T) / 2 for S in Ss]
    y = y + alpha * dy
    tau += alpha * dtau
    kappa += alpha * dkappa
