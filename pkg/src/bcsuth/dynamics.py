"""Hamiltonian flows in both charts, FD Poisson brackets, conservation monitors.

The integrator is the implicit midpoint rule (symplectic, second order) with
Newton inner iterations; gradients are analytic where available (the physical
Sutherland Hamiltonian) and central finite differences elsewhere.

Chart conventions: in the (q, p) chart the equations are the canonical
qdot = dH/dp, pdot = -dH/dq.  In the (lambda, theta) chart the equations are

    lambdadot = DUAL_PAIRING * dH/dtheta,
    thetadot  = -DUAL_PAIRING * dH/dlambda,

with DUAL_PAIRING = -2 the measured pullback constant of the duality maps
(see :mod:`bcsuth.duality`); these are exactly the equations whose flows are
carried to Sutherland-chart flows by the backward map.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .duality import DUAL_PAIRING, backward_map_full, forward_map_full
from .errors import BoundaryApproachError, NonConvergenceError
from .params import (CouplingParams, DualPoint, SutherlandPoint,
                     domain_membership)
from .rsvd import dual_H0
from .sutherland import action_map, closed_form_H1, grad_H1, hamiltonians

SYSTEMS = ("sutherland_H1", "sutherland_Hk", "dual_H0", "dual_Hk")
CHARTS = ("qp", "lambda_theta")


@dataclass(frozen=True)
class FlowSpec:
    """Which Hamiltonian to integrate, in which chart, and how."""

    system: str
    chart: str
    dt: float
    T: float
    k: int = 1
    gradient: str = "analytic"
    fd_step: float = 1e-6
    monitor_stride: int = 10
    boundary_margin: float = 1e-6
    monitors: tuple = ()

    def __post_init__(self):
        if self.system not in SYSTEMS:
            raise ValueError(f"unknown system {self.system!r}; expected one of {SYSTEMS}")
        if self.chart not in CHARTS:
            raise ValueError(f"unknown chart {self.chart!r}; expected one of {CHARTS}")
        if not (self.dt > 0 and self.T > 0 and self.dt < self.T):
            raise ValueError("need 0 < dt < T")
        if self.gradient not in ("analytic", "fd"):
            raise ValueError("gradient mode must be 'analytic' or 'fd'")
        if self.gradient == "analytic" and self.system != "sutherland_H1":
            raise ValueError(
                "analytic gradients exist only for sutherland_H1; "
                "use gradient='fd' for the other systems")
        if self.system in ("sutherland_Hk", "dual_Hk") and self.k < 1:
            raise ValueError("k must be >= 1")

    def to_dict(self):
        return {
            "system": self.system, "chart": self.chart, "dt": self.dt,
            "T": self.T, "k": self.k, "gradient": self.gradient,
            "fd_step": self.fd_step, "monitor_stride": self.monitor_stride,
            "boundary_margin": self.boundary_margin,
            "monitors": list(self.monitors),
        }


@dataclass
class Trajectory:
    """Times, chart-tagged states and sampled monitor series."""

    times: np.ndarray
    states: np.ndarray
    chart: str
    monitor_times: np.ndarray
    monitors: dict
    flow: FlowSpec
    params: CouplingParams

    def state_points(self):
        n = self.states.shape[1] // 2
        if self.chart == "qp":
            return [SutherlandPoint(q=s[:n], p=s[n:]) for s in self.states]
        return [DualPoint(lam=s[:n], theta=s[n:]) for s in self.states]

    def write_csv(self, path):
        """CSV rows t, state components, monitors; JSON header line with the flow settings."""
        n = self.states.shape[1] // 2
        if self.chart == "qp":
            cols = [f"q{i+1}" for i in range(n)] + [f"p{i+1}" for i in range(n)]
        else:
            cols = [f"lambda{i+1}" for i in range(n)] + [f"theta{i+1}" for i in range(n)]
        mon_names = sorted(self.monitors)
        header_meta = {"flow": self.flow.to_dict(), "params": self.params.to_dict()}
        with open(path, "w") as fh:
            fh.write("# " + json.dumps(header_meta, sort_keys=True) + "\n")
            fh.write(",".join(["t"] + cols + mon_names) + "\n")
            mon_lookup = {t: i for i, t in enumerate(self.monitor_times)}
            for i, t in enumerate(self.times):
                row = [repr(float(t))] + [repr(float(v)) for v in self.states[i]]
                if t in mon_lookup:
                    j = mon_lookup[t]
                    row += [repr(float(self.monitors[mname][j])) for mname in mon_names]
                else:
                    row += [""] * len(mon_names)
                fh.write(",".join(row) + "\n")


def fd_gradient(fn, x, step: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = step
        g[j] = (fn(x + e) - fn(x - e)) / (2.0 * step)
    return g


def hamiltonian_function(flow: FlowSpec, params: CouplingParams):
    """Scalar Hamiltonian x -> H(x) in the flow's chart coordinates."""
    n = params.n
    if flow.chart == "qp":
        if flow.system == "sutherland_H1":
            return lambda x: closed_form_H1(SutherlandPoint(q=x[:n], p=x[n:]), params)
        if flow.system == "sutherland_Hk":
            k = flow.k
            return lambda x: float(
                hamiltonians(SutherlandPoint(q=x[:n], p=x[n:]), params, kmax=k)[k - 1])
        raise ValueError(f"system {flow.system} is not defined in the qp chart")
    if flow.system == "dual_H0":
        return lambda x: dual_H0(DualPoint(lam=x[:n], theta=x[n:]), params,
                                 validate=False)
    if flow.system == "dual_Hk":
        # dual Hamiltonians restricted to the angle chart, via the global Lax matrix
        from .params import z_from_angles
        from .rsvd import dual_Hk

        k = flow.k

        def H(x):
            dp = DualPoint(lam=x[:n], theta=x[n:])
            z = z_from_angles(dp, params).z
            return float(dual_Hk(z, params, kmax=k)[k - 1])

        return H
    raise ValueError(f"system {flow.system} is not defined in the lambda_theta chart")


def vector_field(flow: FlowSpec, params: CouplingParams):
    """Canonical vector field of the flow's Hamiltonian in its chart."""
    n = params.n
    H = hamiltonian_function(flow, params)

    if flow.chart == "qp" and flow.system == "sutherland_H1" \
            and flow.gradient == "analytic":
        def f(x):
            pt = SutherlandPoint(q=x[:n], p=x[n:])
            dq, dp = grad_H1(pt, params)
            return np.r_[dp, -dq]
        return f

    def grad(x):
        return fd_gradient(H, x, flow.fd_step)

    if flow.chart == "qp":
        def f(x):
            g = grad(x)
            return np.r_[g[n:], -g[:n]]
        return f

    def f(x):
        g = grad(x)
        return np.r_[DUAL_PAIRING * g[n:], -DUAL_PAIRING * g[:n]]
    return f


def implicit_midpoint_step(f, x0, dt, newton_tol: float = 1e-13,
                           max_iter: int = 50, jac_step: float = 1e-7):
    """One implicit-midpoint step solved by Newton with an FD Jacobian.

    A few fixed-point sweeps refine the Euler predictor first; Newton then
    polishes the residual x1 - x0 - dt f((x0 + x1)/2) below ``newton_tol``.
    A stall strictly below 1e-10 is accepted (the attainable floor when f is
    itself a finite-difference field); anything worse raises.
    """
    x0 = np.asarray(x0, dtype=float)
    dim = x0.size
    x1 = x0 + dt * f(x0)
    for _ in range(4):
        x1 = x0 + dt * f(0.5 * (x0 + x1))
    Jg = None
    best = np.inf
    for _ in range(max_iter):
        mid = 0.5 * (x0 + x1)
        F = x1 - x0 - dt * f(mid)
        nrm = float(np.linalg.norm(F))
        if nrm <= newton_tol * max(1.0, float(np.linalg.norm(x1))):
            return x1
        if nrm >= 0.9 * best:
            if nrm <= 1e-10:
                return x1
            break
        best = nrm
        if Jg is None:
            Jf = np.zeros((dim, dim))
            for j in range(dim):
                e = np.zeros(dim)
                e[j] = jac_step
                Jf[:, j] = (f(mid + e) - f(mid - e)) / (2.0 * jac_step)
            Jg = np.eye(dim) - 0.5 * dt * Jf
        x1 = x1 - np.linalg.solve(Jg, F)
    raise NonConvergenceError(
        f"implicit midpoint Newton stalled at residual {np.linalg.norm(F):.3e}")


def _check_boundary(x, chart, params, margin):
    n = params.n
    if chart == "qp":
        status = domain_membership(SutherlandPoint(q=x[:n], p=x[n:]), params, margin)
    else:
        status = domain_membership(DualPoint(lam=x[:n], theta=x[n:]), params, margin)
    return status


def default_monitors(flow: FlowSpec, params: CouplingParams) -> dict:
    """Monitor callables keyed by column name, chosen per chart.

    qp chart: every H_k and every action component; lambda_theta chart: the
    flow Hamiltonian and the dual actions q_j recovered by the backward map.
    """
    n = params.n
    H = hamiltonian_function(flow, params)
    mons = {"H_flow": lambda x: float(H(x))}
    if flow.chart == "qp":
        for k in range(1, n + 1):
            mons[f"H{k}"] = (lambda kk: lambda x: float(
                hamiltonians(SutherlandPoint(q=x[:n], p=x[n:]), params)[kk - 1]))(k)
        for j in range(n):
            mons[f"lambda{j+1}"] = (lambda jj: lambda x: float(
                action_map(SutherlandPoint(q=x[:n], p=x[n:]), params)[jj]))(j)
    else:
        for j in range(n):
            def make(jj):
                def mon(x):
                    pt, _ = backward_map_full(
                        DualPoint(lam=x[:n], theta=x[n:]), params, validate=False)
                    return float(pt.q[jj])
                return mon
            mons[f"q{j+1}"] = make(j)
    return mons


def integrate(flow: FlowSpec, x0, params: CouplingParams) -> Trajectory:
    """Integrate the flow from x0, sampling monitors every ``monitor_stride`` steps.

    Aborts with BoundaryApproachError (carrying the truncated trajectory) if
    the state comes within ``boundary_margin`` of a chamber wall.
    """
    x0 = np.asarray(x0, dtype=float)
    nsteps = int(round(flow.T / flow.dt))
    f = vector_field(flow, params)
    monitors = default_monitors(flow, params)
    if flow.monitors:
        monitors = {k: v for k, v in monitors.items() if k in flow.monitors}

    states = np.empty((nsteps + 1, x0.size))
    states[0] = x0
    times = flow.dt * np.arange(nsteps + 1)
    mon_idx = [0]
    mon_vals = {name: [fn(x0)] for name, fn in monitors.items()}

    x = x0
    for step in range(1, nsteps + 1):
        x = implicit_midpoint_step(f, x, flow.dt)
        states[step] = x
        if _check_boundary(x, flow.chart, params, flow.boundary_margin) != "inside":
            partial = Trajectory(
                times=times[: step + 1], states=states[: step + 1],
                chart=flow.chart,
                monitor_times=times[np.asarray(mon_idx, dtype=int)],
                monitors={k: np.asarray(v) for k, v in mon_vals.items()},
                flow=flow, params=params)
            raise BoundaryApproachError(
                f"state approached a domain wall at t = {times[step]!r}",
                partial=partial)
        if step % flow.monitor_stride == 0 or step == nsteps:
            mon_idx.append(step)
            for name, fn in monitors.items():
                mon_vals[name].append(fn(x))
    return Trajectory(
        times=times, states=states, chart=flow.chart,
        monitor_times=times[np.asarray(mon_idx, dtype=int)],
        monitors={k: np.asarray(v) for k, v in mon_vals.items()},
        flow=flow, params=params)


def poisson_bracket_fd(fa, fb, x, step: float = 1e-5,
                       richardson: bool = False) -> float:
    """{fa, fb} at x by central differences in canonical coordinates.

    x is ordered (positions, momenta).  With ``richardson`` the two-step
    extrapolation (4 D(h/2) - D(h))/3 is applied to each gradient.
    """
    x = np.asarray(x, dtype=float)
    m = x.size // 2

    def grad(fn, h):
        return fd_gradient(fn, x, h)

    ga = grad(fa, step)
    gb = grad(fb, step)
    if richardson:
        ga = (4.0 * grad(fa, step / 2.0) - ga) / 3.0
        gb = (4.0 * grad(fb, step / 2.0) - gb) / 3.0
    return float(ga[:m] @ gb[m:] - ga[m:] @ gb[:m])


def angle_linearity_check(traj: Trajectory, params: CouplingParams,
                          fd_step: float = 1e-5) -> dict:
    """Linearity of the image angles along a Sutherland-chart trajectory.

    Maps every sampled state through the forward map, unwraps theta(t), fits a
    line per component, and compares the slopes with the finite-difference
    energy derivative dH/dlambda at the (constant) action vector, as well as
    with its duality-calibrated value -DUAL_PAIRING * dH/dlambda.  Also
    reports the action drift and flags too-coarse sampling (unwrap hazard).
    """
    if traj.chart != "qp":
        raise ValueError("angle linearity is measured on qp-chart trajectories")
    n = params.n
    stride = max(1, traj.flow.monitor_stride)
    idx = np.arange(0, traj.times.size, stride)
    ts = traj.times[idx]
    lams = np.empty((idx.size, n))
    thetas = np.empty((idx.size, n))
    for row, i in enumerate(idx):
        s = traj.states[i]
        dual, _ = forward_map_full(
            SutherlandPoint(q=s[:n], p=s[n:]), params, validate=False)
        lams[row] = dual.lam
        thetas[row] = dual.theta
    thetas = np.unwrap(thetas, axis=0)

    slopes = np.empty(n)
    fit_residuals = np.empty(n)
    for j in range(n):
        coef = np.polyfit(ts, thetas[:, j], 1)
        slopes[j] = coef[0]
        fit = np.polyval(coef, ts)
        fit_residuals[j] = float(np.max(np.abs(fit - thetas[:, j])))

    lam0 = lams[0]
    theta0 = thetas[0] % (2.0 * np.pi)
    flow_H = hamiltonian_function(traj.flow, params)

    def energy_at(lam):
        pt, _ = backward_map_full(DualPoint(lam=lam, theta=theta0), params,
                                  validate=False)
        return flow_H(np.r_[pt.q, pt.p])

    dHdlam = np.empty(n)
    for j in range(n):
        e = np.zeros(n)
        e[j] = fd_step
        dHdlam[j] = (energy_at(lam0 + e) - energy_at(lam0 - e)) / (2.0 * fd_step)

    sample_dt = float(ts[1] - ts[0]) if ts.size > 1 else float(traj.flow.dt)
    unwrap_hazard = bool(sample_dt * float(np.max(np.abs(slopes))) > np.pi)
    return {
        "slopes": slopes,
        "dH_dlambda": dHdlam,
        "slope_error_vs_dH": np.abs(slopes - dHdlam),
        "slope_error_calibrated": np.abs(slopes - (-DUAL_PAIRING) * dHdlam),
        "fit_residuals": fit_residuals,
        "lambda_drift": float(np.max(np.abs(lams - lams[0, None]))),
        "unwrap_hazard": unwrap_hazard,
    }
