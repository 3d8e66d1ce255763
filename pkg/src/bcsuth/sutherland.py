"""Sutherland side: Lax matrix, commuting Hamiltonians, action map, momentum residuals.

The Lax matrix is Y(q, p) = K(q, p) - i*kappa*C with K in the C-odd part of
u(N).  The Hermitian matrix -i*Y has spectrum {+-sqrt(lambda_j^2 - kappa^2)}
shifted by kappa back to the action vector lambda, and its even traces generate
the commuting family

    H_k(q, p) = tr((-i Y)^(2k)) / (4k),   k = 1..n,

whose k = 1 member is the physical Hamiltonian

    H_1 = p^2/2 + sum_{j<k} [gamma/sin^2(q_j - q_k) + gamma/sin^2(q_j + q_k)]
        + sum_j gamma1/sin^2(q_j) + sum_j gamma2/sin^2(2 q_j).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DomainError
from .matkernel import (StructuredMatrix, conj_by_C, exchange_matrix,
                        gamma_split, pair_diagonalize_gminus)
from .params import (CouplingParams, SutherlandPoint, domain_membership,
                     require_inside)

#: tolerance for the internal spectral-vs-closed-form H_1 self check
H1_SELFCHECK_TOL = 1e-8


def real_constraint_vector(n: int) -> np.ndarray:
    """The distinguished vector (1, ..., 1, -1, ..., -1) with C V = -V, |V|^2 = N."""
    return np.r_[np.ones(n), -np.ones(n)].astype(complex)


@dataclass(frozen=True)
class SutherlandLax:
    """Lax data at a point: Y (anti-Hermitian), its C-odd part K, parameters."""

    Y: StructuredMatrix
    K: StructuredMatrix
    params: CouplingParams


def lax_K(point: SutherlandPoint, params: CouplingParams) -> np.ndarray:
    """The C-odd block matrix [[A, B], [-B, -A]] of the Lax construction.

    A_jj = i p_j, A_jk = -mu / sin(q_j - q_k); B_jj = nu/sin(2 q_j)
    + kappa*cot(2 q_j), B_jk = mu / sin(q_j + q_k).  Built so the structure
    relations hold exactly in floating point.
    """
    require_inside(point, params)
    q, p = point.q, point.p
    n = point.n
    mu, nu, kappa = params.mu, params.nu, params.kappa

    A = np.diag(1j * p).astype(complex)
    B = np.zeros((n, n), dtype=complex)
    for j in range(n):
        s2 = np.sin(2.0 * q[j])
        B[j, j] = nu / s2 + kappa * np.cos(2.0 * q[j]) / s2
        for k in range(j + 1, n):
            a = -mu / np.sin(q[j] - q[k])
            A[j, k] = a
            A[k, j] = -a
            b = mu / np.sin(q[j] + q[k])
            B[j, k] = b
            B[k, j] = b
    return np.block([[A, B], [-B, -A]])


def lax_Y(point: SutherlandPoint, params: CouplingParams) -> SutherlandLax:
    """Full Lax matrix Y = K - i*kappa*C at a strictly interior point."""
    K = lax_K(point, params)
    Y = K - 1j * params.kappa * exchange_matrix(point.n)
    return SutherlandLax(
        Y=StructuredMatrix(Y), K=StructuredMatrix(K, "gminus"), params=params
    )


def closed_form_H1(point: SutherlandPoint, params: CouplingParams) -> float:
    """The physical Hamiltonian evaluated from its trigonometric closed form."""
    q, p = point.q, point.p
    g, g1, g2 = params.gamma, params.gamma1, params.gamma2
    val = 0.5 * float(p @ p)
    n = point.n
    for j in range(n):
        for k in range(j + 1, n):
            val += g / np.sin(q[j] - q[k]) ** 2 + g / np.sin(q[j] + q[k]) ** 2
    val += float(np.sum(g1 / np.sin(q) ** 2))
    val += float(np.sum(g2 / np.sin(2.0 * q) ** 2))
    return val


def spectrum(point: SutherlandPoint, params: CouplingParams) -> np.ndarray:
    """Eigenvalues of the Hermitian Lax matrix -i*Y, ascending."""
    lax = lax_Y(point, params)
    return np.linalg.eigvalsh(-1j * lax.Y.m)


def hamiltonians(point: SutherlandPoint, params: CouplingParams,
                 kmax: int | None = None) -> np.ndarray:
    """Commuting invariants H_1..H_kmax from the paired Lax spectrum.

    H_1 is cross-checked against the closed form; a mismatch beyond
    H1_SELFCHECK_TOL means a bug and raises ConsistencyError.
    """
    kmax = params.n if kmax is None else int(kmax)
    if not 1 <= kmax <= params.n:
        raise ValueError(f"kmax must lie in 1..n = {params.n}")
    eigs = spectrum(point, params)
    H = np.array([np.sum(eigs ** (2 * k)) / (4.0 * k) for k in range(1, kmax + 1)])
    ref = closed_form_H1(point, params)
    scale = max(1.0, abs(ref))
    if abs(H[0] - ref) > H1_SELFCHECK_TOL * scale:
        raise ConsistencyError(
            f"spectral H_1 = {H[0]!r} disagrees with closed form {ref!r}"
        )
    return H


def hamiltonians_matrix_route(point: SutherlandPoint, params: CouplingParams,
                              kmax: int | None = None) -> np.ndarray:
    """Same invariants through explicit matrix powers (stability cross-check)."""
    kmax = params.n if kmax is None else int(kmax)
    lax = lax_Y(point, params)
    M = -1j * lax.Y.m
    P = np.eye(M.shape[0], dtype=complex)
    out = []
    for k in range(1, kmax + 1):
        P = P @ M @ M
        out.append(float(np.trace(P).real) / (4.0 * k))
    return np.array(out)


def odd_trace_residual(point: SutherlandPoint, params: CouplingParams,
                       kmax: int | None = None) -> float:
    """Largest normalized odd trace of -iY; zero for the paired spectrum.

    Each |tr((-iY)^(2k+1))| is divided by max(1, sum |eig|^(2k+1)) so the
    cancellation is measured relative to the scale of the power sums.
    """
    kmax = params.n if kmax is None else int(kmax)
    eigs = spectrum(point, params)
    worst = 0.0
    for k in range(kmax):
        power = eigs ** (2 * k + 1)
        worst = max(worst, abs(np.sum(power)) / max(1.0, np.sum(np.abs(power))))
    return float(worst)


def grad_H1(point: SutherlandPoint, params: CouplingParams):
    """Analytic gradient (dH/dq, dH/dp) of the closed-form Hamiltonian."""
    q, p = point.q, point.p
    n = point.n
    g, g1, g2 = params.gamma, params.gamma1, params.gamma2
    dq = np.zeros(n)
    for j in range(n):
        acc = 0.0
        for k in range(n):
            if k == j:
                continue
            d = q[j] - q[k]
            s = q[j] + q[k]
            acc += -2.0 * g * np.cos(d) / np.sin(d) ** 3
            acc += -2.0 * g * np.cos(s) / np.sin(s) ** 3
        acc += -2.0 * g1 * np.cos(q[j]) / np.sin(q[j]) ** 3
        acc += -4.0 * g2 * np.cos(2.0 * q[j]) / np.sin(2.0 * q[j]) ** 3
        dq[j] = acc
    return dq, p.copy()


def action_map(point: SutherlandPoint, params: CouplingParams,
               closure_tol: float = 1e-8) -> np.ndarray:
    """Action vector lambda_j = sqrt(d_j^2 + kappa^2), d from the paired spectrum.

    The result must land in the closure of the dual chamber; a violation
    beyond ``closure_tol`` raises ConsistencyError.
    """
    lax = lax_Y(point, params)
    _, Yminus = gamma_split(lax.Y.m)
    spec = pair_diagonalize_gminus(Yminus)
    lam = np.sqrt(spec.values**2 + params.kappa**2)
    slacks = np.concatenate((lam[:-1] - lam[1:] - 2 * params.mu,
                             [lam[-1] - max(abs(params.nu), abs(params.kappa))]))
    if np.any(slacks < -closure_tol):
        raise ConsistencyError(
            f"action vector {lam.tolist()} exited the closed chamber "
            f"(worst slack {float(slacks.min()):.3e})"
        )
    return lam


def upsilon_left(V, params: CouplingParams) -> np.ndarray:
    """Left orbit element i*mu*(V V^dag - 1) + i*(mu - nu)*C for C V = -V, |V|^2 = N."""
    V = np.asarray(V, dtype=complex)
    N = V.size
    C = exchange_matrix(N // 2)
    if np.linalg.norm(C @ V + V) > 1e-8 or abs(V.conj() @ V - N) > 1e-8:
        raise DomainError("V must satisfy C V + V = 0 and |V|^2 = N")
    return 1j * params.mu * (np.outer(V, V.conj()) - np.eye(N)) \
        + 1j * (params.mu - params.nu) * C


def upsilon_right(n: int, params: CouplingParams) -> np.ndarray:
    """Right orbit element -i*kappa*C."""
    return -1j * params.kappa * exchange_matrix(n)


def momentum_residual(y, Y, V, params: CouplingParams) -> tuple[float, float]:
    """Norms of the two constraint defects for the triple (y, Y, V).

    Returns (|| (y Y y^{-1})_+ + upsilon_left(V) ||, || -Y_+ + upsilon_right ||);
    both vanish exactly on the constraint surface.
    """
    y = np.asarray(y, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    n = y.shape[0] // 2
    conj = y @ Y @ y.conj().T
    plus = (conj + conj_by_C(conj)) / 2.0
    r1 = float(np.linalg.norm(plus + upsilon_left(V, params)))
    Yplus = (Y + conj_by_C(Y)) / 2.0
    r2 = float(np.linalg.norm(-Yplus + upsilon_right(n, params)))
    return r1, r2


def sutherland_section(point: SutherlandPoint, params: CouplingParams):
    """The constraint-surface triple (e^{iQ(q)}, Y(q, p), V_R) at a point."""
    from .matkernel import exp_iQ

    lax = lax_Y(point, params)
    return exp_iQ(point.q), lax.Y.m, real_constraint_vector(point.n)


def membership_of(point, params: CouplingParams, margin: float = 1e-9) -> str:
    """Convenience re-export of the domain classification."""
    return domain_membership(point, params, margin)
