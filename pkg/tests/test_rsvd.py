import numpy as np
import pytest

from conftest import match_spectra

from bcsuth.errors import DomainError
from bcsuth.matkernel import structure_residual
from bcsuth.params import DualPoint, couplings_from_rsvd, z_from_angles
from bcsuth.rsvd import (A_check, A_check_direct, A_tilde, F_squared_branches,
                         L_tilde, appendix_chain, commutator_residual, dual_H0,
                         dual_Hk, f_vector, g_functions, h_matrix, m_of_theta,
                         phi_vector, w_system_residual, w_weights)
from bcsuth.verification import (SuiteConfig, sample_dual, sample_params,
                                 sample_oscillator)

P1 = couplings_from_rsvd(1.0, 2.0, 0.0, 1)
CFG = SuiteConfig(suite="rsvd")


def test_h_matrix_identity_for_kappa_zero():
    frame = h_matrix([5.0, 3.0], couplings_from_rsvd(1.0, 2.0, 0.0, 2))
    assert np.array_equal(frame.h.m, np.eye(4))


def test_h_matrix_profile_values():
    p = couplings_from_rsvd(1.0, 4.0, 3.0, 1)
    frame = h_matrix([5.0], p)
    assert frame.alpha[0] == pytest.approx(np.sqrt(0.9), abs=1e-14)
    assert frame.beta[0] == pytest.approx(1.0 / np.sqrt(10.0), abs=1e-14)
    assert frame.alpha[0] ** 2 + frame.beta[0] ** 2 == pytest.approx(1.0)


def test_h_matrix_is_Gminus(rng):
    for n in (1, 2, 3):
        p = sample_params(rng, n, CFG)
        dual = sample_dual(rng, n, p)
        assert h_matrix(dual.lam, p).h.residual() < 1e-12


def test_h_matrix_rejects_small_lambda():
    with pytest.raises(DomainError):
        h_matrix([0.5], couplings_from_rsvd(1.0, 2.0, 1.0, 1))


def test_f_vector_single_particle():
    lam = np.sqrt(5.0)
    dual = DualPoint(lam=[lam], theta=[0.0])
    f = f_vector(dual, P1)
    assert f[0] == pytest.approx(np.sqrt(1 - 2 / lam))
    assert f[1] == pytest.approx(np.sqrt(1 + 2 / lam))
    assert np.vdot(f, f).real == pytest.approx(2.0, abs=1e-13)


def test_f_vector_moduli_equal_plus_branch(rng):
    for n in (1, 2, 3, 4):
        p = sample_params(rng, n, CFG)
        dual = sample_dual(rng, n, p)
        f = f_vector(dual, p)
        br = F_squared_branches(dual.lam, p)
        assert np.max(np.abs(np.abs(f) ** 2 - br.Fsq_plus)) < 1e-12


def test_branch_values_single_particle():
    # w = 1 at n = 1, so the moduli equal the branch values themselves;
    # 2*mu - nu = 0 collapses the minus branch to (-1, -1)
    br = F_squared_branches([3.0], P1)
    assert br.Fsq_plus == pytest.approx([1.0 / 3.0, 5.0 / 3.0])
    assert br.Fsq_minus == pytest.approx([-1.0, -1.0])
    assert br.Fsq_plus.sum() == pytest.approx(2.0, abs=1e-14)
    assert br.Fsq_minus.sum() == pytest.approx(-2.0, abs=1e-14)


def test_sum_identities_random(rng):
    for n in (1, 2, 3, 4):
        p = sample_params(rng, n, CFG)
        dual = sample_dual(rng, n, p)
        br = F_squared_branches(dual.lam, p)
        assert abs(br.Fsq_plus.sum() - 2 * n) < 1e-10
        assert abs(br.Fsq_minus.sum() + 2 * n) < 1e-10


def test_w_system_residuals_both_branches(rng):
    for n in (1, 2, 3, 4):
        p = sample_params(rng, n, CFG)
        dual = sample_dual(rng, n, p)
        br = F_squared_branches(dual.lam, p)
        assert max(w_system_residual(dual.lam, br.Fsq_plus, p)) < 1e-9
        assert max(w_system_residual(dual.lam, br.Fsq_minus, p)) < 1e-9


def test_w_system_detects_perturbation(rng):
    p = sample_params(rng, 2, CFG)
    dual = sample_dual(rng, 2, p)
    br = F_squared_branches(dual.lam, p)
    bad = br.Fsq_plus.copy()
    bad[0] += 1e-3
    assert max(w_system_residual(dual.lam, bad, p)) > 1e-4


def test_minus_branch_sign_obstruction(rng):
    for n in (1, 2, 3):
        p = sample_params(rng, n, CFG)
        dual = sample_dual(rng, n, p)
        br = F_squared_branches(dual.lam, p)
        assert np.all(br.Fsq_plus > 0)
        for c in range(n):
            assert br.Fsq_minus[c] < 0 or br.Fsq_minus[n + c] < 0


def test_A_check_unitary_and_commutator(rng):
    for n in (1, 2, 3, 4):
        p = sample_params(rng, n, CFG)
        dual = sample_dual(rng, n, p)
        A = A_check(dual, p).m
        assert structure_residual(A, "Gminus") < 1e-10
        f = f_vector(dual, p)
        assert commutator_residual(A, f, dual.lam, p) < 1e-10
        assert abs(np.linalg.det(A) - 1.0) < 1e-10


def test_A_check_single_particle_trace():
    lam = np.sqrt(5.0)
    dual = DualPoint(lam=[lam], theta=[0.0])
    h = h_matrix(dual.lam, P1).h.m
    A = A_check(dual, P1).m
    val = np.trace(h @ A @ h).real / 2.0
    assert val == pytest.approx(1.0 / np.sqrt(5.0), abs=1e-13)


def test_A_check_smooth_route_matches_direct(rng):
    for n in (1, 2, 3):
        p = sample_params(rng, n, CFG)
        dual = sample_dual(rng, n, p)
        A1 = A_check(dual, p).m
        A2 = A_check_direct(dual, p)
        assert np.max(np.abs(A1 - A2)) < 1e-9


def test_dual_H0_closed_form_single_particle():
    lam = np.sqrt(5.0)
    assert dual_H0(DualPoint(lam=[lam], theta=[np.pi / 2]), P1) \
        == pytest.approx(0.0, abs=1e-13)
    assert dual_H0(DualPoint(lam=[lam], theta=[0.0]), P1) \
        == pytest.approx(1.0 / np.sqrt(5.0), abs=1e-13)


def test_dual_H0_vanishes_towards_wall():
    # the boundary factor kills the Hamiltonian as lambda -> nu
    val = dual_H0(DualPoint(lam=[2.0 + 1e-7], theta=[0.3]), P1, validate=False)
    assert abs(val) < 1e-3


def test_dual_H0_matches_trace_random(rng):
    for n in (1, 2, 3):
        p = sample_params(rng, n, CFG)
        dual = sample_dual(rng, n, p)
        h = h_matrix(dual.lam, p).h.m
        A = A_check(dual, p, validate=False).m
        ref = np.trace(h @ A @ h).real / 2.0
        assert dual_H0(dual, p) == pytest.approx(ref, abs=1e-10)


def test_g_functions_positive_everywhere(rng):
    for n in (1, 2, 3):
        p = sample_params(rng, n, CFG)
        for _ in range(20):
            z = sample_oscillator(rng, n).z.copy()
            z[rng.integers(0, n)] *= rng.integers(0, 2)
            g = g_functions(z, p)
            assert np.all(g > 0)


def test_g_functions_single_particle_value():
    p = couplings_from_rsvd(1.0, 2.0, 0.0, 1)
    g = g_functions(np.array([1.0 + 0j]), p)
    assert g[0] == pytest.approx(np.sqrt(1.0 / 3.0), abs=1e-14)


def test_m_of_theta_identity():
    assert np.array_equal(m_of_theta(np.zeros(3)), np.eye(6))


def test_f_factorizes_through_g(rng):
    for n in (1, 2, 3):
        p = sample_params(rng, n, CFG)
        dual = sample_dual(rng, n, p)
        z = z_from_angles(dual, p).z
        g = g_functions(z, p)
        f = f_vector(dual, p)
        zprev = np.r_[1.0 + 0j, z[:-1]]
        ref = np.r_[np.abs(z) * g[:n],
                    np.exp(1j * dual.theta) * np.abs(zprev) * g[n:]]
        assert np.max(np.abs(f - ref)) < 1e-12
        phi = phi_vector(z, p)
        m = np.diag(m_of_theta(dual.theta))
        assert np.max(np.abs(phi - m * f)) < 1e-12


def test_A_tilde_superdiagonal_relation(rng):
    for n in (2, 3):
        p = sample_params(rng, n, CFG)
        z = sample_oscillator(rng, n).z
        A = A_tilde(z, p).m
        g = g_functions(z, p)
        for k in range(n - 1):
            ref = -2.0 * p.mu * g[k] * g[n + k + 1]
            assert A[k, k + 1] == pytest.approx(ref, abs=1e-13)
            assert A[n + k + 1, n + k] == pytest.approx(ref, abs=1e-13)


def test_A_tilde_at_origin_single_particle():
    A = A_tilde(np.zeros(1, complex), P1).m
    assert np.allclose(A, [[0.0, -1.0], [1.0, 0.0]], atol=1e-14)
    L = L_tilde(np.zeros(1, complex), P1).m
    assert structure_residual(L, "unitary") < 1e-12


def test_L_tilde_unitary_on_full_chart(rng):
    for n in (1, 2, 3):
        p = sample_params(rng, n, CFG)
        for _ in range(10):
            z = sample_oscillator(rng, n).z.copy()
            z[rng.integers(0, n)] *= rng.integers(0, 2)
            L = L_tilde(z, p).m
            assert structure_residual(L, "Gminus") < 1e-10


def test_L_tilde_smooth_through_removable_singularity():
    # with mu > nu the last action can cross the value mu, where the raw
    # diagonal entry is 0/0; the smooth route must stay unitary through it
    p = couplings_from_rsvd(1.5, 1.0, 0.2, 2)
    for eps in (0.5, 1e-3, 1e-7, 1e-12, 0.0):
        z = np.array([1.3 * np.exp(0.7j),
                      np.sqrt(p.mu + eps - p.nu) * np.exp(0.3j)])
        L = L_tilde(z, p).m
        assert structure_residual(L, "unitary") < 1e-12


def test_L_tilde_spectrum_matches_angle_chart(rng):
    for n in (1, 2, 3):
        p = sample_params(rng, n, CFG)
        dual = sample_dual(rng, n, p)
        z = z_from_angles(dual, p).z
        L = L_tilde(z, p).m
        h = h_matrix(dual.lam, p).h.m
        ref = h @ A_check(dual, p, validate=False).m @ h
        assert match_spectra(np.linalg.eigvals(L), np.linalg.eigvals(ref)) < 1e-10


def test_dual_Hk_at_origin():
    # H1 at the oscillator origin equals the trace value of the origin matrix
    vals = dual_Hk(np.zeros(1, complex), P1, kmax=1)
    assert vals[0] == pytest.approx(0.0, abs=1e-14)


def test_appendix_chain_plus_branch(rng):
    for n in (1, 2, 3, 4):
        p = sample_params(rng, n, CFG)
        dual = sample_dual(rng, n, p)
        f = f_vector(dual, p)
        for a in range(n):
            chain = appendix_chain(f, dual.lam, p, a=a)
            assert "minor_identity_1" in chain  # unitary route ran
            assert max(chain.values()) < 1e-8


def test_appendix_chain_minus_branch_equations(rng):
    # the minus branch is not realizable by a vector (negative moduli), but
    # its signed branch values satisfy the same two polynomial equations
    for n in (1, 2, 3):
        p = sample_params(rng, n, CFG)
        dual = sample_dual(rng, n, p)
        br = F_squared_branches(dual.lam, p)
        assert max(w_system_residual(dual.lam, br.Fsq_minus, p)) < 1e-9


def test_f_vector_requires_interior():
    with pytest.raises(DomainError):
        f_vector(DualPoint(lam=[2.0], theta=[0.0]), P1)


def test_w_weights_positive_inside(rng):
    for n in (2, 3):
        p = sample_params(rng, n, CFG)
        dual = sample_dual(rng, n, p)
        assert np.all(w_weights(dual.lam, p) > 0)


def test_stress_n8(rng):
    # larger-system stress: structure and unitarity residuals stay at 1e-10
    from bcsuth.matkernel import pair_diagonalize_gminus, random_gminus_algebra

    n = 8
    p = sample_params(rng, n, CFG)
    dual = sample_dual(rng, n, p)
    A = A_check(dual, p).m
    assert structure_residual(A, "Gminus") < 1e-10
    z = z_from_angles(dual, p).z
    assert structure_residual(L_tilde(z, p).m, "Gminus") < 1e-10
    Y = random_gminus_algebra(rng, n)
    spec = pair_diagonalize_gminus(Y)
    d = spec.values
    g = spec.frame.m
    recon = g @ (1j * np.diag(np.r_[d, -d])) @ g.conj().T
    assert np.linalg.norm(recon - Y) < 1e-10
