"""Structured N x N complex matrices (N = 2n) and their decompositions.

Everything revolves around the exchange matrix C (off-diagonal identity
blocks) and conjugation by it.  Five structure tags are supported:

* ``unitary``  X^dag X = 1
* ``Gplus``    unitary with C X C =  X      (block form [[a, b], [b, a]])
* ``Gminus``   unitary with C X C =  X^{-1}
* ``gplus``    anti-Hermitian with C X C =  X
* ``gminus``   anti-Hermitian with C X C = -X

The three workhorse factorizations:

* :func:`gamma_split`             Y = Y_plus + Y_minus (exact sum)
* :func:`pair_diagonalize_gminus` Y_minus = g * i*diag(d, -d) * g^{-1}, g in Gplus
* :func:`cartan_decompose_gminus` B = eta * exp(2i*diag(q, -q)) * eta^{-1}, eta in Gplus

plus a numerical oracle for Jacobi's complementary-minor identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import PairingError, StructureError

#: default tolerance for eigenvalue pairing decisions
PAIR_TOL = 1e-9
#: default residual bound accepted for structure membership of inputs
CHECK_TOL = 1e-8

STRUCTURE_TAGS = ("unitary", "Gplus", "Gminus", "gplus", "gminus")


def exchange_matrix(n: int) -> np.ndarray:
    """The 2n x 2n Hermitian unitary C with identity off-diagonal blocks."""
    C = np.zeros((2 * n, 2 * n), dtype=complex)
    C[:n, n:] = np.eye(n)
    C[n:, :n] = np.eye(n)
    return C


def _swap_index(n: int) -> np.ndarray:
    return np.r_[n : 2 * n, 0:n]


def conj_by_C(X: np.ndarray) -> np.ndarray:
    """C X C computed as an exact index permutation (no float arithmetic)."""
    n = X.shape[0] // 2
    idx = _swap_index(n)
    return X[np.ix_(idx, idx)]


def Q_matrix(q) -> np.ndarray:
    """diag(q, -q) for q in R^n."""
    q = np.asarray(q, dtype=float)
    return np.diag(np.r_[q, -q]).astype(complex)


def exp_iQ(q) -> np.ndarray:
    """Diagonal unitary exp(i*diag(q, -q))."""
    q = np.asarray(q, dtype=float)
    return np.diag(np.exp(1j * np.r_[q, -q]))


def structure_residual(X, tag: str) -> float:
    """Frobenius norm of the violation of the defining relation(s) of ``tag``.

    For compound tags the maximum over the individual relations is returned,
    so 0 still means exact membership.
    """
    X = np.asarray(X, dtype=complex)
    N = X.shape[0]
    if X.shape != (N, N) or N % 2:
        raise ValueError("X must be square of even size")
    eye = np.eye(N)
    if tag == "unitary":
        return float(np.linalg.norm(X.conj().T @ X - eye))
    if tag == "Gplus":
        return max(
            float(np.linalg.norm(X.conj().T @ X - eye)),
            float(np.linalg.norm(conj_by_C(X) - X)),
        )
    if tag == "Gminus":
        r_unit = float(np.linalg.norm(X.conj().T @ X - eye))
        try:
            Xinv = np.linalg.inv(X)
        except np.linalg.LinAlgError as exc:
            raise StructureError("Gminus residual needs an invertible matrix") from exc
        return max(r_unit, float(np.linalg.norm(conj_by_C(X) - Xinv)))
    if tag == "gplus":
        return max(
            float(np.linalg.norm(X.conj().T + X)),
            float(np.linalg.norm(conj_by_C(X) - X)),
        )
    if tag == "gminus":
        return max(
            float(np.linalg.norm(X.conj().T + X)),
            float(np.linalg.norm(conj_by_C(X) + X)),
        )
    raise ValueError(f"unknown structure tag {tag!r}; expected one of {STRUCTURE_TAGS}")


@dataclass(frozen=True)
class StructuredMatrix:
    """An N x N complex matrix with an optional structure tag."""

    m: np.ndarray
    tag: str | None = None

    def __post_init__(self):
        m = np.asarray(self.m, dtype=complex)
        object.__setattr__(self, "m", m)
        if self.tag is not None and self.tag not in STRUCTURE_TAGS:
            raise ValueError(f"unknown structure tag {self.tag!r}")

    def residual(self) -> float:
        if self.tag is None:
            return 0.0
        return structure_residual(self.m, self.tag)

    def to_dict(self):
        N = self.m.shape[0]
        flat = self.m.reshape(-1)
        return {
            "shape": [N, N],
            "tag": self.tag,
            "entries": [[float(w.real), float(w.imag)] for w in flat],
        }


@dataclass(frozen=True)
class PairedSpectrum:
    """Output of :func:`pair_diagonalize_gminus`: values d (descending) and Gplus frame."""

    values: np.ndarray
    frame: StructuredMatrix


def _require_structure(X, tag, tol=CHECK_TOL):
    r = structure_residual(X, tag)
    if r > tol:
        raise StructureError(f"input fails {tag} residual check: {r:.3e} > {tol:.1e}")
    return r


def gamma_split(Y) -> tuple[np.ndarray, np.ndarray]:
    """Split an anti-Hermitian Y into its C-even and C-odd parts.

    Returns (Y_plus, Y_minus) with Y_plus = (Y + CYC)/2 and Y_minus = Y - Y_plus.
    The complement construction makes the reconstruction defect of
    Y_plus + Y_minus at most one rounding of the final addition per entry
    (exact whenever the two parts are of comparable scale).
    """
    Y = np.asarray(Y, dtype=complex)
    if Y.ndim != 2 or Y.shape[0] != Y.shape[1] or Y.shape[0] % 2:
        raise ValueError("Y must be square of even size")
    r = float(np.linalg.norm(Y.conj().T + Y))
    if r > CHECK_TOL:
        raise StructureError(f"gamma_split needs an anti-Hermitian input, residual {r:.3e}")
    Y_plus = (Y + conj_by_C(Y)) / 2.0
    Y_minus = Y - Y_plus
    return Y_plus, Y_minus


def _fix_frame_phases(g: np.ndarray) -> np.ndarray:
    """Make each primary column's largest-magnitude entry real positive.

    The same phase is applied to the paired column n+j, which keeps the frame
    inside Gplus (this is exactly the residual Z freedom).
    """
    n = g.shape[0] // 2
    g = g.copy()
    for j in range(n):
        col = g[:, j]
        k = int(np.argmax(np.abs(col)))
        a = col[k]
        if a != 0:
            phase = a / abs(a)
            g[:, j] = col / phase
            g[:, n + j] = g[:, n + j] / phase
    return g


def _pair_zero_modes(basis: np.ndarray, C: np.ndarray, context: str) -> list[np.ndarray]:
    """Pair a C-invariant subspace into (v, Cv) couples via the C eigenbasis.

    ``basis`` holds orthonormal columns spanning the subspace.  Returns the
    primary vectors v; their partners are C @ v.
    """
    k = basis.shape[1]
    if k % 2:
        raise PairingError(f"{context}: odd-dimensional zero/real cluster cannot be C-paired")
    M = basis.conj().T @ C @ basis
    w, u = np.linalg.eigh(M)
    if np.any(np.abs(np.abs(w) - 1.0) > 1e-6):
        raise PairingError(
            f"{context}: cluster is not C-invariant (restricted C eigenvalues {w})"
        )
    plus = [basis @ u[:, i] for i in range(k) if w[i] > 0]
    minus = [basis @ u[:, i] for i in range(k) if w[i] < 0]
    if len(plus) != len(minus):
        raise PairingError(
            f"{context}: unbalanced C signature in cluster ({len(plus)} vs {len(minus)})"
        )
    return [(ep + em) / math.sqrt(2.0) for ep, em in zip(plus, minus)]


def pair_diagonalize_gminus(Yminus, pair_tol: float = PAIR_TOL,
                            check_tol: float = CHECK_TOL) -> PairedSpectrum:
    """Write a gminus element as g * i*diag(d, -d) * g^{-1} with g in Gplus.

    The Hermitian matrix -i*Y_minus anticommutes with C, so its spectrum comes
    in (+d, -d) pairs and C maps the +d eigenvector v to a -d eigenvector; the
    frame takes columns (v_j, C v_j).  (Near-)zero eigenvalues are paired
    inside the kernel through the C eigenbasis.
    """
    Y = np.asarray(Yminus, dtype=complex)
    _require_structure(Y, "gminus", check_tol)
    n = Y.shape[0] // 2
    C = exchange_matrix(n)
    H = -1j * Y
    w, v = np.linalg.eigh(H)

    pos = [i for i in range(2 * n) if w[i] > pair_tol]
    zero = [i for i in range(2 * n) if abs(w[i]) <= pair_tol]
    neg = [i for i in range(2 * n) if w[i] < -pair_tol]
    if len(pos) != len(neg):
        raise PairingError(
            f"spectrum does not pair into +-d: {len(pos)} positive vs {len(neg)} negative"
        )
    d_pos = sorted((w[i] for i in pos), reverse=True)
    d_neg = sorted((-w[i] for i in neg), reverse=True)
    if any(abs(a - b) > max(pair_tol, 1e-12 * max(1.0, abs(a))) * 10 for a, b in zip(d_pos, d_neg)):
        raise PairingError("positive and negative eigenvalues do not match in +- pairs")

    order = sorted(pos, key=lambda i: -w[i])
    primaries = [v[:, i] for i in order]
    dvals = [w[i] for i in order]
    if zero:
        kern = v[:, zero]
        primaries.extend(_pair_zero_modes(kern, C, "pair_diagonalize_gminus"))
        dvals.extend([0.0] * (len(zero) // 2))

    g = np.zeros((2 * n, 2 * n), dtype=complex)
    for j, vec in enumerate(primaries):
        g[:, j] = vec
        g[:, n + j] = C @ vec
    g = _fix_frame_phases(g)
    d = np.asarray(dvals, dtype=float)

    recon = g @ (1j * np.diag(np.r_[d, -d])) @ g.conj().T
    err = float(np.linalg.norm(recon - Y))
    if err > 1e-8 * max(1.0, float(np.linalg.norm(Y))):
        raise PairingError(f"pair diagonalization reconstruction residual {err:.3e}")
    return PairedSpectrum(values=d, frame=StructuredMatrix(g, "Gplus"))


def cartan_decompose_gminus(B, pair_tol: float = PAIR_TOL,
                            check_tol: float = CHECK_TOL):
    """Factor a (decomposable) Gminus element as eta * exp(2i*Q(q)) * eta^{-1}.

    Returns (eta, q) with eta in Gplus and q sorted descending in [0, pi/2].
    Eigenvalues of B pair as exp(+-2i*q_j); the exp(2iq) eigenvector v and
    C v span each pair.  Eigenvalues at +-1 (q = 0 or pi/2) are paired through
    the C eigenbasis of the corresponding eigenspace; if that space is not
    C-balanced the element admits no such factorization and PairingError is
    raised.
    """
    B = np.asarray(B, dtype=complex)
    _require_structure(B, "Gminus", check_tol)
    n = B.shape[0] // 2
    C = exchange_matrix(n)

    # B is normal (unitary): complex Schur gives orthonormal eigenvectors.
    T, Zs = scipy.linalg.schur(B, output="complex")
    offdiag = T - np.diag(np.diag(T))
    if np.linalg.norm(offdiag) > 1e-6:
        raise PairingError("input is too far from normal for spectral pairing")
    evals = np.diag(T)
    ang = np.angle(evals)

    # angle tolerance matched to the eigenvalue pairing tolerance
    ang_tol = max(pair_tol, 1e-12)
    upper = [i for i in range(2 * n) if ang_tol < ang[i] < math.pi - ang_tol]
    lower = [i for i in range(2 * n) if -math.pi + ang_tol < ang[i] < -ang_tol]
    real_plus = [i for i in range(2 * n) if abs(ang[i]) <= ang_tol]
    real_minus = [i for i in range(2 * n) if abs(ang[i]) >= math.pi - ang_tol]
    if len(upper) != len(lower):
        raise PairingError(
            f"unit-circle spectrum does not pair: {len(upper)} upper vs {len(lower)} lower"
        )

    order = sorted(upper, key=lambda i: -ang[i])
    primaries = [Zs[:, i] for i in order]
    qvals = [ang[i] / 2.0 for i in order]
    for cluster, qval, label in ((real_minus, math.pi / 2, "eigenvalue -1"),
                                 (real_plus, 0.0, "eigenvalue +1")):
        if cluster:
            basis = Zs[:, cluster]
            # re-orthonormalize the Schur columns of the cluster (they are
            # orthonormal already; this guards roundoff)
            basis, _ = np.linalg.qr(basis)
            vecs = _pair_zero_modes(basis, C, f"cartan_decompose_gminus ({label})")
            primaries.extend(vecs)
            qvals.extend([qval] * len(vecs))

    if len(primaries) != n:
        raise PairingError("could not assemble n eigenvalue pairs")
    order2 = np.argsort([-q for q in qvals], kind="stable")
    eta = np.zeros((2 * n, 2 * n), dtype=complex)
    q = np.zeros(n)
    for slot, i in enumerate(order2):
        eta[:, slot] = primaries[i]
        eta[:, n + slot] = C @ primaries[i]
        q[slot] = qvals[i]
    eta = _fix_frame_phases(eta)

    recon = eta @ exp_iQ(2.0 * q) @ eta.conj().T
    err = float(np.linalg.norm(recon - B))
    if err > 1e-7:
        raise PairingError(f"Cartan reconstruction residual {err:.3e}")
    return StructuredMatrix(eta, "Gplus"), q


def _perm_parity(perm) -> int:
    """Sign of a permutation given as a list of 0-based indices."""
    perm = list(perm)
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def jacobi_minor_residual(A, rows, cols, p: int, det_tol: float = 1e-8) -> float:
    """Numerical residual of the complementary-minor identity for det(A) = 1.

    With B = (A^{-1})^T and (rows, cols) a pair of full index permutations,
    compares the p x p leading minor of B against sign * complementary minor
    of A and returns the absolute difference.
    """
    A = np.asarray(A, dtype=complex)
    N = A.shape[0]
    rows = list(rows)
    cols = list(cols)
    if sorted(rows) != list(range(N)) or sorted(cols) != list(range(N)):
        raise ValueError("rows and cols must each be a permutation of 0..N-1")
    if not 1 <= p < N:
        raise ValueError("need 1 <= p < N")
    det_A = np.linalg.det(A)
    if abs(det_A - 1.0) > det_tol:
        raise StructureError(f"det(A) = {det_A} is not 1 within {det_tol:.1e}")
    B = np.linalg.inv(A).T
    minor_B = np.linalg.det(B[np.ix_(rows[:p], cols[:p])])
    minor_A = np.linalg.det(A[np.ix_(rows[p:], cols[p:])])
    sign = _perm_parity(rows) * _perm_parity(cols)
    return float(abs(minor_B - sign * minor_A))


# ---------------------------------------------------------------------------
# random structured elements (used by tests and the verification suites)

def random_unitary(rng: np.random.Generator, m: int) -> np.ndarray:
    zr = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    qmat, r = np.linalg.qr(zr)
    return qmat * (np.diag(r) / np.abs(np.diag(r)))


def random_gplus(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random element of Gplus built from two n x n unitaries u, w.

    With u = (a + b) and w = (a - b) unitary, [[a, b], [b, a]] is unitary and
    C-symmetric.
    """
    u = random_unitary(rng, n)
    w = random_unitary(rng, n)
    a = (u + w) / 2.0
    b = (u - w) / 2.0
    g = np.block([[a, b], [b, a]])
    return g


def random_gminus_algebra(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random anti-Hermitian Y with C Y C = -Y (block form [[A, B], [-B, -A]])."""
    ar = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    A = (ar - ar.conj().T) / 2.0
    br = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    B = (br + br.conj().T) / 2.0  # Hermitian = i * anti-Hermitian block
    return np.block([[A, B], [-B.conj().T, -A]])


def random_Gminus_group(rng: np.random.Generator, n: int,
                        q_interior: bool = True):
    """Random decomposable Gminus element eta0 exp(2i Q(q0)) eta0^{-1}.

    Returns (B, eta0, q0) with q0 sorted descending, strictly interior to
    (0, pi/2) when ``q_interior``.
    """
    eta0 = random_gplus(rng, n)
    lo, hi = (0.05, math.pi / 2 - 0.05) if q_interior else (0.0, math.pi / 2)
    q0 = np.sort(rng.uniform(lo, hi, size=n))[::-1]
    B = eta0 @ exp_iQ(2.0 * q0) @ eta0.conj().T
    return B, eta0, q0
