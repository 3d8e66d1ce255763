"""Coupling parameters, phase-space domains and the three coordinate charts.

The model pair is parametrized by (mu, nu, kappa) with mu > 0 and
nu > |kappa| >= 0.  The equivalent Sutherland couplings are

    gamma  = mu**2,
    gamma1 = nu*kappa/2,
    gamma2 = (nu - kappa)**2 / 2,

which automatically satisfy gamma > 0, gamma2 > 0, 4*gamma1 + gamma2 > 0.
Three charts are used throughout:

* Sutherland chart (q, p):  pi/2 > q_1 > ... > q_n > 0, p in R^n.
* Dual angle chart (lambda, theta):  lambda in the thick-walled chamber
  lambda_a - lambda_{a+1} > 2*mu, lambda_n > max(|nu|, |kappa|), theta in T^n.
* Oscillator chart z in C^n, the global chart; the angle chart covers the
  open dense part where every z_k != 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChartError, DomainError, ParameterError

TWO_PI = 2.0 * math.pi

#: default tolerance band around the domain-defining inequalities
DOMAIN_MARGIN = 1e-9
#: default slack for the strong-regularity gate (protects Cauchy-like denominators)
REGULARITY_MARGIN = 1e-6


def _as_real_vector(x, name):
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-d real vector")
    return v


def canonical_angle(theta):
    """Map angles to the canonical representative in [0, 2*pi)."""
    t = np.asarray(theta, dtype=float) % TWO_PI
    # renormalize values that round up to 2*pi
    return np.where(t >= TWO_PI, 0.0, t)


def angle_distance(a, b):
    """Elementwise distance on the circle, in [0, pi]."""
    d = np.abs(canonical_angle(a) - canonical_angle(b))
    return np.minimum(d, TWO_PI - d)


@dataclass(frozen=True)
class CouplingParams:
    """Validated coupling constants and particle number.

    Construct via :func:`couplings_from_rsvd` or :func:`couplings_from_sutherland`;
    the constructor itself enforces mu > 0 and nu > |kappa| >= 0.
    """

    n: int
    mu: float
    nu: float
    kappa: float

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ParameterError(f"n must be a positive integer, got {self.n!r}")
        if not self.mu > 0:
            raise ParameterError(f"constraint mu > 0 violated: mu = {self.mu}")
        if not self.nu > abs(self.kappa):
            raise ParameterError(
                f"constraint nu > |kappa| >= 0 violated: nu = {self.nu}, kappa = {self.kappa}"
            )

    @property
    def N(self) -> int:
        return 2 * self.n

    @property
    def gamma(self) -> float:
        return self.mu**2

    @property
    def gamma1(self) -> float:
        return self.nu * self.kappa / 2.0

    @property
    def gamma2(self) -> float:
        return (self.nu - self.kappa) ** 2 / 2.0

    def to_dict(self):
        return {"n": int(self.n), "mu": self.mu, "nu": self.nu, "kappa": self.kappa}

    @classmethod
    def from_dict(cls, d):
        return cls(n=int(d["n"]), mu=float(d["mu"]), nu=float(d["nu"]), kappa=float(d["kappa"]))


def couplings_from_rsvd(mu, nu, kappa, n) -> CouplingParams:
    """Build parameters from the dual-side triple (mu, nu, kappa)."""
    return CouplingParams(n=n, mu=float(mu), nu=float(nu), kappa=float(kappa))


def couplings_from_sutherland(gamma, gamma1, gamma2, n) -> CouplingParams:
    """Invert (gamma, gamma1, gamma2) -> (mu, nu, kappa).

    The root with nu > |kappa| >= 0 is selected:  mu = sqrt(gamma),
    nu - kappa = sqrt(2*gamma2) and nu + kappa = sqrt(2*(4*gamma1 + gamma2)).
    """
    if not gamma > 0:
        raise ParameterError(f"constraint gamma > 0 violated: gamma = {gamma}")
    if not gamma2 > 0:
        raise ParameterError(f"constraint gamma2 > 0 violated: gamma2 = {gamma2}")
    if not 4 * gamma1 + gamma2 > 0:
        raise ParameterError(
            f"constraint 4*gamma1 + gamma2 > 0 violated: got {4 * gamma1 + gamma2}"
        )
    mu = math.sqrt(gamma)
    diff = math.sqrt(2.0 * gamma2)
    total = math.sqrt(2.0 * (4.0 * gamma1 + gamma2))
    nu = (total + diff) / 2.0
    kappa = (total - diff) / 2.0
    return CouplingParams(n=n, mu=mu, nu=nu, kappa=kappa)


def _freeze(arr):
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class SutherlandPoint:
    """Point (q, p) of the Sutherland chart. Arrays are stored read-only."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = _freeze(_as_real_vector(self.q, "q").copy())
        p = _freeze(_as_real_vector(self.p, "p").copy())
        if q.shape != p.shape:
            raise ValueError(f"q and p must have equal length, got {q.size} and {p.size}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.q.size

    def to_dict(self):
        return {"q": self.q.tolist(), "p": self.p.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(q=np.asarray(d["q"], float), p=np.asarray(d["p"], float))


@dataclass(frozen=True, eq=False)
class DualPoint:
    """Point (lambda, theta) of the dual angle chart.

    Angles are stored as their canonical representative in [0, 2*pi).
    """

    lam: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        lam = _freeze(_as_real_vector(self.lam, "lambda").copy())
        theta = _freeze(canonical_angle(_as_real_vector(self.theta, "theta")))
        if lam.shape != theta.shape:
            raise ValueError(
                f"lambda and theta must have equal length, got {lam.size} and {theta.size}"
            )
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "theta", theta)

    @property
    def n(self) -> int:
        return self.lam.size

    def to_dict(self):
        return {"lambda": self.lam.tolist(), "theta": self.theta.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(lam=np.asarray(d["lambda"], float), theta=np.asarray(d["theta"], float))


@dataclass(frozen=True, eq=False)
class OscillatorPoint:
    """Point z in C^n of the global oscillator chart. Any z is valid."""

    z: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=complex)
        if z.ndim != 1 or z.size == 0:
            raise ValueError("z must be a nonempty 1-d complex vector")
        object.__setattr__(self, "z", _freeze(z.copy()))

    @property
    def n(self) -> int:
        return self.z.size

    def to_dict(self):
        return {"z": [[float(w.real), float(w.imag)] for w in self.z]}

    @classmethod
    def from_dict(cls, d):
        z = np.array([complex(re, im) for re, im in d["z"]])
        return cls(z=z)


def point_to_dict(point):
    """Serialize any of the three point types to its JSON dict."""
    return point.to_dict()


def point_from_dict(d):
    """Inverse of :func:`point_to_dict`; dispatches on the keys present."""
    if "q" in d:
        return SutherlandPoint.from_dict(d)
    if "lambda" in d:
        return DualPoint.from_dict(d)
    if "z" in d:
        return OscillatorPoint.from_dict(d)
    raise ValueError(f"unrecognized point dict with keys {sorted(d)}")


def _sutherland_slacks(point: SutherlandPoint):
    q = point.q
    return np.concatenate(([math.pi / 2 - q[0]], q[:-1] - q[1:], [q[-1]]))


def _dual_slacks(lam, params: CouplingParams):
    wall = max(abs(params.nu), abs(params.kappa))
    return np.concatenate((lam[:-1] - lam[1:] - 2 * params.mu, [lam[-1] - wall]))


def domain_membership(point, params: CouplingParams, margin: float = DOMAIN_MARGIN) -> str:
    """Classify a point as 'inside' / 'boundary' / 'outside' its chart domain.

    'inside' means every defining inequality holds with slack > margin,
    'boundary' that some slack falls within +-margin of zero.
    """
    if margin < 0:
        raise ValueError("margin must be >= 0")
    if isinstance(point, SutherlandPoint):
        slacks = _sutherland_slacks(point)
    elif isinstance(point, DualPoint):
        slacks = _dual_slacks(point.lam, params)
    else:
        raise TypeError("domain_membership expects a SutherlandPoint or DualPoint")
    if np.all(slacks > margin):
        return "inside"
    if np.any(slacks < -margin):
        return "outside"
    return "boundary"


def require_inside(point, params: CouplingParams, margin: float = DOMAIN_MARGIN):
    """Raise DomainError (with the failing inequality) unless strictly inside."""
    status = domain_membership(point, params, margin)
    if status == "inside":
        return
    if isinstance(point, SutherlandPoint):
        raise DomainError(
            f"q must satisfy pi/2 > q1 > ... > qn > 0 with slack > {margin}; "
            f"point is {status} (q = {point.q.tolist()})"
        )
    raise DomainError(
        f"lambda must satisfy lambda_a - lambda_(a+1) > 2*mu and "
        f"lambda_n > max(|nu|,|kappa|) with slack > {margin}; "
        f"point is {status} (lambda = {point.lam.tolist()})"
    )


def strongly_regular(lam, params: CouplingParams, margin: float = REGULARITY_MARGIN) -> bool:
    """True iff lambda avoids every resonance hyperplane with slack > margin.

    Checks lambda_1 > ... > lambda_n > |kappa|, then |lambda_a +- lambda_b| != 2*mu
    for all pairs (including a == b for the sum) and
    (lambda_a - nu)(lambda_a - |2*mu - nu|) != 0.
    """
    lam = _as_real_vector(lam, "lambda")
    mu, nu, kappa = params.mu, params.nu, params.kappa
    if np.any(lam[:-1] - lam[1:] <= margin):
        return False
    if lam[-1] - abs(kappa) <= margin:
        return False
    diff = np.abs(lam[:, None] - lam[None, :])
    off = ~np.eye(lam.size, dtype=bool)
    if np.any(np.abs(diff[off] - 2 * mu) <= margin):
        return False
    total = lam[:, None] + lam[None, :]
    if np.any(np.abs(total - 2 * mu) <= margin):
        return False
    if np.any(np.abs(lam - nu) <= margin):
        return False
    if np.any(np.abs(lam - abs(2 * mu - nu)) <= margin):
        return False
    return True


def lambda_of_z(z, params: CouplingParams):
    """Positions lambda_k(z) = nu + 2*(n-k)*mu + sum_{j>=k} |z_j|^2 (k = 1..n).

    Smooth on all of C^n; the image is the closure of the dual chamber.
    """
    z = np.asarray(z, dtype=complex)
    n = z.size
    zsq = np.abs(z) ** 2
    tails = np.cumsum(zsq[::-1])[::-1]
    k = np.arange(1, n + 1)
    return params.nu + 2.0 * (n - k) * params.mu + tails


def z_from_angles(dual: DualPoint, params: CouplingParams) -> OscillatorPoint:
    """Oscillator coordinates of an interior angle-chart point.

    z_j = sqrt(lambda_j - lambda_{j+1} - 2*mu) * prod_{a<=j} e^{i*theta_a} for
    j < n and z_n = sqrt(lambda_n - nu) * prod_{a<=n} e^{i*theta_a}.
    """
    require_inside(dual, params)
    lam, theta = dual.lam, dual.theta
    gaps = np.concatenate((lam[:-1] - lam[1:] - 2 * params.mu, [lam[-1] - params.nu]))
    phases = np.exp(1j * np.cumsum(theta))
    return OscillatorPoint(z=np.sqrt(gaps) * phases)


def angles_from_z(osc: OscillatorPoint, params: CouplingParams) -> DualPoint:
    """Invert :func:`z_from_angles`; defined only where every z_k != 0."""
    z = osc.z
    if np.any(np.abs(z) == 0.0):
        raise DegenerateChartError(
            "degenerate chart: some z_k = 0, angles are undefined there"
        )
    lam = lambda_of_z(z, params)
    psi = np.angle(z)
    theta = np.empty_like(psi)
    theta[0] = psi[0]
    theta[1:] = psi[1:] - psi[:-1]
    return DualPoint(lam=lam, theta=canonical_angle(theta))
