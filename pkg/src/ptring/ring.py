"""Ring Hamiltonian, characteristic equation and closed-form eigenvectors.

The eigenvalue problem of the defected ring reduces to a transcendental
equation for a complex quasi-momentum theta with E = 2*cos(theta); once a
root is known, all eigenvector components follow from the first two.  Every
formula below contains ratios sin(m*theta)/sin(theta), which have removable
singularities at theta in {0, pi}; inside a guard band these ratios are
evaluated through their polynomial continuation in cos(theta) (Chebyshev
recurrence), which is exact.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLS, RingConfig, Tolerances


class DegenerateThetaError(RuntimeError):
    """The boundary system is numerically null: theta belongs to a degenerate level."""


# --------------------------------------------------------------------------
# quasi-momentum <-> energy

_EDGE_SNAP = 1e-14


def energy_of(theta: complex) -> complex:
    """Eigenenergy 2*cos(theta) of the unit-hopping ring."""
    return 2.0 * cmath.cos(theta)


def theta_of(energy: complex) -> complex:
    """Canonical quasi-momentum with 2*cos(theta) = energy.

    The representative has Re(theta) in [0, pi]; on the strip edges
    (Re(theta) = 0 or pi, where theta and its reflection share the energy)
    the one with Im(theta) >= 0 is returned.
    """
    th = cmath.acos(complex(energy) / 2.0)
    re, im = th.real, th.imag
    if abs(re) < _EDGE_SNAP:
        re = 0.0
    elif abs(re - cmath.pi) < _EDGE_SNAP:
        re = cmath.pi
    if re == 0.0 and im < 0.0:
        im = -im
    elif re == cmath.pi and im < 0.0:
        im = -im
    return complex(re, im)


def canonical_theta(theta: complex) -> complex:
    """Fold an arbitrary quasi-momentum onto the canonical representative."""
    return theta_of(energy_of(theta))


# --------------------------------------------------------------------------
# sin(m*theta)/sin(theta) ratios

def _cheb_u(m: int, x: complex) -> complex:
    """Chebyshev U_m(x) by forward recurrence (m >= -1)."""
    if m < 0:
        return 0.0
    prev, cur = 1.0 + 0.0j, 2.0 * x
    if m == 0:
        return prev
    for _ in range(m - 1):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur


def _cheb_u_and_deriv(m: int, x: complex) -> tuple[complex, complex]:
    """U_m(x) and U_m'(x) by differentiating the recurrence."""
    if m < 0:
        return 0.0, 0.0
    u_prev, u_cur = 1.0 + 0.0j, 2.0 * x
    d_prev, d_cur = 0.0 + 0.0j, 2.0 + 0.0j
    if m == 0:
        return u_prev, d_prev
    for _ in range(m - 1):
        u_prev, u_cur = u_cur, 2.0 * x * u_cur - u_prev
        d_prev, d_cur = d_cur, 2.0 * u_prev + 2.0 * x * d_cur - d_prev
    return u_cur, d_cur


def sin_ratio(m: int, theta: complex, tols: Tolerances = DEFAULT_TOLS) -> complex:
    """sin(m*theta)/sin(theta), valid for any integer m including the guard band."""
    s = cmath.sin(theta)
    if abs(s) >= tols.guard_band:
        return cmath.sin(m * theta) / s
    sign = 1.0
    if m < 0:
        m, sign = -m, -1.0
    return sign * _cheb_u(m - 1, cmath.cos(theta))


def _sin_ratio_deriv(m: int, theta: complex, tols: Tolerances) -> complex:
    """d/dtheta of sin(m*theta)/sin(theta)."""
    s = cmath.sin(theta)
    if abs(s) >= tols.guard_band:
        return (m * cmath.cos(m * theta) - sin_ratio(m, theta, tols) * cmath.cos(theta)) / s
    sign = 1.0
    if m < 0:
        m, sign = -m, -1.0
    _, du = _cheb_u_and_deriv(m - 1, cmath.cos(theta))
    return -sign * s * du


# --------------------------------------------------------------------------
# Hamiltonian and characteristic function

def build_hamiltonian(cfg: RingConfig) -> np.ndarray:
    """Dense N x N matrix: unit nearest-neighbour hoppings on a ring plus the
    two onsite defects."""
    n = cfg.n_sites
    h = np.zeros((n, n), dtype=complex)
    idx = np.arange(n - 1)
    h[idx, idx + 1] = 1.0
    h[idx + 1, idx] = 1.0
    h[0, n - 1] = 1.0
    h[n - 1, 0] = 1.0
    h[cfg.k - 1, cfg.k - 1] = cfg.alpha
    h[cfg.k_prime - 1, cfg.k_prime - 1] = cfg.beta
    return h


def _char_terms(theta: complex, cfg: RingConfig, tols: Tolerances) -> tuple[complex, complex, complex]:
    n, d = cfg.n_sites, cfg.d
    t1 = 2.0 * (1.0 - cmath.cos(n * theta))  # = 4 sin^2(N theta / 2)
    t2 = (cfg.alpha + cfg.beta) * sin_ratio(n, theta, tols)
    t3 = -cfg.alpha * cfg.beta * sin_ratio(d, theta, tols) * sin_ratio(n - d, theta, tols)
    return t1, t2, t3


def char_fn(theta: complex, cfg: RingConfig, tols: Tolerances = DEFAULT_TOLS) -> complex:
    """Characteristic function whose zeros are the eigen-quasi-momenta."""
    t1, t2, t3 = _char_terms(theta, cfg, tols)
    return t1 + t2 + t3


def char_scale(theta: complex, cfg: RingConfig, tols: Tolerances = DEFAULT_TOLS) -> float:
    """Magnitude scale of the characteristic function's terms at theta."""
    t1, t2, t3 = _char_terms(theta, cfg, tols)
    return 1.0 + abs(t1) + abs(t2) + abs(t3)


def char_fn_deriv(theta: complex, cfg: RingConfig, tols: Tolerances = DEFAULT_TOLS) -> complex:
    """d/dtheta of the characteristic function."""
    n, d = cfg.n_sites, cfg.d
    out = 2.0 * n * cmath.sin(n * theta)
    out += (cfg.alpha + cfg.beta) * _sin_ratio_deriv(n, theta, tols)
    sd = sin_ratio(d, theta, tols)
    snd = sin_ratio(n - d, theta, tols)
    out -= cfg.alpha * cfg.beta * (
        _sin_ratio_deriv(d, theta, tols) * snd + sd * _sin_ratio_deriv(n - d, theta, tols)
    )
    return out


# --------------------------------------------------------------------------
# boundary system for (u_0, u_1)

@dataclass(frozen=True)
class BoundaryMatrix:
    """2x2 homogeneous system fixing (u_0, u_1); singular exactly at eigen-theta."""

    a: complex
    b: complex
    c: complex
    d: complex

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def null_vector(self) -> tuple[complex, complex]:
        """(u_0, u_1) annihilated by the better-conditioned row.

        Both rows vanish on the null vector when det = 0; the row with the
        larger norm is used.  Raises DegenerateThetaError when both rows are
        numerically null (the level is degenerate and the eigenvector is not
        determined by this system alone).
        """
        scale = max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))
        if scale < 1e-12:
            raise DegenerateThetaError("boundary system is numerically null")
        row1 = abs(self.a) ** 2 + abs(self.b) ** 2
        row2 = abs(self.c) ** 2 + abs(self.d) ** 2
        if row1 >= row2:
            return self.b, -self.a
        return self.d, -self.c


def boundary_matrix(theta: complex, cfg: RingConfig, tols: Tolerances = DEFAULT_TOLS) -> BoundaryMatrix:
    """Boundary system entries; each is a polynomial in cos(theta) evaluated
    through the guarded sin ratios."""
    n, k, kp = cfg.n_sites, cfg.k, cfg.k_prime
    al, be = cfg.alpha, cfg.beta

    def r(m: int) -> complex:
        return sin_ratio(m, theta, tols)

    a = (
        1.0
        + r(n - 1)
        - al * r(n - k) * r(k - 1)
        - be * r(n - kp) * r(kp - 1)
        + al * be * r(n - kp) * r(kp - k) * r(k - 1)
    )
    b = -(
        r(n)
        - al * r(n - k) * r(k)
        - be * r(n - kp) * r(kp)
        + al * be * r(n - kp) * r(kp - k) * r(k)
    )
    c = (
        r(n)
        - al * r(n - k + 1) * r(k - 1)
        - be * r(n - kp + 1) * r(kp - 1)
        + al * be * r(n - kp + 1) * r(kp - k) * r(k - 1)
    )
    d = (
        1.0
        - r(n + 1)
        + al * r(n - k + 1) * r(k)
        + be * r(n - kp + 1) * r(kp)
        - al * be * r(n - kp + 1) * r(kp - k) * r(k)
    )
    return BoundaryMatrix(a, b, c, d)


# --------------------------------------------------------------------------
# eigenvectors

def leading_index(vec: np.ndarray) -> int:
    """First component index whose modulus ties the maximum.

    The tolerance absorbs last-bit rounding between exactly tied components
    (PT-symmetric eigenvectors have mirror-symmetric moduli), keeping the
    phase convention reproducible.
    """
    mags = np.abs(vec)
    return int(np.argmax(mags >= mags.max() * (1.0 - 1e-10)))


def fix_phase(vec: np.ndarray) -> np.ndarray:
    """Unit norm, with the first largest-modulus component real and positive."""
    nrm = np.linalg.norm(vec)
    if nrm == 0:
        raise DegenerateThetaError("eigenvector construction produced the zero vector")
    vec = vec / nrm
    j = leading_index(vec)
    phase = vec[j] / abs(vec[j])
    vec = vec / phase
    vec[j] = abs(vec[j])
    return vec


def eigvec_from_theta(theta: complex, cfg: RingConfig, tols: Tolerances = DEFAULT_TOLS) -> np.ndarray:
    """Eigenvector components u_1..u_N reconstructed from the quasi-momentum.

    theta must satisfy the characteristic equation; the vector is returned
    unit-normalized with the standard phase convention.
    """
    n, k, kp = cfg.n_sites, cfg.k, cfg.k_prime
    al, be = cfg.alpha, cfg.beta
    u0, u1 = boundary_matrix(theta, cfg, tols).null_vector()

    def r(m: int) -> complex:
        return sin_ratio(m, theta, tols)

    uk = u0 * r(1 - k) + u1 * r(k)
    ukp = u0 * r(1 - kp) + u1 * r(kp) - al * uk * r(kp - k)

    vec = np.empty(n, dtype=complex)
    for j in range(1, n + 1):
        val = u0 * r(1 - j) + u1 * r(j)
        if j >= k + 1:
            val -= al * uk * r(j - k)
        if j >= kp + 1:
            val -= be * ukp * r(j - kp)
        vec[j - 1] = val
    return fix_phase(vec)


def matvec_residual(vec: np.ndarray, energy: complex, h: np.ndarray) -> float:
    """||H u - E u|| for a unit-norm eigenvector candidate."""
    return float(np.linalg.norm(h @ vec - energy * vec))


@dataclass(frozen=True)
class EigenPair:
    """One solved level: canonical quasi-momentum, energy, eigenvector and
    the residual diagnostics of both solution routes.

    polished is False when the Newton refinement of theta did not converge
    and the oracle eigenvalue was kept; analytic_vector is False when the
    eigenvector fell back to the dense solver (degenerate level or unstable
    closed form).
    """

    theta: complex
    energy: complex
    vector: np.ndarray
    char_residual: float
    matvec_residual: float
    polished: bool = True
    analytic_vector: bool = True

    def is_real(self, tols: Tolerances = DEFAULT_TOLS) -> bool:
        """Whether the energy counts as real at the reality tolerance."""
        return abs(self.energy.imag) <= tols.reality * (1.0 + abs(self.energy))
