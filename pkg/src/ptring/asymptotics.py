"""Perturbative and large-gain/loss predictors for the ring spectrum.

Small-parameter expansions around the free-ring quasi-momenta 2*pi*m/N give
the leading response to the gain/loss strength (at zero onsite energy) and to
the onsite energy (at zero gain/loss).  In the opposite, strong-coupling
limit the ring decouples into the two lead sites plus two open sub-chains;
the surviving quasi-momenta classify into regular, exactly-singular and
half-power families according to the divisibility structure of the branch
lengths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .config import ConfigError, RingConfig


class LargeEtaKind(Enum):
    REGULAR = "regular"
    SINGULAR_EXACT = "singular_exact"
    HALF_POWER = "half_power"


@dataclass(frozen=True)
class LargeEtaClass:
    """Strong-coupling family of one surviving quasi-momentum.

    first_correction is the coefficient of 1/|alpha|^2 for the regular kind,
    the coefficient of 1/|alpha| for the half-power kind (one of the +/- pair)
    and 0 for exactly singular momenta.
    """

    theta0: float
    kind: LargeEtaKind
    first_correction: complex


_EDGE_TOL = 1e-12


def delta_theta_eta(theta0: float, cfg: RingConfig) -> complex:
    """Leading quasi-momentum shift per unit gain/loss at zero onsite energy.

    For interior free-ring momenta the shift is imaginary (conjugate pair
    splitting); for theta0 in {0, pi} the level stays real and the returned
    shift is the real special-case value sqrt(d*(N-d))/N.
    """
    n, d = cfg.n_sites, cfg.d
    if abs(theta0) < _EDGE_TOL or abs(theta0 - math.pi) < _EDGE_TOL:
        return complex(math.sqrt(d * (n - d)) / n)
    s = math.sin(theta0)
    return 1j * math.sin(d * theta0) / (n * s)


def delta_theta_a(theta0: float, cfg: RingConfig) -> complex:
    """Leading quasi-momentum shift from the onsite energy at zero gain/loss.

    Interior momenta shift linearly in a with the real coefficient returned
    here (positive square-root branch).  At theta0 = 0 the expansion is in
    sqrt(a) with coefficient i*sqrt(2/N) (energy 2*cosh(sqrt(2a/N))); at
    theta0 = pi the sqrt(a) coefficient is sqrt(2/N).
    """
    n, d = cfg.n_sites, cfg.d
    if abs(theta0) < _EDGE_TOL:
        return 1j * math.sqrt(2.0 / n)
    if abs(theta0 - math.pi) < _EDGE_TOL:
        return complex(math.sqrt(2.0 / n))
    s = math.sin(theta0)
    return complex((-1.0 / s + math.cos(d * theta0) / abs(s)) / n)


def localized_pair_energy(a: float, eta: float) -> tuple[complex, complex]:
    """Asymptotic energies of the pair localized at the gain and loss sites.

    Valid for |a + i*eta| > 1; the two returned energies correspond to the
    gain (+i*eta) and loss (-i*eta) sites and are conjugates of each other.
    """
    alpha = complex(a, eta)
    if abs(alpha) <= 1.0:
        raise ConfigError(f"localized-pair asymptotics need |a+i*eta| > 1, got {abs(alpha):.3f}")
    plus = alpha + 1.0 / alpha
    minus = alpha.conjugate() + 1.0 / alpha.conjugate()
    return plus, minus


def _branch_g_deriv(theta0: float, d: int, nd: int) -> float:
    """Derivative of sin(d*theta)*sin((N-d)*theta) at theta0."""
    return d * math.cos(d * theta0) * math.sin(nd * theta0) + nd * math.sin(d * theta0) * math.cos(
        nd * theta0
    )


def classify_large_eta(cfg: RingConfig) -> list[LargeEtaClass]:
    """Enumerate and classify the strong-coupling quasi-momenta of a PT ring.

    Candidates are pi*m/d and pi*m/(N-d) on (0, pi), deduplicated exactly;
    shared roots of both branch factors split into exactly-singular momenta
    (even N*m/q) and half-power momenta (odd N*m/q) whose imaginary part
    decays like 1/|alpha|.
    """
    if not cfg.is_pt:
        raise ConfigError("large-eta classification assumes a PT-mode configuration")
    n, d = cfg.n_sites, cfg.d
    nd = n - d
    fractions: set[Fraction] = set()
    for m in range(1, d):
        fractions.add(Fraction(m, d))
    for m in range(1, nd):
        fractions.add(Fraction(m, nd))

    out: list[LargeEtaClass] = []
    for frac in sorted(fractions):
        theta0 = math.pi * float(frac)
        g1 = _branch_g_deriv(theta0, d, nd)
        # exact criterion: theta0 = pi*m/q annihilates both branch factors
        # iff q divides both d and N-d (equivalently d and N)
        q = frac.denominator
        shared = (d % q == 0) and (nd % q == 0)
        if shared:
            m = frac.numerator
            if (n * m // q) % 2 == 0:
                out.append(LargeEtaClass(theta0, LargeEtaKind.SINGULAR_EXACT, 0.0))
            else:
                theta1 = 2j * math.sin(theta0) / math.sqrt(d * nd)
                out.append(LargeEtaClass(theta0, LargeEtaKind.HALF_POWER, theta1))
            continue
        if abs(g1) < 1e-12:
            raise ConfigError(
                f"branch-factor derivative vanished unexpectedly at theta0={theta0}"
            )
        # regular: real first-order slope from the expansion of the
        # characteristic equation divided by |alpha|^2
        s = math.sin(theta0)
        free_part = 2.0 * (1.0 - math.cos(n * theta0)) + 2.0 * cfg.a * (
            math.sin(n * theta0) / s
        )
        theta1 = free_part * s * s / g1
        out.append(LargeEtaClass(theta0, LargeEtaKind.REGULAR, complex(theta1)))
    return out
