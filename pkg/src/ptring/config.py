"""Ring configuration and shared numerical tolerances."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace


class ConfigError(ValueError):
    """Invalid ring configuration or CLI input."""


class NumericalError(RuntimeError):
    """A numerical routine failed to meet its accuracy contract."""


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared across the package.

    reality      : |Im E| <= reality*(1+|E|) marks an eigenvalue as real.
    clustering   : eigenvalues closer than this form a degenerate cluster.
    residual     : bound on ||H u - E u|| for accepted eigenpairs.
    char_accept  : scaled bound on |f(theta)| for a polished quasi-momentum.
    guard_band   : |sin theta| below which limit formulas are used.
    opaque       : lead amplitude below which a state is opaque.
    zero_flux    : branch currents within this of zero count as no flux.
    eta_resolution : bisection resolution for critical gain/loss strengths.
    """

    reality: float = 1e-9
    clustering: float = 1e-7
    residual: float = 1e-8
    char_accept: float = 1e-10
    guard_band: float = 1e-6
    opaque: float = 1e-9
    zero_flux: float = 1e-10
    eta_resolution: float = 1e-8


DEFAULT_TOLS = Tolerances()

#: Environment variable holding a reality-tolerance override for the CLI.
TOL_ENV_VAR = "PTRING_TOL"


def tolerances_from_env() -> Tolerances:
    """Default tolerances, with the reality tolerance taken from PTRING_TOL if set."""
    raw = os.environ.get(TOL_ENV_VAR)
    if raw is None:
        return DEFAULT_TOLS
    try:
        value = float(raw)
    except ValueError as exc:
        raise ConfigError(f"{TOL_ENV_VAR} must be a float, got {raw!r}") from exc
    if value <= 0:
        raise ConfigError(f"{TOL_ENV_VAR} must be positive, got {value}")
    return replace(DEFAULT_TOLS, reality=value)


@dataclass(frozen=True)
class RingConfig:
    """A tight-binding ring with unit hoppings and two complex onsite defects.

    Sites are numbered 1..n_sites around the ring; the defects sit at the
    lead positions k and k_prime (k < k_prime).  In PT mode the defects are
    a +/- i*eta: site k carries the gain (+i*eta), site k_prime the loss.
    """

    n_sites: int
    k: int
    k_prime: int
    alpha: complex
    beta: complex

    def __post_init__(self) -> None:
        if not isinstance(self.n_sites, int) or self.n_sites < 3:
            raise ConfigError(f"n_sites must be an integer >= 3, got {self.n_sites}")
        if not (isinstance(self.k, int) and isinstance(self.k_prime, int)):
            raise ConfigError("lead positions must be integers")
        if not (1 <= self.k < self.k_prime <= self.n_sites):
            raise ConfigError(
                f"lead positions must satisfy 1 <= k < k' <= N, got "
                f"k={self.k}, k'={self.k_prime}, N={self.n_sites}"
            )
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))

    @classmethod
    def pt(cls, n_sites: int, k: int, k_prime: int, a: float, eta: float) -> "RingConfig":
        """PT-symmetric configuration: defects a+i*eta at k and a-i*eta at k'."""
        return cls(n_sites, k, k_prime, complex(a, eta), complex(a, -eta))

    @property
    def d(self) -> int:
        """Lead separation k' - k along the ring."""
        return self.k_prime - self.k

    @property
    def d_complement(self) -> int:
        """Lead separation along the other branch, N - (k' - k)."""
        return self.n_sites - self.d

    @property
    def is_pt(self) -> bool:
        return self.beta == self.alpha.conjugate()

    @property
    def a(self) -> float:
        """Real onsite energy at the leads (PT mode)."""
        return self.alpha.real

    @property
    def eta(self) -> float:
        """Gain/loss strength (PT mode)."""
        return self.alpha.imag

    def with_eta(self, eta: float) -> "RingConfig":
        """Same geometry and onsite energy, different gain/loss strength."""
        if not self.is_pt:
            raise ConfigError("with_eta is only meaningful for PT-mode configurations")
        return RingConfig.pt(self.n_sites, self.k, self.k_prime, self.a, eta)

    def to_json_dict(self) -> dict:
        if self.is_pt:
            return {
                "n_sites": self.n_sites,
                "k": self.k,
                "k_prime": self.k_prime,
                "a": self.a,
                "eta": self.eta,
            }
        return {
            "n_sites": self.n_sites,
            "k": self.k,
            "k_prime": self.k_prime,
            "alpha_re": self.alpha.real,
            "alpha_im": self.alpha.imag,
            "beta_re": self.beta.real,
            "beta_im": self.beta.imag,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "RingConfig":
        try:
            n = int(data["n_sites"])
            k = int(data["k"])
            kp = int(data["k_prime"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed ring configuration: {data!r}") from exc
        if "a" in data or "eta" in data:
            return cls.pt(n, k, kp, float(data.get("a", 0.0)), float(data.get("eta", 0.0)))
        try:
            alpha = complex(float(data["alpha_re"]), float(data["alpha_im"]))
            beta = complex(float(data["beta_re"]), float(data["beta_im"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed ring configuration: {data!r}") from exc
        return cls(n, k, kp, alpha, beta)
