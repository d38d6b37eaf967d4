"""Predictors for eigenstates whose energy ignores the gain/loss strength.

Two families exist.  Structural singular states follow from divisibility
alone (quasi-momenta 2*pi*r/M with M dividing the ring size and the lead
separation, or twice it); their amplitude vanishes at both leads, so they
are opaque.  Accidental singular states appear at branch momenta pi*m/d
only when the onsite energy is tuned to a specific value; they keep a
finite lead amplitude and conduct.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .config import DEFAULT_TOLS, ConfigError, NumericalError, RingConfig, Tolerances
from .ring import EigenPair, char_fn, char_scale
from .oracle import solve_spectrum

_TAN_CAP = 1e8
_PROBE_ETAS = (0.37, 1.93)


class SingularKind(Enum):
    STRUCTURAL_OPAQUE = "structural_opaque"
    ACCIDENTAL_TRANSPARENT = "accidental_transparent"


@dataclass(frozen=True)
class SingularPrediction:
    """One predicted gain/loss-independent level.

    theta_s is the exact rational multiple of pi (stored as a Fraction of
    pi); tuned_a is the onsite energy required for accidental states and
    None for structural ones; provenance records the integers that produced
    the prediction.
    """

    theta_frac: Fraction  # theta_s = pi * theta_frac
    kind: SingularKind
    tuned_a: float | None
    provenance: tuple[int, int]

    @property
    def theta_s(self) -> float:
        return math.pi * float(self.theta_frac)

    @property
    def energy(self) -> float:
        return 2.0 * math.cos(self.theta_s)


def _verify_root(theta: float, cfg: RingConfig, tols: Tolerances) -> None:
    res = abs(char_fn(theta, cfg, tols)) / char_scale(theta, cfg, tols)
    if res > 1e-9:
        raise NumericalError(
            f"predicted singular momentum theta={theta} is not a root "
            f"(scaled residual {res:.3e}) for {cfg}"
        )


def structural_singular(
    n_sites: int, d: int, tols: Tolerances = DEFAULT_TOLS
) -> list[SingularPrediction]:
    """All structural (opaque) singular momenta for ring size N and separation d.

    Enumerates divisors M of N with 0 < r < M/2 and keeps 2*pi*r/M whenever
    M divides d or 2d; predictions are certified as roots of the
    characteristic function at two unrelated gain/loss probes.
    """
    if not 1 <= d <= n_sites - 1:
        raise ConfigError(f"lead separation must satisfy 1 <= d <= N-1, got d={d}")
    seen: dict[Fraction, tuple[int, int]] = {}
    for m_div in range(2, n_sites + 1):
        if n_sites % m_div != 0:
            continue
        if (d % m_div != 0) and ((2 * d) % m_div != 0):
            continue
        for r in range(1, (m_div + 1) // 2):
            if 2 * r >= m_div:
                continue
            frac = Fraction(2 * r, m_div)
            if frac not in seen:
                seen[frac] = (m_div, r)

    preds = [
        SingularPrediction(frac, SingularKind.STRUCTURAL_OPAQUE, None, prov)
        for frac, prov in seen.items()
    ]
    preds.sort(key=lambda p: p.theta_frac)
    k, kp = 1, 1 + d
    for p in preds:
        for a, eta in ((0.4, _PROBE_ETAS[0]), (-0.8, _PROBE_ETAS[1])):
            _verify_root(p.theta_s, RingConfig.pt(n_sites, k, kp, a, eta), tols)
    return preds


def accidental_singular(
    n_sites: int, d: int, tols: Tolerances = DEFAULT_TOLS
) -> list[SingularPrediction]:
    """Accidental (transparent) singular momenta with their tuned onsite energy.

    Branch momenta pi*m/d (d not dividing N) and pi*m/(N-d) (likewise) that
    are not already structural admit an eta-independent level once the
    onsite energy equals -sin(theta)*tan(N*theta/2); candidates without a
    finite tuning value are discarded.  Each prediction is certified at two
    gain/loss probes.
    """
    if not 1 <= d <= n_sites - 1:
        raise ConfigError(f"lead separation must satisfy 1 <= d <= N-1, got d={d}")
    structural = {p.theta_frac for p in structural_singular(n_sites, d, tols)}
    candidates: dict[Fraction, tuple[int, int]] = {}
    for denom in (d, n_sites - d):
        if denom <= 1 or n_sites % denom == 0:
            continue
        for m in range(1, denom):
            frac = Fraction(m, denom)
            if frac not in candidates:
                candidates[frac] = (denom, m)

    preds = []
    for frac, prov in sorted(candidates.items()):
        if frac in structural:
            continue
        theta = math.pi * float(frac)
        half = n_sites * theta / 2.0
        t = math.tan(half)
        if not math.isfinite(t) or abs(t) > _TAN_CAP:
            continue
        tuned = -math.sin(theta) * t
        pred = SingularPrediction(frac, SingularKind.ACCIDENTAL_TRANSPARENT, tuned, prov)
        for eta in _PROBE_ETAS:
            _verify_root(theta, RingConfig.pt(n_sites, 1, 1 + d, tuned, eta), tols)
        preds.append(pred)
    return preds


def circle_law_check(
    n_sites: int, eta: float, tols: Tolerances = DEFAULT_TOLS
) -> list[complex]:
    """The gain/loss-dependent levels of the symmetric-lead, zero-onsite ring.

    Requires even N with lead separation N/2 and a = 0.  Structural singular
    levels are removed (each is doubly degenerate here); the remaining pair
    must satisfy eta^2 + E^2 = 4 and is returned.
    """
    if n_sites % 2 != 0:
        raise ConfigError("the circle law needs an even ring size")
    d = n_sites // 2
    cfg = RingConfig.pt(n_sites, 1, 1 + d, 0.0, eta)
    pairs = solve_spectrum(cfg, tols)
    energies = [p.energy for p in pairs]

    remaining = list(energies)
    for pred in structural_singular(n_sites, d, tols):
        for _ in range(2):  # doubly degenerate at a = 0
            j = min(range(len(remaining)), key=lambda i: abs(remaining[i] - pred.energy))
            if abs(remaining[j] - pred.energy) < 1e-6:
                remaining.pop(j)
    for e in remaining:
        err = abs(eta * eta + e * e - 4.0)
        if err > 1e-8:
            raise NumericalError(
                f"level {e} violates eta^2 + E^2 = 4 by {err:.3e} at eta={eta}"
            )
    return remaining


def is_opaque(pair: EigenPair, cfg: RingConfig, tols: Tolerances = DEFAULT_TOLS) -> bool:
    """Whether a state has (numerically) zero amplitude on both lead sites."""
    return bool(
        abs(pair.vector[cfg.k - 1]) <= tols.opaque
        and abs(pair.vector[cfg.k_prime - 1]) <= tols.opaque
    )
