"""Stationary currents, branch splitting and branch-localization diagnostics.

A real-energy eigenstate carries a time-independent bond current that is
constant on each of the two branches between the leads.  The net current
entering at the gain site equals 2*eta*|u_k|^2 and splits between the
branches in a ratio set by the quasi-momentum; states with a current running
against the source-to-drain direction on one branch exhibit backflow, and
states with vanishing lead amplitude carry no current at all.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .config import DEFAULT_TOLS, NumericalError, RingConfig, Tolerances
from .ring import EigenPair


class TransportClass(Enum):
    TWO_WAY_FORWARD = "two_way_forward"
    BACKFLOW_LEFT = "backflow_left"
    BACKFLOW_RIGHT = "backflow_right"
    OPAQUE = "opaque"
    NON_STATIONARY = "non_stationary"


@dataclass(frozen=True)
class FluxProfile:
    """Per-bond stationary currents of one eigenstate.

    j[n-1] is the current on the bond (n-1, n) for 1-based site n, with site
    0 identified with site N.  j_right is the constant current on the branch
    k < n <= k', j_left the one on the complementary branch; throughput is
    the net source-to-drain transfer j_right - j_left.
    """

    j: np.ndarray
    j_right: float
    j_left: float
    transport_class: TransportClass
    throughput: float


@dataclass(frozen=True)
class BranchWeights:
    """Probability weight on the lead sites and on each branch interior.

    w_short covers the sites strictly between k and k', w_long the remaining
    interior sites; ratio = w_short / (w_short + w_long).
    """

    w_short: float
    w_long: float
    w_leads: float

    @property
    def ratio(self) -> float:
        interior = self.w_short + self.w_long
        if interior == 0.0:
            return 0.5
        return self.w_short / interior


class Directionality(Enum):
    DIRECTIONAL_SHORT = "directional_short"
    DIRECTIONAL_LONG = "directional_long"
    SHARED = "shared"
    DIVERGENT = "divergent"


@dataclass(frozen=True)
class DirectionalityTag:
    """Branch-localization verdict for one state at large gain/loss."""

    energy: complex
    tag: Directionality
    ratio: float
    nearest_short: float
    nearest_long: float


def _branch_bonds(cfg: RingConfig) -> tuple[list[int], list[int]]:
    """0-based indices into j for the k<n<=k' branch and the complementary one."""
    right = [n - 1 for n in range(cfg.k + 1, cfg.k_prime + 1)]
    left = [n - 1 for n in range(1, cfg.k + 1)] + [
        n - 1 for n in range(cfg.k_prime + 1, cfg.n_sites + 1)
    ]
    return right, left


def local_flux(pair: EigenPair, cfg: RingConfig, tols: Tolerances = DEFAULT_TOLS) -> FluxProfile:
    """Bond currents of an eigenstate, classified by transport behaviour.

    Complex-energy states are tagged non-stationary and carry no current
    data; the within-branch constancy of the current is verified and a
    violation raises, since it would mean the state is not an eigenstate.
    """
    if not pair.is_real(tols):
        n = cfg.n_sites
        return FluxProfile(np.zeros(n), 0.0, 0.0, TransportClass.NON_STATIONARY, 0.0)

    u = pair.vector
    prev = np.roll(u, 1)  # prev[n-1] = u_{n-1} with u_0 = u_N
    j = -2.0 * np.imag(u * np.conj(prev))

    right_idx, left_idx = _branch_bonds(cfg)
    j_right = float(np.mean(j[right_idx]))
    j_left = float(np.mean(j[left_idx]))
    spread = max(float(np.std(j[right_idx])), float(np.std(j[left_idx])))
    # a state admitted at the reality tolerance leaks density at a rate
    # bounded by its residual imaginary energy; beyond that the profile is
    # inconsistent with a stationary eigenstate
    limit = max(1e-7, 10.0 * tols.reality * (1.0 + abs(pair.energy)))
    if spread > limit:
        raise NumericalError(
            f"bond current varies within a branch (spread {spread:.3e}); "
            "the state is not stationary"
        )

    zt = tols.zero_flux
    if abs(j_right) <= zt and abs(j_left) <= zt:
        cls = TransportClass.OPAQUE
    elif j_left > zt:
        cls = TransportClass.BACKFLOW_LEFT
    elif j_right < -zt:
        cls = TransportClass.BACKFLOW_RIGHT
    else:
        cls = TransportClass.TWO_WAY_FORWARD
    return FluxProfile(j, j_right, j_left, cls, j_right - j_left)


def branch_flux_closed_form(
    pair: EigenPair, cfg: RingConfig, tols: Tolerances = DEFAULT_TOLS
) -> tuple[float, float]:
    """Branch currents from the closed-form splitting ratio.

    Falls back to the directly computed currents when the denominator
    sin(d*theta) + sin((N-d)*theta) is numerically tiny.
    """
    if not pair.is_real(tols):
        raise NumericalError("closed-form branch currents require a real-energy state")
    theta = pair.theta
    d, nd = cfg.d, cfg.d_complement
    sd = cmath.sin(d * theta)
    snd = cmath.sin(nd * theta)
    denom = sd + snd
    uk2 = abs(pair.vector[cfg.k - 1]) ** 2
    if abs(denom) <= 1e-6:
        profile = local_flux(pair, cfg, tols)
        return profile.j_right, profile.j_left
    eta = cfg.eta
    j_right = 2.0 * eta * (snd / denom).real * uk2
    j_left = -2.0 * eta * (sd / denom).real * uk2
    return float(j_right), float(j_left)


def branch_weights(pair: EigenPair, cfg: RingConfig) -> BranchWeights:
    """Probability weights of one eigenvector on leads and branch interiors."""
    u2 = np.abs(pair.vector) ** 2
    k, kp = cfg.k, cfg.k_prime
    w_leads = float(u2[k - 1] + u2[kp - 1])
    w_short = float(np.sum(u2[k : kp - 1]))  # sites k+1 .. k'-1
    w_long = float(np.sum(u2)) - w_leads - w_short
    return BranchWeights(w_short, w_long, w_leads)


def decoupled_branch_energies(cfg: RingConfig) -> tuple[list[float], list[float]]:
    """Open-chain energies of the two branches once the leads decouple.

    The branch between the leads contributes 2*cos(pi*r/d) for 0 < r < d,
    the complementary branch 2*cos(pi*s/(N-d)) for 0 < s < N-d.
    """
    d, nd = cfg.d, cfg.d_complement
    short = [2.0 * np.cos(np.pi * r / d) for r in range(1, d)]
    long_ = [2.0 * np.cos(np.pi * s / nd) for s in range(1, nd)]
    return short, long_


def classify_directionality(
    pairs: list[EigenPair], cfg: RingConfig, tols: Tolerances = DEFAULT_TOLS
) -> list[DirectionalityTag]:
    """Tag each state by branch localization at large gain/loss.

    The two largest-|Im E| states are the lead-localized divergent pair;
    every other state is directional when its interior weight sits almost
    entirely (ratio >= 0.95 or <= 0.05) in one branch, and shared otherwise.
    The nearest decoupled-branch energies are reported for reference.
    """
    short_e, long_e = decoupled_branch_energies(cfg)
    by_im = sorted(range(len(pairs)), key=lambda i: -abs(pairs[i].energy.imag))
    divergent = set(by_im[:2]) if len(pairs) >= 2 else set()

    tags = []
    for i, pair in enumerate(pairs):
        w = branch_weights(pair, cfg)
        e_re = pair.energy.real
        near_s = min(short_e, key=lambda e: abs(e - e_re)) if short_e else float("nan")
        near_l = min(long_e, key=lambda e: abs(e - e_re)) if long_e else float("nan")
        if i in divergent and not pair.is_real(tols):
            tag = Directionality.DIVERGENT
        elif w.ratio >= 0.95:
            tag = Directionality.DIRECTIONAL_SHORT
        elif w.ratio <= 0.05:
            tag = Directionality.DIRECTIONAL_LONG
        else:
            tag = Directionality.SHARED
        tags.append(DirectionalityTag(pair.energy, tag, w.ratio, near_s, near_l))
    return tags
