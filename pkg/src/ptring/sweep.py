"""Gain/loss-strength continuation of the spectrum and its singular points.

Branches are tracked across an adaptively refined eta grid by optimal
nearest-neighbour assignment in the complex plane; intervals where the
matching is ambiguous (branches moving by a sizable fraction of their
separation, or near-coalescing levels) are bisected up to a depth cap and
otherwise recorded as unresolved coalescences.  Detected real<->complex
transitions are refined by bisection and classified by the fitted splitting
exponent: square root for exceptional points (in either direction) and
linear for the conical degeneracies at eta = 0 of the pure gain/loss ring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .config import DEFAULT_TOLS, NumericalError, RingConfig, Tolerances
from .oracle import solve_spectrum

_MAX_REFINE_DEPTH = 26
_ETA_FLOOR = 1e-8
_EXPONENT_WINDOW = (1e-5, 1e-4)  # |eta - eta_c| decade used for the splitting fit
_EXPONENT_POINTS = 10


class EventKind(Enum):
    EP = "ep"
    REVERSE_EP = "reverse_ep"
    DIABOLICAL = "diabolical"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class SpectrumBranch:
    """One tracked eigenvalue trajectory over the eta grid."""

    eta_grid: np.ndarray
    energies: np.ndarray
    real_mask: np.ndarray


@dataclass(frozen=True)
class SingularityEvent:
    """A located eigenvalue coalescence.

    exponent is the log-log slope of the splitting |E_i - E_j| against
    |eta - eta_c| fitted on the approach side; branches are indices into the
    sweep's branch list.
    """

    eta_c: float
    kind: EventKind
    branches: tuple[int, int]
    exponent: float
    energy_c: complex


@dataclass(frozen=True)
class SweepResult(Sequence):
    """Branches of a sweep plus the template they were computed from.

    Behaves as a sequence of SpectrumBranch; unresolved holds eta intervals
    where branch matching stayed ambiguous at the maximum refinement depth.
    """

    branches: tuple[SpectrumBranch, ...]
    config: RingConfig
    unresolved: tuple[tuple[float, float], ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.branches)

    def __getitem__(self, i):
        return self.branches[i]

    def __iter__(self) -> Iterator[SpectrumBranch]:
        return iter(self.branches)

    @property
    def eta_grid(self) -> np.ndarray:
        return self.branches[0].eta_grid


def _energies_at(cfg: RingConfig, eta: float, tols: Tolerances) -> np.ndarray:
    pairs = solve_spectrum(cfg.with_eta(eta), tols)
    return np.array([p.energy for p in pairs])


def _match(prev: np.ndarray, cur: np.ndarray) -> np.ndarray:
    """Permutation of cur that follows prev under minimal total displacement."""
    cost = np.abs(prev[:, None] - cur[None, :])
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(len(cur), dtype=int)
    perm[rows] = cols
    return cur[perm]


def _needs_refinement(prev: np.ndarray, cur: np.ndarray, tols: Tolerances) -> bool:
    """Ambiguous matching or a near-coalescence at the new grid point.

    A matching is ambiguous when swapping the labels of two branches would
    cost nearly as little as keeping them while the pair is distinct at both
    endpoints; pairs that coincide at an endpoint (degenerate levels) admit
    either labelling and are skipped.
    """
    n = len(prev)
    close_tol = 10.0 * tols.clustering
    for i in range(n):
        for j in range(i + 1, n):
            sep_prev = abs(prev[i] - prev[j])
            sep_cur = abs(cur[i] - cur[j])
            if tols.clustering <= sep_cur < close_tol:
                return True  # distinct levels about to cross
            if sep_prev < tols.clustering or sep_cur < tols.clustering:
                continue
            keep = abs(cur[i] - prev[i]) + abs(cur[j] - prev[j])
            swap = abs(cur[j] - prev[i]) + abs(cur[i] - prev[j])
            if swap - keep < 0.5 * keep:
                return True
    return False


def _despeckle(mask: np.ndarray, grid: np.ndarray, width: float = 1e-4) -> np.ndarray:
    """Remove reality-flag speckle caused by eigensolver noise at crossings.

    A run of flags narrower than width in eta whose two neighbouring runs
    agree with each other is absorbed into them; runs touching the sweep
    boundary are kept as they are.
    """
    mask = mask.copy()
    changed = True
    while changed:
        changed = False
        runs = []
        start = 0
        n = len(mask)
        for i in range(1, n + 1):
            if i == n or mask[i] != mask[start]:
                runs.append([start, i - 1])
                start = i
        for r in range(1, len(runs) - 1):
            lo, hi = runs[r]
            if grid[hi] - grid[lo] < width and mask[runs[r - 1][0]] == mask[runs[r + 1][0]]:
                mask[lo : hi + 1] = mask[runs[r - 1][0]]
                changed = True
                break
    return mask


def sweep_spectrum(
    cfg_template: RingConfig,
    eta_min: float,
    eta_max: float,
    n_points: int,
    tols: Tolerances = DEFAULT_TOLS,
) -> SweepResult:
    """Track all N energy branches over [eta_min, eta_max]."""
    if not eta_min < eta_max:
        raise ValueError("eta_min must be smaller than eta_max")
    if n_points < 2:
        raise ValueError("need at least two grid points")

    base = np.linspace(eta_min, eta_max, n_points)
    first = _energies_at(cfg_template, base[0], tols)
    order = np.lexsort((first.imag, first.real))
    grid: list[float] = [float(base[0])]
    rows: list[np.ndarray] = [first[order]]
    unresolved: list[tuple[float, float]] = []

    def extend(eta_right: float, e_right_raw: np.ndarray, depth: int) -> None:
        e_left = rows[-1]
        eta_left = grid[-1]
        e_right = _match(e_left, e_right_raw)
        if _needs_refinement(e_left, e_right, tols):
            if depth < _MAX_REFINE_DEPTH and (eta_right - eta_left) > _ETA_FLOOR:
                eta_mid = 0.5 * (eta_left + eta_right)
                extend(eta_mid, _energies_at(cfg_template, eta_mid, tols), depth + 1)
                extend(eta_right, e_right_raw, depth + 1)
                return
            unresolved.append((eta_left, eta_right))
        grid.append(float(eta_right))
        rows.append(e_right)

    for eta in base[1:]:
        extend(float(eta), _energies_at(cfg_template, float(eta), tols), 0)

    etas = np.array(grid)
    table = np.array(rows)  # (n_grid, N)
    branches = []
    for b in range(table.shape[1]):
        energies = table[:, b].copy()
        mask = np.abs(energies.imag) <= tols.reality * (1.0 + np.abs(energies))
        branches.append(SpectrumBranch(etas, energies, _despeckle(mask, etas)))
    return SweepResult(tuple(branches), cfg_template, tuple(unresolved))


def count_real(cfg_template: RingConfig, eta: float, tols: Tolerances = DEFAULT_TOLS) -> int:
    """Number of eigenvalues that are real (at the reality tolerance) at eta."""
    return sum(p.is_real(tols) for p in solve_spectrum(cfg_template.with_eta(eta), tols))


def pt_threshold(
    cfg_template: RingConfig,
    tols: Tolerances = DEFAULT_TOLS,
    eta_cap: float = 256.0,
) -> float:
    """Smallest eta >= 0 at which the spectrum stops being entirely real.

    Located by a geometric scan followed by bisection to the eta resolution;
    a return value at the resolution scale means the symmetric phase is
    absent (the spectrum is complex for any eta > 0).
    """
    n = cfg_template.n_sites

    def all_real(eta: float) -> bool:
        return count_real(cfg_template, eta, tols) == n

    lo = 0.0
    hi = None
    probe = 0.02
    while probe <= eta_cap:
        if all_real(probe):
            lo = probe
        else:
            hi = probe
            break
        probe *= 1.5
    if hi is None:
        raise NumericalError(
            f"no complex eigenvalue found up to eta={eta_cap}; cannot bracket the threshold"
        )
    while hi - lo > tols.eta_resolution:
        mid = 0.5 * (lo + hi)
        if all_real(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --------------------------------------------------------------------------
# event detection

def _pair_split(
    cfg: RingConfig, eta: float, center: complex, tols: Tolerances, distinct_tol: float = 0.0
) -> tuple[complex, complex]:
    """The two eigenvalues closest to a coalescence-energy estimate.

    With distinct_tol > 0 the second member must differ from the first by
    more than that amount, so that an exactly degenerate bystander level at
    the same energy is not mistaken for the approaching partner.
    """
    energies = _energies_at(cfg, eta, tols)
    order = np.argsort(np.abs(energies - center))
    e1 = complex(energies[order[0]])
    for j in order[1:]:
        e2 = complex(energies[j])
        if abs(e2 - e1) > distinct_tol:
            return e1, e2
    return e1, complex(energies[order[1]])


def _pair_is_complex(e1: complex, e2: complex, tols: Tolerances) -> bool:
    return any(abs(e.imag) > tols.reality * (1.0 + abs(e)) for e in (e1, e2))


def _bisect_transition(
    cfg: RingConfig,
    eta_lo: float,
    eta_hi: float,
    center: complex,
    complex_side_high: bool,
    tols: Tolerances,
) -> tuple[float, complex]:
    """Refine a real<->complex transition bracketed by [eta_lo, eta_hi]."""
    while eta_hi - eta_lo > tols.eta_resolution:
        mid = 0.5 * (eta_lo + eta_hi)
        e1, e2 = _pair_split(cfg, mid, center, tols)
        center = 0.5 * (e1 + e2)
        if _pair_is_complex(e1, e2, tols) == complex_side_high:
            eta_hi = mid
        else:
            eta_lo = mid
    eta_c = 0.5 * (eta_lo + eta_hi)
    e1, e2 = _pair_split(cfg, eta_c, center, tols)
    return eta_c, 0.5 * (e1 + e2)


def _fit_exponent(
    cfg: RingConfig, eta_c: float, center: complex, eta_lo_limit: float, tols: Tolerances
) -> float:
    """Log-log slope of the pair splitting against the distance to eta_c.

    Sampled on the approach side below eta_c whenever the window fits above
    the sweep's lower limit, otherwise above (the eta_c = 0 boundary case).
    """
    wlo, whi = _EXPONENT_WINDOW
    deltas = np.logspace(math.log10(wlo), math.log10(whi), _EXPONENT_POINTS)
    if eta_c - whi >= eta_lo_limit:
        etas = eta_c - deltas
    else:
        etas = eta_c + deltas
    splits = []
    for eta in etas:
        e1, e2 = _pair_split(cfg, float(eta), center, tols, distinct_tol=tols.clustering)
        splits.append(abs(e1 - e2))
    splits = np.asarray(splits)
    if np.any(splits <= 0.0):
        return float("nan")
    slope = np.polyfit(np.log(deltas), np.log(splits), 1)[0]
    return float(slope)


def _golden_minimum(
    cfg: RingConfig, eta_lo: float, eta_hi: float, center: complex, tols: Tolerances
) -> float:
    """Golden-section minimizer of the pair distance on [eta_lo, eta_hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0

    def split_at(eta: float) -> float:
        e1, e2 = _pair_split(cfg, eta, center, tols, distinct_tol=tols.clustering)
        return abs(e1 - e2)

    a, b = eta_lo, eta_hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = split_at(c), split_at(d)
    while b - a > tols.eta_resolution:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = split_at(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = split_at(d)
    return 0.5 * (a + b)


_STABLE_RUN_WIDTH = 1e-4


def _stable_transitions(mask: np.ndarray, grid: np.ndarray) -> list[tuple[int, int, bool]]:
    """Reality transitions between stable runs of one branch's mask.

    Near an exact level crossing the eigensolver noise can flip the reality
    flag back and forth over a sub-1e-6 window; such micro-runs are dropped
    and only transitions between runs of substantial eta extent (or runs
    touching the sweep boundary) survive.  Returns (i_left, i_right,
    real_before) with grid indices bracketing the transition.
    """
    runs: list[tuple[int, int, bool]] = []
    start = 0
    n = len(mask)
    for i in range(1, n + 1):
        if i == n or mask[i] != mask[start]:
            runs.append((start, i - 1, bool(mask[start])))
            start = i
    stable = [
        r for r in runs
        if grid[r[1]] - grid[r[0]] >= _STABLE_RUN_WIDTH or r[0] == 0 or r[1] == n - 1
    ]
    out = []
    for a, b in zip(stable, stable[1:]):
        if a[2] != b[2]:
            out.append((a[1], b[0], a[2]))
    return out


def detect_events(sweep: SweepResult, tols: Tolerances = DEFAULT_TOLS) -> list[SingularityEvent]:
    """Locate and classify all coalescences seen by a sweep.

    Real->complex transitions are exceptional points, complex->real ones
    reverse exceptional points; transitions at the eta = 0 boundary of a
    pure gain/loss ring (zero onsite energy) with a linear splitting are
    conical (diabolical) degeneracies.  A fitted exponent outside the band
    expected for the transition type yields an unresolved event carrying the
    raw exponent.
    """
    cfg = sweep.config
    grid = sweep.eta_grid
    eta_lo_limit = float(grid[0])

    # collect per-branch reality transitions and pair them by conjugation
    raw: list[tuple[int, int, int, bool]] = []  # (branch, i_left, i_right, real_before)
    for b, branch in enumerate(sweep.branches):
        for il, ir, real_before in _stable_transitions(branch.real_mask, grid):
            raw.append((b, il, ir, real_before))

    events: list[SingularityEvent] = []
    used: set[int] = set()
    claimed_intervals: list[tuple[float, float]] = []
    for t1, (b, il, ir, real_before) in enumerate(raw):
        if t1 in used:
            continue
        partner = None
        partner_t = None
        complex_idx = ir if real_before else il
        real_idx = il if real_before else ir
        e_b = sweep.branches[b].energies[complex_idx]
        best = math.inf
        for t2 in range(len(raw)):
            c, il2, ir2, rb2 = raw[t2]
            if t2 == t1 or t2 in used or c == b or rb2 != real_before:
                continue
            if grid[ir2] < grid[il] or grid[il2] > grid[ir]:
                continue  # transition windows do not overlap
            e_c = sweep.branches[c].energies[ir2 if rb2 else il2]
            gap = abs(e_c - e_b.conjugate())
            if gap < best:
                best, partner, partner_t = gap, c, t2
        if partner is None:
            continue
        used.add(t1)
        used.add(partner_t)

        center = 0.5 * (
            sweep.branches[b].energies[real_idx]
            + sweep.branches[partner].energies[real_idx]
        )
        eta_c, energy_c = _bisect_transition(
            cfg, float(grid[il]), float(grid[ir]), complex(center), real_before, tols
        )
        exponent = _fit_exponent(cfg, eta_c, energy_c, eta_lo_limit, tols)
        near_zero = eta_c - eta_lo_limit <= 10.0 * tols.eta_resolution and abs(cfg.a) < 1e-12
        if near_zero:
            kind = EventKind.DIABOLICAL if 0.85 <= exponent <= 1.15 else EventKind.UNRESOLVED
        elif 0.35 <= exponent <= 0.65:
            kind = EventKind.EP if real_before else EventKind.REVERSE_EP
        else:
            kind = EventKind.UNRESOLVED
        claimed_intervals.append((float(grid[il]), float(grid[ir])))
        events.append(
            SingularityEvent(eta_c, kind, (min(b, partner), max(b, partner)), exponent, energy_c)
        )

    # ambiguous-matching intervals that did not coincide with a transition:
    # merge contiguous ones and report the locally closest pair of each as an
    # unresolved coalescence
    merged: list[list[float]] = []
    for lo, hi in sorted(sweep.unresolved):
        if merged and lo - merged[-1][1] <= 1e-6:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    for lo, hi in merged:
        if any(not (hi <= clo or lo >= chi) for clo, chi in claimed_intervals):
            continue
        i = int(np.searchsorted(grid, lo))
        row = np.array([br.energies[i] for br in sweep.branches])
        best_pair, best_sep = None, math.inf
        for p in range(len(row)):
            for q in range(p + 1, len(row)):
                sep = abs(row[p] - row[q])
                if tols.clustering < sep < best_sep:
                    best_sep, best_pair = sep, (p, q)
        if best_pair is None:
            continue
        center = 0.5 * (row[best_pair[0]] + row[best_pair[1]])
        eta_star = _golden_minimum(cfg, lo, hi, complex(center), tols)
        e1, e2 = _pair_split(cfg, eta_star, complex(center), tols)
        exponent = _fit_exponent(cfg, eta_star, 0.5 * (e1 + e2), eta_lo_limit, tols)
        events.append(
            SingularityEvent(eta_star, EventKind.UNRESOLVED, best_pair, exponent, 0.5 * (e1 + e2))
        )

    events.sort(key=lambda ev: ev.eta_c)
    return events
