"""Brute-force dense eigensolver and the seeded analytic spectrum pipeline.

The dense route (LAPACK general eigensolver) is the arbiter: it guarantees a
complete root set.  Each of its eigenvalues seeds a Newton refinement of the
quasi-momentum on the characteristic function, after which the eigenvector is
rebuilt in closed form; disagreements beyond tolerance indicate a formula bug
and are raised, not papered over.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLS, NumericalError, RingConfig, Tolerances
from .ring import (
    DegenerateThetaError,
    EigenPair,
    build_hamiltonian,
    fix_phase,
    canonical_theta,
    char_fn,
    char_fn_deriv,
    char_scale,
    eigvec_from_theta,
    energy_of,
    matvec_residual,
    theta_of,
)

_MAX_ORACLE_N = 4096


@dataclass(frozen=True)
class OracleResult:
    """Full eigendecomposition with per-pair residuals."""

    eigenvalues: np.ndarray  # (N,)
    eigenvectors: np.ndarray  # (N, N), column i belongs to eigenvalues[i]
    residuals: np.ndarray  # (N,)


def dense_eig(matrix: np.ndarray, tols: Tolerances = DEFAULT_TOLS) -> OracleResult:
    """Eigendecomposition of a general complex square matrix.

    Columns are unit-normalized; raises NumericalError when the solver does
    not converge or a residual exceeds the contract.
    """
    h = np.asarray(matrix, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if h.shape[0] > _MAX_ORACLE_N:
        raise ValueError(f"matrix order {h.shape[0]} exceeds the desk-scale cap {_MAX_ORACLE_N}")
    try:
        values, vectors = np.linalg.eig(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"dense eigensolver did not converge: {exc}") from exc
    vectors = vectors / np.linalg.norm(vectors, axis=0, keepdims=True)
    residuals = np.linalg.norm(h @ vectors - vectors * values, axis=0)
    bound = tols.residual * max(1.0, float(np.linalg.norm(h)))
    worst = float(residuals.max()) if residuals.size else 0.0
    if worst > bound:
        raise NumericalError(f"dense eigensolver residual {worst:.3e} exceeds {bound:.3e}")
    return OracleResult(values, vectors, residuals)


def _newton_polish(
    theta0: complex, cfg: RingConfig, tols: Tolerances, max_iter: int = 60
) -> tuple[complex, bool]:
    """Refine a quasi-momentum seed on the characteristic function.

    Returns (theta, converged).  Divergence (runaway step or no progress)
    reports converged=False with the original seed untouched by the caller.
    """
    theta = theta0
    best, best_res = theta0, abs(char_fn(theta0, cfg, tols)) / char_scale(theta0, cfg, tols)
    for _ in range(max_iter):
        f = char_fn(theta, cfg, tols)
        scale = char_scale(theta, cfg, tols)
        res = abs(f) / scale
        if res < best_res:
            best, best_res = theta, res
        if res <= 1e-15:
            break
        df = char_fn_deriv(theta, cfg, tols)
        if df == 0:
            break
        step = f / df
        if abs(step) > 1.0:  # quasi-momenta live in a strip of width pi
            break
        theta = theta - step
    converged = best_res <= tols.char_accept
    return best, converged


def solve_spectrum(cfg: RingConfig, tols: Tolerances = DEFAULT_TOLS) -> list[EigenPair]:
    """All N eigenpairs of a configuration, analytic route seeded by the oracle.

    Eigenvalues are polished on the characteristic function and vectors are
    rebuilt in closed form; members of degenerate clusters, and thetas where
    the closed form is unstable, keep the oracle eigenvector (flagged).
    A polished energy drifting more than 1e-6 from its seed is a hard error.
    """
    h = build_hamiltonian(cfg)
    oracle = dense_eig(h, tols)
    values = oracle.eigenvalues
    n = cfg.n_sites

    # degenerate clusters: connected components at the clustering tolerance
    order = np.lexsort((values.imag, values.real))
    cluster_id = np.zeros(n, dtype=int)
    cid = 0
    for pos, idx in enumerate(order):
        if pos > 0 and abs(values[idx] - values[order[pos - 1]]) > tols.clustering:
            cid += 1
        cluster_id[idx] = cid
    cluster_sizes = np.bincount(cluster_id)

    pairs: list[EigenPair] = []
    for i in range(n):
        lam = complex(values[i])
        seed = theta_of(lam)
        theta, polished = _newton_polish(seed, cfg, tols)
        if polished:
            theta = canonical_theta(theta)
            energy = energy_of(theta)
            if abs(energy - lam) > 1e-6:
                raise NumericalError(
                    f"polished eigenvalue {energy} drifted from oracle {lam} "
                    f"(config {cfg}); the characteristic function is inconsistent"
                )
        else:
            theta, energy = seed, lam

        vec = None
        analytic = False
        if cluster_sizes[cluster_id[i]] == 1:
            try:
                cand = eigvec_from_theta(theta, cfg, tols)
                if matvec_residual(cand, energy, h) <= tols.residual:
                    vec, analytic = cand, True
            except DegenerateThetaError:
                pass
        if vec is None:
            vec = fix_phase(oracle.eigenvectors[:, i].copy())

        pairs.append(
            EigenPair(
                theta=theta,
                energy=energy,
                vector=vec,
                char_residual=abs(char_fn(theta, cfg, tols)),
                matvec_residual=matvec_residual(vec, energy, h),
                polished=polished,
                analytic_vector=analytic,
            )
        )

    pairs.sort(key=lambda p: (p.energy.real, p.energy.imag))
    return pairs


def match_multisets(
    left: np.ndarray,
    right: np.ndarray,
    left_vectors: np.ndarray | None = None,
    right_vectors: np.ndarray | None = None,
    tie_tol: float = DEFAULT_TOLS.clustering,
) -> list[tuple[int, int]]:
    """Greedy nearest-neighbour pairing of two complex multisets.

    Pairs are consumed globally closest first; near-ties are broken by the
    eigenvector overlap |<v_left, v_right>| when vectors are supplied.
    """
    left = np.asarray(left, dtype=complex)
    right = np.asarray(right, dtype=complex)
    if left.shape != right.shape:
        raise ValueError("multisets must have equal size")
    dist = np.abs(left[:, None] - right[None, :])
    free_l = set(range(len(left)))
    free_r = set(range(len(right)))
    matches: list[tuple[int, int]] = []
    while free_l:
        best = min((dist[i, j], i, j) for i in free_l for j in free_r)
        d0, i0, j0 = best
        if left_vectors is not None and right_vectors is not None:
            ties = [
                (i, j)
                for i in free_l
                for j in free_r
                if dist[i, j] <= d0 + tie_tol
            ]
            if len(ties) > 1:
                overlaps = [
                    (abs(np.vdot(left_vectors[:, i], right_vectors[:, j])), i, j)
                    for i, j in ties
                ]
                _, i0, j0 = max(overlaps)
        matches.append((i0, j0))
        free_l.discard(i0)
        free_r.discard(j0)
    return matches


def multiset_distance(left: np.ndarray, right: np.ndarray) -> float:
    """Largest matched-pair distance under greedy nearest-neighbour pairing."""
    matches = match_multisets(left, right)
    left = np.asarray(left, dtype=complex)
    right = np.asarray(right, dtype=complex)
    return max(abs(left[i] - right[j]) for i, j in matches)
