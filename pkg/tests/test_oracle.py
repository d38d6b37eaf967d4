"""Dense eigensolver contract and the seeded analytic pipeline."""

import math

import numpy as np
import pytest

from ptring import (
    RingConfig,
    build_hamiltonian,
    char_fn,
    char_scale,
    dense_eig,
    match_multisets,
    multiset_distance,
    solve_spectrum,
)


def random_pt_configs(count, seed, n_max=12):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(3, n_max + 1))
        k = int(rng.integers(1, n))
        kp = int(rng.integers(k + 1, n + 1))
        a = float(rng.uniform(-2, 2))
        eta = float(rng.uniform(-4, 4))
        out.append(RingConfig.pt(n, k, kp, a, eta))
    return out


def test_dense_eig_diagonal():
    res = dense_eig(np.diag([1.0, 2.0j, -3.0]))
    assert multiset_distance(res.eigenvalues, np.array([1.0, 2.0j, -3.0])) <= 1e-12


def test_dense_eig_free_ring():
    cfg = RingConfig.pt(4, 1, 2, 0.0, 0.0)
    res = dense_eig(build_hamiltonian(cfg))
    assert multiset_distance(res.eigenvalues, np.array([2.0, 0.0, 0.0, -2.0])) <= 1e-10


def test_dense_eig_symmetric_leads_multiset():
    # pure gain/loss with d = N/2: two doubly degenerate unit levels plus the
    # pair on the circle eta^2 + E^2 = 4
    cfg = RingConfig.pt(6, 1, 4, 0.0, 1.0)
    res = dense_eig(build_hamiltonian(cfg))
    expected = np.array([1.0, 1.0, -1.0, -1.0, math.sqrt(3), -math.sqrt(3)])
    assert multiset_distance(res.eigenvalues, expected) <= 1e-8


def test_dense_eig_residual_contract():
    rng = np.random.default_rng(5)
    m = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    res = dense_eig(m)
    assert res.residuals.max() <= 1e-8 * np.linalg.norm(m)
    assert len(res.eigenvalues) == 12


def test_dense_eig_rejects_nonsquare():
    with pytest.raises(ValueError):
        dense_eig(np.zeros((3, 4)))


def test_solve_spectrum_real_nondegenerate():
    cfg = RingConfig.pt(6, 1, 3, 0.5, 0.0)
    pairs = solve_spectrum(cfg)
    energies = sorted(p.energy.real for p in pairs)
    assert all(abs(p.energy.imag) <= 1e-12 for p in pairs)
    assert min(np.diff(energies)) > 1e-3  # all simple


def test_solve_spectrum_accidental_level_exact():
    for eta in (0.3, 2.0, 7.5):
        cfg = RingConfig.pt(5, 1, 3, 0.5, eta)
        pairs = solve_spectrum(cfg)
        nearest = min(pairs, key=lambda p: abs(p.energy - 1.0))
        assert abs(nearest.energy - 1.0) <= 1e-9


def test_solve_spectrum_divergent_pair_large_eta():
    cfg = RingConfig.pt(10, 1, 5, 0.5, 10.0)
    pairs = solve_spectrum(cfg)
    ims = sorted((abs(p.energy.imag) for p in pairs), reverse=True)
    assert ims[0] == pytest.approx(10.0, rel=0.05)
    assert ims[1] == pytest.approx(10.0, rel=0.05)


def test_solve_spectrum_residual_contracts():
    for cfg in random_pt_configs(40, seed=23):
        h = build_hamiltonian(cfg)
        hnorm = np.linalg.norm(h)
        for p in solve_spectrum(cfg):
            assert p.matvec_residual <= 1e-8 * max(1.0, hnorm)
            if p.polished:
                assert abs(char_fn(p.theta, cfg)) <= 1e-10 * char_scale(p.theta, cfg)


def test_solve_spectrum_matches_oracle():
    for cfg in random_pt_configs(60, seed=41):
        oracle = dense_eig(build_hamiltonian(cfg))
        analytic = np.array([p.energy for p in solve_spectrum(cfg)])
        assert multiset_distance(analytic, oracle.eigenvalues) <= 1e-8


def test_trace_identities():
    for cfg in random_pt_configs(40, seed=57):
        energies = np.array([p.energy for p in solve_spectrum(cfg)])
        s1 = energies.sum()
        s2 = (energies**2).sum()
        t1 = cfg.alpha + cfg.beta
        t2 = 2 * cfg.n_sites + cfg.alpha**2 + cfg.beta**2
        assert abs(s1 - t1) <= 1e-9 * (1 + abs(t1))
        assert abs(s2 - t2) <= 1e-9 * (1 + abs(t2))


def test_conjugation_closure():
    for cfg in random_pt_configs(40, seed=71):
        energies = np.array([p.energy for p in solve_spectrum(cfg)])
        assert multiset_distance(energies, energies.conj()) <= 1e-9


def test_free_ring_degeneracy_pattern():
    for n in range(3, 13):
        cfg = RingConfig.pt(n, 1, 2, 0.0, 0.0)
        energies = sorted(p.energy.real for p in solve_spectrum(cfg))
        expected = sorted(2 * math.cos(2 * math.pi * m / n) for m in range(n))
        assert np.allclose(energies, expected, atol=1e-10)


def test_match_multisets_tie_breaking():
    left = np.array([1.0 + 0j, 1.0 + 0j, 2.0 + 0j])
    right = np.array([1.0 + 0j, 2.0 + 0j, 1.0 + 0j])
    lv = np.eye(3, dtype=complex)
    rv = np.zeros((3, 3), dtype=complex)
    rv[:, 0] = lv[:, 1]  # right-0 overlaps left-1
    rv[:, 2] = lv[:, 0]  # right-2 overlaps left-0
    rv[:, 1] = lv[:, 2]
    matches = dict(match_multisets(left, right, lv, rv))
    assert matches[0] == 2 and matches[1] == 0 and matches[2] == 1
