"""Hamiltonian construction, characteristic function and closed-form vectors."""

import cmath
import math

import numpy as np
import pytest

from ptring import (
    DegenerateThetaError,
    RingConfig,
    boundary_matrix,
    build_hamiltonian,
    char_fn,
    char_scale,
    eigvec_from_theta,
    energy_of,
    theta_of,
)
from ptring.ring import leading_index, matvec_residual, sin_ratio


def test_hamiltonian_free_ring_eigenvalues():
    cfg = RingConfig.pt(4, 1, 2, 0.0, 0.0)
    ev = np.sort(np.linalg.eigvals(build_hamiltonian(cfg)).real)
    assert np.allclose(ev, [-2.0, 0.0, 0.0, 2.0], atol=1e-12)


def test_hamiltonian_traces():
    cfg = RingConfig(6, 1, 3, 0.5 + 1.5j, 0.5 - 1.5j)
    h = build_hamiltonian(cfg)
    assert np.isclose(np.trace(h), 1.0)
    # 2N + alpha^2 + beta^2 = 12 + 2(a^2 - eta^2)
    assert np.isclose(np.trace(h @ h), 12 + 2 * (0.25 - 2.25))


def test_hamiltonian_structure():
    cfg = RingConfig.pt(7, 2, 5, 0.3, 0.8)
    h = build_hamiltonian(cfg)
    assert h[0, 6] == 1.0 and h[6, 0] == 1.0
    assert h[1, 1] == cfg.alpha and h[4, 4] == cfg.beta
    off = h.copy()
    np.fill_diagonal(off, 0.0)
    assert np.count_nonzero(off) == 2 * 7


def test_invalid_leads_rejected():
    from ptring import ConfigError

    with pytest.raises(ConfigError):
        RingConfig.pt(6, 3, 3, 0.0, 0.0)
    with pytest.raises(ConfigError):
        RingConfig.pt(6, 0, 3, 0.0, 0.0)
    with pytest.raises(ConfigError):
        RingConfig.pt(2, 1, 2, 0.0, 0.0)
    with pytest.raises(ConfigError):
        RingConfig.pt(6, 2, 7, 0.0, 0.0)


def test_char_fn_symmetric_lead_root():
    # theta = pi/3 solves the N=6, d=3 ring for any PT defect strength
    for a, eta in ((0.0, 0.0), (0.5, 0.7), (-1.2, 3.0)):
        cfg = RingConfig.pt(6, 1, 4, a, eta)
        assert abs(char_fn(math.pi / 3, cfg)) <= 1e-12 * char_scale(math.pi / 3, cfg)


def test_char_fn_free_ring_roots():
    for n in (4, 5, 8):
        cfg = RingConfig.pt(n, 1, 2, 0.0, 0.0)
        for m in range(n):
            theta = 2 * math.pi * m / n
            assert abs(char_fn(theta, cfg)) <= 1e-10


def test_char_fn_accidental_root():
    # the three-term cancellation 1 - 1 - 0 at theta = pi/3
    cfg = RingConfig.pt(5, 1, 3, 0.5, 0.7)
    assert abs(char_fn(math.pi / 3, cfg)) <= 1e-12


def test_char_fn_guard_band_continuity():
    # limit evaluation agrees with the direct formula across the guard edge
    cfg = RingConfig.pt(7, 2, 5, 0.4, 1.1)
    for base in (0.0, math.pi):
        inside = base + 3e-7  # |sin| below the guard band
        outside = base + 2e-6
        f_in = char_fn(inside, cfg)
        f_out = char_fn(outside, cfg)
        # the function is smooth there; values at nearby points stay close
        assert abs(f_in - f_out) < 1e-3 * (1 + abs(f_out))


def test_sin_ratio_matches_direct():
    rng = np.random.default_rng(7)
    for _ in range(50):
        theta = complex(rng.uniform(0.1, 3.0), rng.normal() * 0.5)
        m = int(rng.integers(-12, 13))
        direct = cmath.sin(m * theta) / cmath.sin(theta)
        assert abs(sin_ratio(m, theta) - direct) <= 1e-9 * (1 + abs(direct))


def test_boundary_matrix_free_ring_det_zero():
    cfg = RingConfig.pt(6, 1, 3, 0.0, 0.0)
    bm = boundary_matrix(2 * math.pi / 6, cfg)
    assert abs(bm.det) <= 1e-12


def test_boundary_matrix_nonzero_off_root():
    cfg = RingConfig.pt(6, 1, 4, 0.5, 1.0)
    rng = np.random.default_rng(3)
    for _ in range(20):
        theta = complex(rng.uniform(0.2, 2.9), rng.normal() * 0.3)
        if abs(char_fn(theta, cfg)) / char_scale(theta, cfg) < 1e-4:
            continue
        assert abs(boundary_matrix(theta, cfg).det) > 1e-8


def test_boundary_det_and_char_fn_co_vanish():
    # on solved spectra, both vanish together; off-root, neither does
    from ptring import solve_spectrum

    cfg = RingConfig.pt(8, 2, 6, 0.7, 0.9)
    for pair in solve_spectrum(cfg):
        scale = char_scale(pair.theta, cfg)
        bm = boundary_matrix(pair.theta, cfg)
        bscale = 1 + abs(bm.a * bm.d) + abs(bm.b * bm.c)
        assert abs(char_fn(pair.theta, cfg)) <= 1e-10 * scale
        assert abs(bm.det) <= 1e-8 * bscale


def test_eigvec_singular_state_vanishes_at_leads():
    cfg = RingConfig.pt(6, 1, 4, 0.5, 0.9)
    vec = eigvec_from_theta(math.pi / 3, cfg)
    assert abs(vec[0]) <= 1e-12
    assert abs(vec[3]) <= 1e-12
    h = build_hamiltonian(cfg)
    assert matvec_residual(vec, energy_of(math.pi / 3), h) <= 1e-10


def test_eigvec_uniform_at_theta_zero():
    cfg = RingConfig.pt(5, 1, 2, 0.0, 0.0)
    vec = eigvec_from_theta(0.0, cfg)
    assert np.allclose(vec, np.ones(5) / math.sqrt(5), atol=1e-10)


def test_eigvec_accidental_state_couples_to_leads():
    cfg = RingConfig.pt(5, 1, 3, 0.5, 0.7)
    vec = eigvec_from_theta(math.pi / 3, cfg)
    assert abs(vec[0]) > 1e-3
    assert abs(vec[2]) > 1e-3


def test_eigvec_degenerate_theta_raises():
    cfg = RingConfig.pt(6, 1, 3, 0.0, 0.0)
    with pytest.raises(DegenerateThetaError):
        eigvec_from_theta(2 * math.pi / 6, cfg)


def test_eigvec_phase_convention():
    cfg = RingConfig.pt(7, 1, 4, 0.3, 0.6)
    from ptring import solve_spectrum

    for pair in solve_spectrum(cfg):
        j = leading_index(pair.vector)
        lead = pair.vector[j]
        assert lead.imag == pytest.approx(0.0, abs=1e-12)
        assert lead.real > 0
        assert np.linalg.norm(pair.vector) == pytest.approx(1.0, abs=1e-12)


def test_energy_theta_basic_values():
    assert energy_of(math.pi / 3) == pytest.approx(1.0, abs=1e-14)
    x = 0.8
    th = theta_of(2 * math.cosh(x))
    assert th.real == pytest.approx(0.0, abs=1e-14)
    assert th.imag == pytest.approx(x, abs=1e-12)
    th = theta_of(-2 * math.cosh(x))
    assert th.real == pytest.approx(math.pi, abs=1e-12)
    assert th.imag == pytest.approx(x, abs=1e-12)


def test_energy_theta_roundtrip():
    rng = np.random.default_rng(11)
    es = rng.normal(size=1000) * 3 + 1j * rng.normal(size=1000) * 2
    for e in es:
        th = theta_of(e)
        assert 0.0 <= th.real <= math.pi + 1e-15
        assert abs(energy_of(th) - e) <= 1e-12 * (1 + abs(e))
