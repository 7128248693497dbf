import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from swiftlink.channel import random_sparse_beamspace, virtual_channel, unmask, Ray, synth_narrowband
from swiftlink.estimator import (cfo_range, compensate_and_combine, estimate_cfo, g_vector,
                                 polish_cfo, run_type1, run_type2)
from swiftlink.measurement import complex_noise, measure_trajectory
from swiftlink.metrics import nmse
from swiftlink.numerics import dft2, idft2
from swiftlink.recovery import recover_masked_beamspace
from swiftlink.sequences import spectral_mask, zc
from swiftlink.trajectories import p_cnt, swiftlink_trajectory


def fine_grid_cfo(g, spacing, limit, n=400001):
    d = np.linspace(-limit, limit, n)
    k = np.arange(len(g))
    vals = np.abs(np.exp(-1j * spacing * np.outer(d, k)) @ g)
    return d[np.argmax(vals)]


def test_g_vector_examples():
    np.testing.assert_allclose(g_vector(np.ones((3, 3)), np.ones((3, 3))), [1, 2, 3, 2, 1])
    np.testing.assert_array_equal(g_vector(np.zeros((4, 4)), np.zeros((4, 4))), 0)
    with pytest.raises(ValueError):
        g_vector(np.ones((3, 3)), np.ones((4, 4)))
    rng = np.random.default_rng(0)
    N, eps = 6, 0.17
    G_n = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    g = g_vector(G_n * p_cnt(N, 2 * eps), G_n)
    w = np.array([sum(abs(G_n[r, k - r]) ** 2 for r in range(N) if 0 <= k - r < N)
                  for k in range(2 * N - 1)])
    np.testing.assert_allclose(g, w * np.exp(2j * eps * np.arange(2 * N - 1)), atol=1e-12)


def test_estimate_cfo_triangle():
    k = np.arange(31)
    w = np.minimum(k + 1, 31 - k)
    g = w * np.exp(2j * 0.3 * k)
    est = estimate_cfo(g, 2, oversample=64)
    assert abs(est - 0.3) < 1e-6
    assert abs(est - fine_grid_cfo(g, 2, np.pi / 2)) < 1e-5


def test_estimate_cfo_dc_and_errors():
    assert estimate_cfo(np.ones(9)) == pytest.approx(0, abs=1e-12)
    with pytest.raises(ValueError):
        estimate_cfo(np.zeros(9))
    with pytest.raises(ValueError):
        estimate_cfo(np.ones(9), spacing=3)
    with pytest.raises(ValueError):
        estimate_cfo(np.ones(9), oversample=2)


def test_estimate_cfo_on_grid_exact():
    n, over = 15, 64
    nf = n * over
    eps = 2 * np.pi * 37 / nf / 2
    g = np.exp(2j * eps * np.arange(n))
    assert abs(estimate_cfo(g, 2, oversample=over) - eps) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(-0.74, 0.74), st.sampled_from([2, 4]), st.integers(0, 2**32 - 1))
def test_estimate_cfo_matches_fine_grid(frac, spacing, seed):
    rng = np.random.default_rng(seed)
    lim = np.pi / spacing
    eps = frac * lim
    k = np.arange(31)
    g = rng.uniform(0.5, 2, 31) * np.exp(1j * spacing * eps * k)
    est = estimate_cfo(g, spacing)
    assert abs(est) <= lim
    # the peak is quadratic, so its location is resolvable to about sqrt(machine eps)
    assert abs(est - eps) < 1e-7


def test_estimate_cfo_unbiased_noiseless():
    rng = np.random.default_rng(1)
    N = 16
    nf = (2 * N - 1) * 64
    errs = []
    for _ in range(500):
        eps = 2 * np.pi * rng.integers(-nf // 5, nf // 5) / nf / 2
        G = virtual_channel(random_sparse_beamspace(N, 3, "on", rng).narrowband,
                            spectral_mask(zc(N, 5).entries))
        g = g_vector(G * p_cnt(N, eps), G * p_cnt(N, -eps))
        errs.append(estimate_cfo(g, 2) - eps)
    assert abs(np.mean(errs)) < 1e-6
    assert np.max(np.abs(errs)) < 1e-8


def test_compensate_exact_coherence():
    rng = np.random.default_rng(2)
    N, eps = 16, 0.05
    G = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    G_p = G * p_cnt(N, eps)
    G_n = np.exp(1.3j) * G * p_cnt(N, -eps)
    M, phi = compensate_and_combine(G_p, G_n, eps)
    assert np.linalg.norm(M) == pytest.approx(2 * np.linalg.norm(G), rel=1e-10)
    alpha = np.angle(np.vdot(G, M))
    np.testing.assert_allclose(M, 2 * np.exp(1j * alpha) * G, atol=1e-10)
    with pytest.raises(ValueError):
        compensate_and_combine(G_p, G_n, np.nan)


def test_compensate_zero_eps():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((4, 4)) + 0j
    B = rng.standard_normal((4, 4)) + 1j
    M, phi = compensate_and_combine(A, B, 0.0)
    np.testing.assert_allclose(M, A + np.exp(1j * phi) * B)
    # constructive: never smaller than the larger aligned branch
    assert np.linalg.norm(M) >= max(np.linalg.norm(A), np.linalg.norm(B)) - 1e-12


def test_combining_beats_branches_at_10db():
    rng = np.random.default_rng(4)
    N, eps = 16, 0.04
    sigma = 10 ** (-10 / 20)
    wins = 0
    for _ in range(200):
        G = virtual_channel(random_sparse_beamspace(N, 3, "off", rng).narrowband,
                            spectral_mask(zc(N, 5).entries))
        G_p = G * p_cnt(N, eps) + complex_noise(rng, sigma, (N, N))
        G_n = np.exp(0.4j) * G * p_cnt(N, -eps) + complex_noise(rng, sigma, (N, N))
        M, _ = compensate_and_combine(G_p, G_n, eps)
        comb = nmse(G, M / 2)
        wins += comb < min(nmse(G, G_p * p_cnt(N, -eps)), nmse(G, G_n * p_cnt(N, eps)))
    assert wins / 200 >= 0.95


def test_type1_single_component():
    N = 16
    z = zc(N, 3)
    eps = 2 * np.pi / (2 * N * 8)
    H = synth_narrowband([Ray(1, 0.0, 0.0)], N)
    t = swiftlink_trajectory(N, 62, "typeI", rng=0)
    res = run_type1(measure_trajectory(H, t, z, eps).y, t, z, K_max=1)
    assert abs(res.epsilon_hat - eps) < 1e-4
    assert nmse(H, res.H_hat) < -60


def test_type1_literal_single_pass_single_component():
    N = 16
    z = zc(N, 3)
    eps = 2 * np.pi / (2 * N * 8)
    H = synth_narrowband([Ray(1, 0.0, 0.0)], N)
    t = swiftlink_trajectory(N, 62, "typeI", rng=0)
    res = run_type1(measure_trajectory(H, t, z, eps).y, t, z, K_max=1, refine_iters=0,
                    polish=False)
    assert len(res.diagnostics["eps_history"]) == 1
    assert np.isfinite(res.epsilon_hat) and abs(res.epsilon_hat) <= np.pi / 2


def test_type1_zero_cfo_exact():
    N = 16
    z = zc(N, 3)
    rng = np.random.default_rng(5)
    H = random_sparse_beamspace(N, 3, "on", rng).narrowband
    t = swiftlink_trajectory(N, 62, "typeI", "uniform", rng)
    res = run_type1(measure_trajectory(H, t, z).y, t, z, K_max=3)
    assert abs(res.epsilon_hat) < 1e-8
    assert nmse(H, res.H_hat) <= -120


def test_branch_shift_symmetry():
    # a one-bin CFO moves the p and n branch peaks to opposite neighbours
    N = 16
    z = zc(N, 3)
    eps = 2 * np.pi / N
    H = synth_narrowband([Ray(1, 0.0, 0.0)], N)
    t = swiftlink_trajectory(N, 62, "typeI", rng=1)
    res = run_type1(measure_trajectory(H, t, z, eps).y, t, z, K_max=1, refine_iters=0,
                    polish=False, range_limit=np.pi / 2)
    pp = np.unravel_index(np.argmax(np.abs(dft2(res.diagnostics["G_p"]))), (N, N))
    pn = np.unravel_index(np.argmax(np.abs(dft2(res.diagnostics["G_n"]))), (N, N))
    assert tuple(map(int, pp)) == (1, 1)
    assert tuple(map(int, pn)) == (N - 1, N - 1)


def test_type2_zero_cfo_reduces_to_plain_recovery():
    N = 16
    z = zc(N, 3)
    rng = np.random.default_rng(6)
    H = random_sparse_beamspace(N, 2, "on", rng).narrowband
    t = swiftlink_trajectory(N, 62, "typeII", rng=rng)
    y = measure_trajectory(H, t, z).y
    res = run_type2(y, t, z, K_max=2)
    plain = recover_masked_beamspace(y, t, 2)
    m = spectral_mask(z.entries)
    np.testing.assert_allclose(res.H_hat, idft2(unmask(plain.S_hat, m)), atol=1e-9)
    assert abs(res.epsilon_hat) < 1e-8


def test_type2_with_cfo():
    N = 16
    z = zc(N, 3)
    for seed in range(5):
        rng = np.random.default_rng(seed)
        H = random_sparse_beamspace(N, 2, "on", rng).narrowband
        t = swiftlink_trajectory(N, 62, "typeII", rng=rng)
        eps = rng.uniform(-0.5, 0.5)
        res = run_type2(measure_trajectory(H, t, z, eps).y, t, z, K_max=2)
        assert abs(res.epsilon_hat - eps) < 1e-6
        assert nmse(H, res.H_hat) < -60


@pytest.mark.xfail(strict=True, reason="after de-rotating every sample both orderings "
                   "leave the same linear phase residual; measured NMSE agrees within 0.4 dB")
def test_type2_more_tolerant_of_cfo_error_than_type1():
    N = 16
    z = zc(N, 3)
    m = spectral_mask(z.entries)
    eps, d = 0.1, 0.005
    n = np.arange(62)
    better = 0
    for s in range(100):
        rng = np.random.default_rng(s)
        H = random_sparse_beamspace(N, 2, "on", rng).narrowband
        out = []
        for kind in ("typeI", "typeII"):
            t = swiftlink_trajectory(N, 62, kind, rng=rng)
            y = measure_trajectory(H, t, z, eps).y * np.exp(-1j * (eps + d) * n)
            out.append(nmse(H, idft2(unmask(recover_masked_beamspace(y, t, 2).S_hat, m))))
        better += out[1] < out[0] - 3
    assert better >= 80


def test_global_phase_invariance():
    N = 16
    z = zc(N, 3)
    rng = np.random.default_rng(7)
    H = random_sparse_beamspace(N, 3, "on", rng).narrowband
    t = swiftlink_trajectory(N, 62, "typeI", rng=rng)
    y = measure_trajectory(H, t, z, 0.2).y
    a = run_type1(y, t, z, K_max=3)
    b = run_type1(np.exp(0.9j) * y, t, z, K_max=3)
    assert abs(a.epsilon_hat) == pytest.approx(abs(b.epsilon_hat), abs=1e-9)
    np.testing.assert_allclose(b.H_hat, np.exp(0.9j) * a.H_hat, atol=1e-8)


def test_polish_recovers_from_nearby_start():
    N = 16
    z = zc(N, 3)
    rng = np.random.default_rng(8)
    H = random_sparse_beamspace(N, 2, "on", rng).narrowband
    t = swiftlink_trajectory(N, 62, "typeI", rng=rng)
    eps = 0.23
    y = measure_trajectory(H, t, z, eps).y
    assert abs(polish_cfo(y, t, eps + 0.06, K_max=2) - eps) < 1e-6


def test_result_json_and_kind_checks():
    N = 8
    z = zc(N, 3)
    H = synth_narrowband([Ray(1, 0.0, 0.0)], N)
    t = swiftlink_trajectory(N, 30, "typeI", rng=0)
    res = run_type1(measure_trajectory(H, t, z, 0.05).y, t, z, K_max=1)
    d = json.loads(res.to_json(H_true=H, hz_per_rad=1e6))
    assert d["epsilon_hat_hz"] == pytest.approx(res.epsilon_hat * 1e6)
    assert "nmse_db" in d and set(d["support"]) == {"p", "n"}
    with pytest.raises(ValueError):
        run_type2(np.zeros(30), t, z)
    with pytest.raises(ValueError):
        run_type1(np.zeros(29), t, z)


def test_cfo_range():
    assert cfo_range("typeI", 100e6) == pytest.approx(1e6)
    assert cfo_range("typeII", 100e6) == pytest.approx(500e3)
    assert 800e3 < cfo_range("typeI", 100e6) and 400e3 < cfo_range("typeII", 100e6)
    with pytest.raises(ValueError):
        cfo_range("typeIII", 1e6)
