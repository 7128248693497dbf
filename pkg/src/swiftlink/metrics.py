"""Evaluation metrics: NMSE, CFO MSE, PAPR and water-filling rate."""

import numpy as np

NMSE_FLOOR_DB = -120.0


def nmse(H, H_hat):
    """Global-phase-invariant normalized squared error in dB.

    ``min_a ||H - exp(-j a) H_hat||^2 / ||H||^2``; the minimum is attained at
    the phase of ``<H_hat, H>``, leaving ``||H||^2 + ||H_hat||^2 - 2|<H, H_hat>|``.
    Floored at -120 dB.
    """
    H = np.asarray(H, dtype=np.complex128)
    H_hat = np.asarray(H_hat, dtype=np.complex128)
    if H.shape != H_hat.shape:
        raise ValueError("shape mismatch")
    e = np.vdot(H, H).real
    if e == 0:
        raise ValueError("reference channel is zero")
    err = e + np.vdot(H_hat, H_hat).real - 2 * abs(np.vdot(H, H_hat))
    ratio = max(err, 0.0) / e
    if ratio <= 10 ** (NMSE_FLOOR_DB / 10):
        return NMSE_FLOOR_DB
    return float(10 * np.log10(ratio))


def cfo_mse(eps, eps_hat):
    eps = np.asarray(eps, dtype=float)
    eps_hat = np.asarray(eps_hat, dtype=float)
    if eps.shape != eps_hat.shape or eps.size == 0:
        raise ValueError("need two equal, non-empty lists")
    return float(np.mean((eps_hat - eps) ** 2))


def papr(y):
    """Peak-to-average power ratio in dB."""
    p = np.abs(np.asarray(y)) ** 2
    if p.size == 0 or p.mean() == 0:
        raise ValueError("PAPR undefined for an empty or all-zero stream")
    return float(10 * np.log10(p.max() / p.mean()))


def water_filling(gains, total_power, noise):
    """Power allocation maximizing ``sum log2(1 + p_k g_k / noise)``.

    Returns the per-subcarrier powers.
    """
    g = np.asarray(gains, dtype=float)
    p = np.zeros_like(g)
    active = g > 0
    if total_power <= 0 or not active.any():
        return p
    inv = noise / g[active]
    order = np.sort(inv)
    # largest active set whose water level clears every inverse gain in it
    for m in range(order.size, 0, -1):
        level = (total_power + order[:m].sum()) / m
        if level > order[m - 1]:
            break
    p[active] = np.maximum(level - inv, 0.0)
    return p


def beamformed_taps(ch, beams):
    """Equivalent SISO taps ``f_e^H H[l] conj(f_a)``."""
    taps = np.asarray(ch.taps)
    return np.einsum("i,lij,j->l", np.conj(beams.f_e), taps, np.conj(beams.f_a))


def achievable_rate(ch, beams, sigma, n_subcarriers=64, allocation="waterfill"):
    """Rate in bits/s/Hz of the beamformed wideband channel.

    Unit average power per subcarrier, noise variance ``sigma**2`` per
    subcarrier, powers set by water-filling (``allocation="uniform"`` for the
    flat allocation).
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    h = beamformed_taps(ch, beams)
    if n_subcarriers < len(h):
        raise ValueError("fewer subcarriers than channel taps")
    gains = np.abs(np.fft.fft(h, n_subcarriers)) ** 2
    noise = sigma ** 2
    if allocation == "waterfill":
        p = water_filling(gains, n_subcarriers, noise)
    elif allocation == "uniform":
        p = np.ones(n_subcarriers)
    else:
        raise ValueError(f"unknown allocation {allocation!r}")
    return float(np.mean(np.log2(1 + p * gains / noise)))
