"""Reference beam-alignment schemes: exhaustive DFT scan and IID-phase CS."""

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .measurement import beam_measurements, wideband_beam_measurements
from .numerics import dft_matrix, idft2, vandermonde
from .recovery import omp
from .sequences import quantize_phases


@dataclass(frozen=True)
class BeamPair:
    """Elevation/azimuth beams, unit norm with equal-modulus entries."""

    f_e: np.ndarray
    f_a: np.ndarray
    bits: object = None

    @property
    def N(self):
        return self.f_e.size


def dft_beams(N):
    """Codebook ``a_N(2 pi p / N) / sqrt(N)``, one beam per row."""
    return np.stack([vandermonde(N, 2 * np.pi * p / N) for p in range(N)]) / np.sqrt(N)


def _measure(target, B, D, eps, sigma, rng, W):
    """Narrowband (``eps`` in rad) or wideband (``eps`` in Hz, needs ``W``) measurements."""
    if isinstance(target, ChannelRealization):
        if W is None:
            raise ValueError("wideband channels need the sample rate W")
        return wideband_beam_measurements(target, B, D, eps, W, sigma, rng)[0]
    return beam_measurements(target, B, D, eps, sigma, rng)


def exhaustive_scan(target, sigma=0.0, rng=None, eps=0.0, W=None, return_measurements=False):
    """Try all ``N^2`` DFT beam pairs and keep the strongest by magnitude.

    The selected pair ``(p, q)`` measures beamspace entry ``X[p, q]``, so only
    magnitudes matter and any CFO rotation is irrelevant.
    """
    N = target.N if isinstance(target, ChannelRealization) else np.shape(target)[0]
    C = dft_beams(N)
    p, q = np.divmod(np.arange(N * N), N)
    y = _measure(target, C[p], C[q], eps, sigma, np.random.default_rng(rng), W)
    i = int(np.argmax(np.abs(y)))
    beams = BeamPair(C[p[i]], C[q[i]], None)
    if return_measurements:
        return beams, y
    return beams


def random_phase_beams(N, M, bits, rng):
    """``M`` pairs of unit-norm beams with IID ``bits``-resolution phases."""
    levels = 2 ** bits
    ph = 2 * np.pi * rng.integers(0, levels, size=(2, M, N)) / levels
    B = np.exp(1j * ph) / np.sqrt(N)
    return B[0], B[1]


def beamspace_dictionary(B, D):
    """Dictionary mapping the beamspace ``X`` (row-major) to beam measurements.

    ``b^* H conj(d) = sum_{k,l} conj((U b)[k]) X[k, l] conj((U d)[l])``.
    """
    N = B.shape[1]
    U = dft_matrix(N)
    Pb = np.conj(B @ U.T)
    Pd = np.conj(D @ U.T)
    return (Pb[:, :, None] * Pd[:, None, :]).reshape(len(B), N * N)


def iid_cs_baseline(target, M, eps=0.0, sigma=0.0, bits=3, rng=None, K_max=16, W=None,
                    return_measurements=False):
    """Compressive estimate from random-phase training that ignores CFO.

    Returns ``(H_hat, beams)``, plus the raw measurements if requested.
    """
    if M < 1:
        raise ValueError("need at least one measurement")
    rng = np.random.default_rng(rng)
    N = target.N if isinstance(target, ChannelRealization) else np.shape(target)[0]
    B, D = random_phase_beams(N, M, bits, rng)
    y = _measure(target, B, D, eps, sigma, rng, W)
    A = beamspace_dictionary(B, D)
    x, _, _ = omp(A, y, min(K_max, M), np.sqrt(M) * sigma, min_atoms=1)
    H_hat = idft2(x.reshape(N, N))
    beams = extract_beams(H_hat, bits)
    if return_measurements:
        return H_hat, beams, y
    return H_hat, beams


def extract_beams(H_hat, bits=3):
    """Phase-only beams from the dominant singular pair of ``H_hat``.

    ``H ~ s u v^H``; the elevation beam follows ``u`` and the azimuth beam
    ``conj(v)`` so that ``f_e^H H conj(f_a)`` is maximized. ``bits=None``
    keeps the continuous phases.
    """
    H_hat = np.asarray(H_hat, dtype=np.complex128)
    if not np.any(H_hat):
        raise ValueError("cannot extract beams from a zero matrix")
    u, _, vh = np.linalg.svd(H_hat)
    fe = u[:, 0]
    fa = vh[0]  # conj(v)
    # fix the free common phase so quantization is reproducible
    rot = np.exp(-1j * np.angle(fe[0]))
    fe = fe * rot
    fa = fa * np.conj(rot)
    N = fe.size
    fe = np.exp(1j * np.angle(fe)) / np.sqrt(N)
    fa = np.exp(1j * np.angle(fa)) / np.sqrt(N)
    if bits is not None:
        fe = quantize_phases(fe, bits)
        fa = quantize_phases(fa, bits)
    return BeamPair(fe, fa, bits)
