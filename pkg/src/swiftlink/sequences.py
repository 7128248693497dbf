"""Zadoff-Chu sequences, circulant shifts, spectral masks and pilot sequences."""

from dataclasses import dataclass
from math import gcd

import numpy as np

# Standard length-13 Barker code.
BARKER13 = (1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1)


@dataclass(frozen=True)
class ZcSequence:
    """Unit-norm Zadoff-Chu sequence of length ``N`` and root ``u``."""

    N: int
    u: int
    entries: np.ndarray

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


@dataclass(frozen=True)
class SpectralMask:
    """Diagonal of ``Lambda_z = sqrt(N) diag(U_N z)``."""

    diag: np.ndarray

    @property
    def N(self):
        return self.diag.size


def zc(N, u, bits=None):
    """Core Zadoff-Chu sequence, normalized to unit norm.

    Parameters
    ----------
    N : int
        Sequence length (antennas along one array dimension).
    u : int
        Root; must be co-prime with ``N``.
    bits : int, optional
        If given, phases are snapped to the nearest of ``2**bits`` levels.
        Quantized sequences only approximately keep the flat-DFT property.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    if gcd(int(u), int(N)) != 1:
        raise ValueError(f"root u={u} is not co-prime with N={N}")
    k = np.arange(N)
    if N % 2:
        phase = np.pi * u * k * (k + 1) / N
    else:
        phase = np.pi * u * k * k / N
    z = np.exp(1j * phase) / np.sqrt(N)
    if bits is not None:
        z = quantize_phases(z, bits)
    z.setflags(write=False)
    return ZcSequence(int(N), int(u), z)


def circshift(v, s):
    """Right-circulant shift, ``out[i] = v[(i - s) mod N]``.

    Column ``s`` of the circulant training matrix ``Z`` is ``circshift(z, s)``,
    which gives ``U_N circshift(z, s) = Lambda_z U_N e_s``. Shifts outside
    ``[0, N)`` are reduced mod ``N``.
    """
    v = np.asarray(v)
    return np.roll(v, int(s) % v.size)


def circulant(z):
    """Matrix ``[z, shift(z, 1), ..., shift(z, N-1)]``."""
    z = np.asarray(z)
    return np.stack([circshift(z, s) for s in range(z.size)], axis=1)


def spectral_mask(z):
    """Unit-modulus spectral mask of a (possibly quantized) sequence."""
    z = np.asarray(z, dtype=np.complex128)
    # sqrt(N) * U_N z == unnormalized FFT
    diag = np.fft.fft(z)
    diag.setflags(write=False)
    return SpectralMask(diag)


def quantize_phases(v, bits):
    """Snap each phase to the nearest multiple of ``2*pi / 2**bits``.

    Moduli are preserved.
    """
    if bits < 1:
        raise ValueError("bits must be >= 1")
    v = np.asarray(v, dtype=np.complex128)
    step = 2 * np.pi / 2 ** bits
    q = np.round(np.angle(v) / step) * step
    return np.abs(v) * np.exp(1j * q)


def barker13():
    """Bipolar length-13 Barker sequence."""
    return np.array(BARKER13, dtype=np.float64)


def aperiodic_autocorr(x):
    """Aperiodic autocorrelation at lags ``-(n-1) .. n-1``."""
    x = np.asarray(x)
    return np.correlate(x, x, mode="full")


def periodic_autocorr(z):
    """Circular autocorrelation ``r[l] = sum_n z[n] conj(z[n-l])``."""
    z = np.asarray(z, dtype=np.complex128)
    return np.array([np.vdot(np.roll(z, l), z) for l in range(z.size)])
