"""Complex linear-algebra and Fourier primitives.

All 2D transforms use the unitary DFT matrix ``U_N`` with entries
``exp(-2j*pi*k*n/N) / sqrt(N)``, so ``dft2(X) = U_N X U_N`` and
``idft2(X) = U_N^* X U_N^*``.
"""

import numpy as np


def _as_square(X):
    X = np.asarray(X, dtype=np.complex128)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {X.shape}")
    return X


def dft_matrix(N):
    """Unitary DFT matrix ``U_N``."""
    k = np.arange(N)
    return np.exp(-2j * np.pi * np.outer(k, k) / N) / np.sqrt(N)


def dft2(X):
    """Unitary 2D DFT, ``U_N X U_N``."""
    X = _as_square(X)
    return np.fft.fft2(X) / X.shape[0]


def idft2(X):
    """Inverse unitary 2D DFT, ``U_N^* X U_N^*``."""
    X = _as_square(X)
    return np.fft.ifft2(X) * X.shape[0]


def circconv2(A, B):
    """2D circular convolution ``(A * B)[k, l] = sum A[m, n] B[k-m, l-n]``.

    With the unitary normalization the Hadamard/convolution duality reads
    ``dft2(A * B) == circconv2(dft2(A), dft2(B)) / N``.
    """
    A = np.asarray(A, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    if A.shape != B.shape or A.ndim != 2:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    return np.fft.ifft2(np.fft.fft2(A) * np.fft.fft2(B))


def vandermonde(N, delta):
    """Steering vector ``[1, e^{j delta}, ..., e^{j (N-1) delta}]``."""
    if N < 1:
        raise ValueError("N must be positive")
    return np.exp(1j * delta * np.arange(N))


def oversampled_dft(g, factor):
    """DFT of ``g`` zero-padded to ``factor * len(g)`` points.

    Bin ``b`` corresponds to the digital frequency ``2*pi*b / (factor*len(g))``.
    """
    g = np.asarray(g, dtype=np.complex128)
    if g.size == 0:
        raise ValueError("empty input")
    if factor < 1:
        raise ValueError("factor must be >= 1")
    return np.fft.fft(g, n=int(factor) * g.size)


def inner(A, B):
    """Matrix inner product ``sum A * conj(B)``."""
    return np.vdot(np.asarray(B).ravel(), np.asarray(A).ravel())


def wrap_phase(x):
    """Map angles to ``[-pi, pi)``."""
    return (np.asarray(x) + np.pi) % (2 * np.pi) - np.pi
