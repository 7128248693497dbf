"""Sparse recovery of the masked beamspace by orthogonal matching pursuit."""

from dataclasses import dataclass, field

import numpy as np

from .channel import unmask
from .numerics import idft2


@dataclass(frozen=True)
class SparseEstimate:
    S_hat: np.ndarray
    support: list
    residual_norm: float
    residual_history: list = field(default_factory=list, repr=False)


def partial_dft_dictionary(t):
    """Rows of the partial 2D-DFT map from an N x N beamspace to trajectory samples.

    Column ``k*N + l`` holds ``exp(2j*pi*(r*k + c*l)/N) / N`` for each sampled
    ``(r, c)``, i.e. ``y = A @ S.ravel()`` reproduces ``idft2(S)`` on the path.
    """
    N = t.N
    k = np.arange(N)
    Er = np.exp(2j * np.pi * np.outer(t.rows, k) / N)
    Ec = np.exp(2j * np.pi * np.outer(t.cols, k) / N)
    return (Er[:, :, None] * Ec[:, None, :]).reshape(len(t), N * N) / N


def omp(A, y, K_max, tol=0.0, min_atoms=0):
    """Orthogonal matching pursuit.

    Atoms are ranked by normalized correlation with the residual; after each
    selection the coefficients are refit by least squares on the whole support.
    Stops after ``K_max`` atoms or once the residual norm drops to ``tol``,
    but never before ``min_atoms`` atoms are in.

    Returns
    -------
    x : ndarray
        Coefficient vector (length ``A.shape[1]``).
    support : list of int
    history : list of float
        Residual norm before the first and after every iteration.
    """
    A = np.asarray(A, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    M, n_atoms = A.shape
    if K_max < 1:
        raise ValueError("K_max must be >= 1")
    if K_max > M:
        raise ValueError(f"K_max={K_max} exceeds the number of measurements {M}")
    if tol < 0:
        raise ValueError("tol must be non-negative")
    norms = np.linalg.norm(A, axis=0)
    norms[norms == 0] = np.inf
    support = []
    coef = np.zeros(0, dtype=np.complex128)
    residual = y.copy()
    history = [float(np.linalg.norm(residual))]
    while len(support) < K_max and (history[-1] > tol or len(support) < min_atoms):
        corr = np.abs(A.conj().T @ residual) / norms
        corr[support] = -1.0
        j = int(np.argmax(corr))
        if corr[j] <= 1e-14 * max(history[-1], 1e-300):
            break
        support.append(j)
        coef, *_ = np.linalg.lstsq(A[:, support], y, rcond=None)
        residual = y - A[:, support] @ coef
        history.append(float(np.linalg.norm(residual)))
    x = np.zeros(n_atoms, dtype=np.complex128)
    x[support] = coef
    return x, support, history


def recover_masked_beamspace(y, t, K_max, tol=0.0, min_atoms=0):
    """Estimate the sparse masked beamspace ``S`` from samples of ``idft2(S)``.

    Pass ``tol = sqrt(M) * sigma`` for a noise-matched stopping rule;
    ``min_atoms=1`` keeps weak signals from being dropped altogether.
    """
    y = np.asarray(y)
    if len(y) != len(t):
        raise ValueError("measurement count does not match trajectory length")
    A = partial_dft_dictionary(t)
    x, support, history = omp(A, y, K_max, tol, min_atoms)
    N = t.N
    return SparseEstimate(x.reshape(N, N), [divmod(j, N) for j in support],
                          history[-1], history)


def invert_mask(S_hat, mask):
    """Beamspace estimate from a masked-beamspace estimate."""
    return unmask(S_hat, mask)


def channel_from_beamspace(X_hat):
    """Antenna-domain channel ``U_N^* X U_N^*``."""
    return idft2(X_hat)
