"""Beam-training measurements under CFO and noise.

Measurement ``n`` applies the phase-shift matrix ``b_n d_n^T`` and observes
``(b_n^* H conj(d_n) + v[n]) exp(j eps n)`` with ``v ~ CN(0, sigma^2)``. The
offset also rotates the noise; for circular noise that is statistically the
same as adding it afterwards, and it keeps magnitude-only receivers exactly
CFO-invariant for a fixed noise draw.
"""

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .channel import virtual_channel
from .sequences import barker13, circshift, spectral_mask


@dataclass(frozen=True)
class MeasurementSet:
    y: np.ndarray
    trajectory: object = None
    epsilon: float = 0.0
    sigma: float = 0.0
    effective_epsilon: float = None
    seed: object = None

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if self.trajectory is not None and len(self.y) != len(self.trajectory):
            raise ValueError("measurement count does not match trajectory length")
        if self.effective_epsilon is None:
            object.__setattr__(self, "effective_epsilon", self.epsilon)

    def to_json(self):
        return json.dumps({
            "y": [[v.real, v.imag] for v in np.asarray(self.y)],
            "trajectory": None if self.trajectory is None else json.loads(self.trajectory.to_json()),
            "epsilon": self.epsilon, "sigma": self.sigma,
            "effective_epsilon": self.effective_epsilon, "seed": self.seed,
        })

    @classmethod
    def from_json(cls, text):
        from .trajectories import Trajectory
        d = json.loads(text)
        t = d["trajectory"]
        t = None if t is None else Trajectory.from_json(json.dumps(t))
        y = np.array([complex(a, b) for a, b in d["y"]])
        return cls(y, t, d["epsilon"], d["sigma"], d["effective_epsilon"], d["seed"])

    def to_csv(self):
        """Rows of ``n, r, c, re, im``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "r", "c", "re", "im"])
        for n, v in enumerate(np.asarray(self.y)):
            r, c = ("", "") if self.trajectory is None else self.trajectory.steps[n]
            w.writerow([n, r, c, repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()


def complex_noise(rng, sigma, size):
    """Samples of ``CN(0, sigma^2)``."""
    if sigma == 0:
        return np.zeros(size, dtype=np.complex128)
    return sigma * (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2)


def project_beam(H, b, d, eps=0.0, n=0, sigma=0.0, rng=None):
    """Single measurement ``(b^* H conj(d) + v) exp(j eps n)``.

    Noise rides through the same frequency offset as the signal; for circular
    Gaussian noise this has the same statistics as adding it afterwards.
    """
    H = np.asarray(H)
    b = np.asarray(b)
    d = np.asarray(d)
    if b.shape != (H.shape[0],) or d.shape != (H.shape[1],):
        raise ValueError("beam/channel dimension mismatch")
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    v = complex_noise(np.random.default_rng(rng), sigma, 1)[0]
    return (np.vdot(b, H @ np.conj(d)) + v) * np.exp(1j * eps * n)


def training_vectors(t, z):
    """Elevation/azimuth beams ``b_n = shift(z, r[n])``, ``d_n = shift(z, c[n])``."""
    z = np.asarray(z)
    if z.size != t.N:
        raise ValueError("sequence length does not match grid size")
    Z = np.stack([circshift(z, s) for s in range(t.N)])  # row s = shift by s
    return Z[t.rows], Z[t.cols]


def beam_measurements(H, B, D, eps=0.0, sigma=0.0, rng=None):
    """Vectorized :func:`project_beam` for beam rows ``B[n]``, ``D[n]``."""
    H = np.asarray(H)
    B = np.atleast_2d(B)
    D = np.atleast_2d(D)
    if B.shape[1] != H.shape[0] or D.shape[1] != H.shape[1] or len(B) != len(D):
        raise ValueError("beam/channel dimension mismatch")
    clean = np.einsum("ni,ij,nj->n", B.conj(), H, D.conj())
    rng = np.random.default_rng(rng)
    noisy = clean + complex_noise(rng, sigma, len(B))
    return noisy * np.exp(1j * eps * np.arange(len(B)))


def sample_operator(A, t):
    """Entries of ``A`` along the trajectory."""
    return np.asarray(A)[t.rows, t.cols]


def scatter(y, t):
    """Adjoint of :func:`sample_operator`: zero-filled grid, repeated cells add up."""
    out = np.zeros((t.N, t.N), dtype=np.complex128)
    np.add.at(out, (t.rows, t.cols), y)
    return out


def measure_trajectory(H, t, z, eps=0.0, sigma=0.0, rng=None, seed=None):
    """Narrowband measurements ``exp(j eps n) (G(r[n], c[n]) + v[n])``."""
    H = np.asarray(H)
    if H.shape != (t.N, t.N):
        raise ValueError("channel/trajectory dimension mismatch")
    G = virtual_channel(H, spectral_mask(z))
    rng = np.random.default_rng(rng if rng is not None else seed)
    y = sample_operator(G, t) + complex_noise(rng, sigma, len(t))
    y = y * np.exp(1j * eps * np.arange(len(t)))
    return MeasurementSet(y, t, float(eps), float(sigma), float(eps), seed)


def digital_cfo(analog_cfo, W):
    """Per-symbol CFO in radians for an offset in Hz at sample rate ``W``."""
    return 2 * np.pi * analog_cfo / W


def frame_weights(eps, L, pilot=None):
    """Per-tap weights of the correlate-and-sum receiver for one frame.

    The pilot plus ``L-1`` guard zeros passes through an ``L``-tap channel,
    each received symbol ``i`` rotates by ``exp(j eps i)``; the receiver
    correlates with the pilot at lags ``0..L-1``, sums the lags and divides by
    the pilot length. Returns ``w`` with output ``sum_l w[l] h[l]``.
    """
    t = barker13() if pilot is None else np.asarray(pilot)
    Ns = t.size
    F = Ns + L - 1
    T = np.zeros((F, L), dtype=np.complex128)
    for l in range(L):
        T[l:l + Ns, l] = t
    rot = np.exp(1j * eps * np.arange(F))
    return (T.conj().T @ (rot[:, None] * T)).sum(axis=0) / Ns


def wideband_beam_measurements(ch, B, D, analog_cfo, W, sigma=0.0, rng=None, pilot=None):
    """Frame-based wideband measurements for arbitrary beam rows.

    Returns ``(y, effective_epsilon)``; noise of variance ``sigma^2`` is added
    after correlation.
    """
    pilot = barker13() if pilot is None else np.asarray(pilot)
    eps = digital_cfo(analog_cfo, W)
    F = pilot.size + ch.L - 1
    w = frame_weights(eps, ch.L, pilot)
    h = np.einsum("ni,lij,nj->nl", np.conj(B), ch.taps, np.conj(D))
    eff = F * eps
    rng = np.random.default_rng(rng)
    y = (h @ w + complex_noise(rng, sigma, len(B))) * np.exp(1j * eff * np.arange(len(B)))
    return y, eff


def wideband_measure(ch, t, z, analog_cfo, W, sigma=0.0, rng=None, pilot=None, seed=None):
    """Swift-Link training over the Barker frame structure."""
    if t.N != ch.N:
        raise ValueError("channel/trajectory dimension mismatch")
    B, D = training_vectors(t, z)
    rng = np.random.default_rng(rng if rng is not None else seed)
    y, eff = wideband_beam_measurements(ch, B, D, analog_cfo, W, sigma, rng, pilot)
    return MeasurementSet(y, t, float(digital_cfo(analog_cfo, W)), float(sigma), float(eff), seed)
