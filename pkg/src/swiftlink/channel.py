"""Geometric narrowband/wideband channels and their beamspace representations."""

import json
from dataclasses import dataclass, field

import numpy as np

from .numerics import dft2, idft2, vandermonde, wrap_phase


@dataclass(frozen=True)
class Ray:
    """One propagation path.

    The ray is stored by its spatial frequencies; ``from_angles`` converts
    physical elevation/azimuth angles of departure.
    """

    gain: complex
    omega_e: float
    omega_a: float
    tap: int = 0

    @classmethod
    def from_angles(cls, gain, theta_e, theta_a, tap=0):
        omega_e = np.pi * np.sin(theta_e) * np.sin(theta_a)
        omega_a = np.pi * np.sin(theta_e) * np.cos(theta_a)
        return cls(complex(gain), float(omega_e), float(omega_a), int(tap))

    def to_dict(self):
        return {"gain": [self.gain.real, self.gain.imag],
                "omega_e": self.omega_e, "omega_a": self.omega_a, "tap": self.tap}

    @classmethod
    def from_dict(cls, d):
        return cls(complex(*d["gain"]), float(d["omega_e"]), float(d["omega_a"]),
                   int(d.get("tap", 0)))


@dataclass(frozen=True)
class ChannelRealization:
    """Wideband channel: ``L`` tap matrices built from ``rays``."""

    N: int
    L: int
    rays: tuple
    taps: np.ndarray = field(repr=False)
    seed: object = None

    @property
    def narrowband(self):
        """Equivalent narrowband channel, the sum of all taps."""
        return self.taps.sum(axis=0)

    @property
    def energy(self):
        return float(np.sum(np.abs(self.taps) ** 2))

    def to_json(self):
        return json.dumps({"N": self.N, "L": self.L, "seed": self.seed,
                           "rays": [r.to_dict() for r in self.rays]})

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        rays = [Ray.from_dict(r) for r in d["rays"]]
        return synth_wideband(rays, d["N"], d["L"], seed=d.get("seed"))


def synth_narrowband(rays, N):
    """Sum of rank-one ray contributions ``gain * a(omega_e) a(omega_a)^T``."""
    rays = list(rays)
    if not rays:
        raise ValueError("need at least one ray")
    H = np.zeros((N, N), dtype=np.complex128)
    for r in rays:
        H += r.gain * np.outer(vandermonde(N, r.omega_e), vandermonde(N, r.omega_a))
    return H


def synth_wideband(rays, N, L, seed=None):
    if L < 1:
        raise ValueError("L must be >= 1")
    rays = tuple(rays)
    if not rays:
        raise ValueError("need at least one ray")
    taps = np.zeros((L, N, N), dtype=np.complex128)
    for r in rays:
        if not 0 <= r.tap < L:
            raise ValueError(f"ray tap {r.tap} outside [0, {L})")
        taps[r.tap] += synth_narrowband([r], N)
    taps.setflags(write=False)
    return ChannelRealization(int(N), int(L), rays, taps, seed)


def scale_rays(rays, factor):
    return [Ray(r.gain * factor, r.omega_e, r.omega_a, r.tap) for r in rays]


def normalize(ch, target=None):
    """Rescale so that ``sum_l ||H[l]||_F^2`` equals ``target`` (default ``N^2``)."""
    target = ch.N ** 2 if target is None else target
    f = np.sqrt(target / ch.energy)
    return synth_wideband(scale_rays(ch.rays, f), ch.N, ch.L, ch.seed)


def beamspace(H):
    """Beamspace channel ``X = U_N H U_N``."""
    return dft2(H)


def antenna_domain(X):
    return idft2(X)


def masked_beamspace(X, mask):
    """``S = Lambda_z^* X Lambda_z^*``."""
    lam = np.conj(mask.diag)
    return lam[:, None] * np.asarray(X) * lam[None, :]


def unmask(S, mask):
    """Inverse of :func:`masked_beamspace`.

    Divides by the conjugate mask, which for the unit-modulus mask of an
    unquantized sequence is the same as multiplying by the mask itself.
    """
    lam = np.conj(mask.diag)
    if np.any(np.abs(lam) < 1e-12):
        raise ValueError("spectral mask has a null; cannot invert")
    return np.asarray(S) / (lam[:, None] * lam[None, :])


def virtual_channel(H, mask):
    """Virtual channel ``G = U_N^* S U_N^*`` sampled directly by shifted ZC training."""
    return idft2(masked_beamspace(beamspace(H), mask))


def channel_from_virtual(G, mask):
    return antenna_domain(unmask(dft2(G), mask))


def _gaussian(rng, size=None):
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2)


def random_sparse_beamspace(N, K, grid="on", rng=None, L=1, normalization="exact"):
    """Random K-ray test channel.

    ``grid="on"`` puts every ray on a distinct point of the ``2*pi/N``
    spatial-frequency grid; ``grid="off"`` draws spatial frequencies uniformly
    in ``[-pi, pi)``. Gains are complex Gaussian. With ``normalization="exact"``
    the realization is scaled to energy ``N^2``; with ``"ensemble"`` gains are
    drawn with variance ``1/K`` so the energy is ``N^2`` on average.
    """
    rng = np.random.default_rng(rng)
    if not 1 <= K <= N * N:
        raise ValueError("need 1 <= K <= N^2")
    if grid == "on":
        idx = rng.choice(N * N, size=K, replace=False)
        om_e = wrap_phase(2 * np.pi * (idx // N) / N)
        om_a = wrap_phase(2 * np.pi * (idx % N) / N)
    elif grid == "off":
        om_e = rng.uniform(-np.pi, np.pi, K)
        om_a = rng.uniform(-np.pi, np.pi, K)
    else:
        raise ValueError(f"unknown grid mode {grid!r}")
    gains = _gaussian(rng, K) / np.sqrt(K)
    taps = rng.integers(0, L, K)
    rays = [Ray(complex(g), float(e), float(a), int(t))
            for g, e, a, t in zip(gains, om_e, om_a, taps)]
    ch = synth_wideband(rays, N, L)
    if normalization == "exact":
        ch = normalize(ch)
    elif normalization != "ensemble":
        raise ValueError(f"unknown normalization {normalization!r}")
    return ch


def random_clustered_channel(N, L=13, n_clusters=3, rays_per_cluster=4,
                             angle_spread=0.05, rng=None, delay_decay=3.0,
                             normalization="exact"):
    """Off-grid clustered wideband channel, a stand-in for measured mmWave channels.

    Each cluster has a random mean spatial frequency pair and delay; its rays
    are scattered around them with ``angle_spread`` (rad) and one tap of delay
    jitter. Cluster powers decay exponentially with delay.
    """
    rng = np.random.default_rng(rng)
    rays = []
    for _ in range(n_clusters):
        ce, ca = rng.uniform(-np.pi, np.pi, 2)
        tap0 = int(rng.integers(0, L))
        power = np.exp(-delay_decay * tap0 / L) * rng.exponential()
        for _ in range(rays_per_cluster):
            tap = int(np.clip(tap0 + rng.integers(-1, 2), 0, L - 1))
            g = _gaussian(rng) * np.sqrt(power / rays_per_cluster)
            rays.append(Ray(complex(g),
                            float(wrap_phase(ce + angle_spread * rng.standard_normal())),
                            float(wrap_phase(ca + angle_spread * rng.standard_normal())),
                            tap))
    ch = synth_wideband(rays, N, L)
    if normalization == "exact":
        ch = normalize(ch)
    return ch
