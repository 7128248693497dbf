"""Sampling trajectories over the N x N virtual-channel grid.

A trajectory is the ordered list of grid coordinates sampled in successive
beam-training slots. Coordinate ``(r, c)`` lies on contour ``r + c``.
"""

import json
from dataclasses import dataclass

import numpy as np

from .numerics import vandermonde

KINDS = ("row", "block", "p", "n", "typeI", "typeII")
DISTRIBUTIONS = ("uniform", "binomial")


@dataclass(frozen=True)
class Trajectory:
    N: int
    steps: np.ndarray  # (M, 2) int array of (r, c)
    kind: str
    seed: object = None

    def __post_init__(self):
        steps = np.asarray(self.steps, dtype=np.int64).reshape(-1, 2)
        if steps.size and (steps.min() < 0 or steps.max() >= self.N):
            raise ValueError("trajectory leaves the N x N grid")
        if self.kind not in KINDS:
            raise ValueError(f"unknown trajectory kind {self.kind!r}")
        steps.setflags(write=False)
        object.__setattr__(self, "steps", steps)

    def __len__(self):
        return len(self.steps)

    @property
    def rows(self):
        return self.steps[:, 0]

    @property
    def cols(self):
        return self.steps[:, 1]

    @property
    def contours(self):
        return self.steps.sum(axis=1)

    def to_json(self):
        return json.dumps({"kind": self.kind, "N": self.N, "seed": self.seed,
                           "steps": self.steps.tolist()})

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls(d["N"], np.array(d["steps"], dtype=np.int64).reshape(-1, 2),
                   d["kind"], d.get("seed"))


def contour(k, N):
    """Coordinates ``(r, c)`` with ``r + c == k``, sorted by ``r``."""
    if not 0 <= k <= 2 * N - 2:
        raise ValueError(f"contour index {k} outside [0, {2 * N - 2}]")
    r = np.arange(max(0, k - N + 1), min(k, N - 1) + 1)
    return [(int(i), int(k - i)) for i in r]


def contour_probabilities(n_points, dist):
    """Sampling density over the points of one contour."""
    if dist == "uniform":
        return np.full(n_points, 1.0 / n_points)
    if dist == "binomial":
        from scipy.stats import binom
        return binom.pmf(np.arange(n_points), n_points - 1, 0.5)
    raise ValueError(f"unknown contour distribution {dist!r}")


def _pick(k, N, dist, rng):
    pts = contour(k, N)
    n = len(pts)
    if dist == "uniform":
        i = rng.integers(n)
    elif dist == "binomial":
        i = rng.binomial(n - 1, 0.5)
    else:
        raise ValueError(f"unknown contour distribution {dist!r}")
    return pts[i]


def row_trajectory(N):
    n = np.arange(N * N)
    return Trajectory(N, np.stack([n // N, n % N], axis=1), "row")


def _block_order(N):
    # slot index of every cell, read off the four-block phase-error layout
    h = N // 2
    i = np.arange(h)
    m = np.empty((N, N), dtype=np.int64)
    r, c = np.meshgrid(i, i, indexing="ij")
    m[:h, :h] = (h * h - 1) - h * r - c
    m[:h, h:] = h * h + h * r + c
    m[h:, :h] = (2 * h * h + h - 1) - r + h * c
    m[h:, h:] = (4 * h * h - h) + r - h * c
    return m


def block_trajectory(N):
    """Full-grid trajectory that visits the four quadrants in turn.

    The top-left quadrant is traversed backwards row by row, the top-right
    forwards row by row, the bottom-left column by column bottom-up and the
    bottom-right column by column right-to-left.
    """
    if N % 2:
        raise ValueError("block trajectory needs even N")
    order = np.argsort(_block_order(N), axis=None)
    return Trajectory(N, np.stack(np.unravel_index(order, (N, N)), axis=1), "block")


def start_contour(N, M_p):
    """First contour of a length-``M_p`` trajectory centred on contour ``N-1``.

    Equals ``N - (M_p + 1)/2`` for odd ``M_p``; even lengths start at
    ``N - 1 - floor(M_p/2)`` and end one contour past the centre-symmetric range.
    """
    return N - 1 - M_p // 2


def _check_length(N, M_p):
    if not 1 <= M_p <= 2 * N - 1:
        raise ValueError(f"trajectory length {M_p} outside [1, {2 * N - 1}]")


def p_trajectory(N, M_p, dist="uniform", rng=None):
    """One randomly chosen coordinate on each of ``M_p`` ascending contours."""
    _check_length(N, M_p)
    rng = np.random.default_rng(rng)
    p0 = start_contour(N, M_p)
    steps = [_pick(k, N, dist, rng) for k in range(p0, p0 + M_p)]
    return Trajectory(N, np.array(steps), "p")


def n_trajectory(N, M_n, dist="uniform", rng=None):
    """Same contour range as :func:`p_trajectory`, traversed downwards."""
    _check_length(N, M_n)
    rng = np.random.default_rng(rng)
    p0 = start_contour(N, M_n)
    steps = [_pick(k, N, dist, rng) for k in range(p0 + M_n - 1, p0 - 1, -1)]
    return Trajectory(N, np.array(steps), "n")


def compose_type1(p, n):
    """p-trajectory followed by n-trajectory."""
    if p.N != n.N:
        raise ValueError("grid size mismatch")
    return Trajectory(p.N, np.concatenate([p.steps, n.steps]), "typeI")


def compose_type2(p, n):
    """Interleave p and n: ``p[0], n[0], p[1], n[1], ...``."""
    if p.N != n.N or len(p) != len(n):
        raise ValueError("type II needs equal-length p and n trajectories")
    steps = np.empty((2 * len(p), 2), dtype=np.int64)
    steps[0::2] = p.steps
    steps[1::2] = n.steps
    return Trajectory(p.N, steps, "typeII")


def split_type1(t):
    half = len(t) // 2
    return (Trajectory(t.N, t.steps[:half], "p"),
            Trajectory(t.N, t.steps[half:], "n"))


def split_type2(t):
    return (Trajectory(t.N, t.steps[0::2], "p"),
            Trajectory(t.N, t.steps[1::2], "n"))


def swiftlink_trajectory(N, M, kind="typeI", dist="binomial", rng=None):
    """Type I or type II trajectory of total length ``M`` (even, <= 2(2N-1))."""
    if M % 2 or not 2 <= M <= 2 * (2 * N - 1):
        raise ValueError(f"M={M} must be even and at most {2 * (2 * N - 1)}")
    rng = np.random.default_rng(rng)
    p = p_trajectory(N, M // 2, dist, rng)
    n = n_trajectory(N, M // 2, dist, rng)
    if kind == "typeI":
        return compose_type1(p, n)
    if kind == "typeII":
        return compose_type2(p, n)
    raise ValueError(f"unknown Swift-Link trajectory kind {kind!r}")


def induced_phase_matrix(t, eps):
    """Fill ``exp(j m eps)`` at the m-th visited cell; unvisited cells are 0.

    Later visits of a cell overwrite earlier ones.
    """
    P = np.zeros((t.N, t.N), dtype=np.complex128)
    P[t.rows, t.cols] = np.exp(1j * eps * np.arange(len(t)))
    return P


def block_phase_matrix(N, eps):
    """Four-block phase-error matrix assembled directly from its closed form."""
    h = N // 2
    a = vandermonde
    u1, u2 = N * N / 4 - 1, N * N / 4
    u3, u4 = N * N / 2 + N / 2 - 1, N * N - N / 2
    top = np.hstack([np.exp(1j * eps * u1) * np.outer(a(h, -N * eps / 2), a(h, -eps)),
                     np.exp(1j * eps * u2) * np.outer(a(h, N * eps / 2), a(h, eps))])
    bot = np.hstack([np.exp(1j * eps * u3) * np.outer(a(h, -eps), a(h, N * eps / 2)),
                     np.exp(1j * eps * u4) * np.outer(a(h, eps), a(h, -N * eps / 2))])
    return np.vstack([top, bot])


def p_cnt(N, eps):
    """Contour-constant phase matrix ``a(eps) a(eps)^T``."""
    a = vandermonde(N, eps)
    return np.outer(a, a)


def q_cnt(N, eps):
    """``exp(2j(N-1)eps) * p_cnt(N, -eps)``; phases fall along rising contours."""
    return np.exp(2j * (N - 1) * eps) * p_cnt(N, -eps)
