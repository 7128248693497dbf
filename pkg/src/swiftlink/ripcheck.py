"""Numerical checks of the average-RIP argument for p-trajectories.

``T_xy[n]`` is the expected value of ``exp(j(x r + y c))`` for the point
sampled on contour ``n``; its partial sums ``B`` control how far the expected
sampled energy of a sparse beamspace can drift from its Frobenius norm.
"""

import json
from dataclasses import asdict, dataclass

import numpy as np

from .trajectories import contour, contour_probabilities, p_trajectory, start_contour

# slack for floating-point ties when testing strict inequalities
TIE_TOL = 1e-12


@dataclass(frozen=True)
class RipReport:
    N: int
    M_p: int
    K: int
    d_min: int
    empirical_deviation: float
    standard_error: float
    bound: float
    energy: float
    trials: int
    lemma_violations: int = 0

    @property
    def passed(self):
        return self.empirical_deviation + 3 * self.standard_error <= self.bound * self.energy

    def to_json(self):
        d = asdict(self)
        d["passed"] = self.passed
        return json.dumps(d)


def _contour_arrays(n, N, dist):
    pts = np.array(contour(n, N))
    return pts[:, 0], pts[:, 1], contour_probabilities(len(pts), dist)


def t_xy(n, x, y, N, dist="uniform"):
    """``E[exp(j(x r + y c))]`` over contour ``n``, by enumeration.

    ``x`` and ``y`` may be broadcastable arrays.
    """
    r, c, p = _contour_arrays(n, N, dist)
    x = np.asarray(x, dtype=float)[..., None]
    y = np.asarray(y, dtype=float)[..., None]
    return np.sum(p * np.exp(1j * (x * r + y * c)), axis=-1)


def t_xy_closed_form(n, x, y):
    """Uniform upper-half contour: ``(1/(n+1)) sum_k exp(j((n-k)x + k y))``."""
    k = np.arange(n + 1)
    x = np.asarray(x, dtype=float)[..., None]
    y = np.asarray(y, dtype=float)[..., None]
    return np.mean(np.exp(1j * ((n - k) * x + k * y)), axis=-1)


def t_xy_recursion(n, x, y):
    """Next value ``T[n+1]`` from ``T[n]`` on upper-half uniform contours."""
    return ((n + 1) / (n + 2) * np.exp(1j * np.asarray(x)) * t_xy_closed_form(n, x, y)
            + np.exp(1j * (n + 1) * np.asarray(y)) / (n + 2))


def default_grid(n_points=64):
    g = -np.pi + 2 * np.pi * np.arange(n_points) / n_points
    return np.meshgrid(g, g, indexing="ij")


@dataclass(frozen=True)
class Lemma1Result:
    violations: int
    ties: int
    max_ratio: float
    checked: int


def lemma1_check(N, dist="uniform", grid=None, details=False):
    """Count grid points where ``|T[n+1] - exp(jx) T[n]| < 2/(n+2)`` (or the y form) fails.

    Covers ``0 <= n < N-1``. Differences within ``TIE_TOL`` of the bound count
    as ties, not violations: the bound is reached exactly at ``n = 0`` when
    ``x - y = pi (mod 2 pi)``. Only the uniform distribution is covered by the
    underlying inequality; other distributions are reported as-is.
    """
    X, Y = default_grid() if grid is None else (np.asarray(grid[0]), np.asarray(grid[1]))
    viol = ties = 0
    worst = 0.0
    for n in range(N - 1):
        T0 = t_xy(n, X, Y, N, dist)
        T1 = t_xy(n + 1, X, Y, N, dist)
        bound = 2 / (n + 2)
        for shift in (X, Y):
            d = np.abs(T1 - np.exp(1j * shift) * T0)
            viol += int(np.sum(d > bound + TIE_TOL))
            ties += int(np.sum(np.abs(d - bound) <= TIE_TOL))
            worst = max(worst, float(np.max(d) / bound))
    res = Lemma1Result(viol, ties, worst, 2 * (N - 1) * np.size(X))
    return res if details else res.violations


def eta(x, y):
    s = max(abs(np.sin(x / 2)), abs(np.sin(y / 2)))
    if s < 1e-9:
        raise ValueError("eta diverges at x = y = 0 (mod 2 pi)")
    return 1.0 / s


def lemma2_bounds(N, M_p):
    """Stated constants ``(2 + log(.), 4 + 2 log(.))`` before the ``eta`` factor."""
    lg = np.log(N / (N + 1 - (M_p + 1) / 2))
    return 2 + lg, 4 + 2 * lg


def lemma2_check(N, M_p, x, y, dist="uniform"):
    """Partial sums of ``T`` over a centred p-trajectory range and their bounds.

    Returns ``(|B_U|, |B|, bound_U, bound)`` where ``B_U`` sums contours
    ``p0 .. N-1`` and ``B`` all ``M_p`` contours.
    """
    if M_p % 2 == 0 or not 1 <= M_p <= 2 * N - 1:
        raise ValueError("M_p must be odd and at most 2N-1")
    e = eta(x, y)
    p0 = start_contour(N, M_p)
    T = np.array([t_xy(n, x, y, N, dist) for n in range(p0, p0 + M_p)])
    bu = abs(T[:N - p0].sum())
    b = abs(T.sum())
    cu, ca = lemma2_bounds(N, M_p)
    return float(bu), float(b), float(cu * e), float(ca * e)


def lemma2_grid_check(N, M_p, grid=None, eta_max=1e6):
    """Number of grid points where either bound of :func:`lemma2_check` fails."""
    X, Y = default_grid() if grid is None else grid
    fails = 0
    for x, y in zip(np.ravel(X), np.ravel(Y)):
        if max(abs(np.sin(x / 2)), abs(np.sin(y / 2))) < 1 / eta_max:
            continue
        bu, b, cu, ca = lemma2_check(N, M_p, x, y)
        fails += (bu > cu + TIE_TOL) + (b > ca + TIE_TOL)
    return int(fails)


def harmonic_check(I_max=10_000):
    """``log(I+1) < H_I <= 1 + log(I)`` for every ``I <= I_max``."""
    I = np.arange(1, I_max + 1)
    H = np.cumsum(1.0 / I)
    return bool(np.all(np.log(I + 1) < H) and np.all(H <= 1 + np.log(I) + TIE_TOL))


def wrap_distance(d, N):
    d = abs(int(d)) % N
    return min(d, N - d)


def d_min(support, N):
    """Minimum over pairs of ``max(|dx|+, |dy|+)`` with wrap-around distances."""
    pts = [tuple(map(int, p)) for p in support]
    if len(pts) < 2:
        raise ValueError("d_min needs at least two support points")
    if len(set(pts)) < len(pts):
        raise ValueError("support points must be distinct")
    return min(max(wrap_distance(a[0] - b[0], N), wrap_distance(a[1] - b[1], N))
               for i, a in enumerate(pts) for b in pts[i + 1:])


def theorem2_bound(N, M_p, K, dmin):
    """Relative bound on ``|E[E] - ||S||^2| / ||S||^2``."""
    if K <= 1:
        return 0.0
    lg = np.log(N / (N + 1 - (M_p - 1) / 2))
    return (K - 1) * (4 + 2 * lg) / (M_p * np.sin(np.pi * dmin / N))


def sufficient_m(N, K, dmin, delta=0.5):
    """Smallest odd ``M_p <= 2N-1`` with ``theorem2_bound <= delta``, or ``None``."""
    for M_p in range(1, 2 * N, 2):
        if theorem2_bound(N, M_p, K, dmin) <= delta:
            return M_p
    return None


def sampled_energy(S, t):
    """``(1/M) sum_n |y[n]|^2`` for noiseless samples of ``idft2``-scaled ``S``.

    Each sample is ``sum_k s_k exp(j 2 pi (x_k r + y_k c) / N)``, so a single
    component gives exactly ``|s|^2`` per sample.
    """
    S = np.asarray(S)
    N = S.shape[0]
    xs, ys = np.nonzero(S)
    s = S[xs, ys]
    ph = 2 * np.pi * (np.outer(t.rows, xs) + np.outer(t.cols, ys)) / N
    y = np.exp(1j * ph) @ s
    return float(np.mean(np.abs(y) ** 2))


def theorem2_check(N, M_p, S, trials=100_000, rng=None, batch=4096):
    """Monte Carlo of the expected sampled energy over uniform p-trajectories."""
    S = np.asarray(S, dtype=np.complex128)
    if S.shape != (N, N):
        raise ValueError("S must be N x N")
    if M_p % 2 == 0:
        raise ValueError("M_p must be odd")
    if trials < 2:
        raise ValueError("need at least two trials")
    rng = np.random.default_rng(rng)
    xs, ys = np.nonzero(S)
    K = xs.size
    if K == 0:
        raise ValueError("S is zero")
    energy = float(np.sum(np.abs(S) ** 2))
    if K == 1:
        return RipReport(N, M_p, 1, 0, 0.0, 0.0, 0.0, energy, trials)
    dm = d_min(list(zip(xs, ys)), N)
    s = S[xs, ys]
    p0 = start_contour(N, M_p)
    # sample r uniformly on every contour for a whole batch of trajectories
    ks = np.arange(p0, p0 + M_p)
    lo = np.maximum(0, ks - N + 1)
    cnt = np.minimum(ks, N - 1) - lo + 1
    E = np.empty(trials)
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        r = lo + np.floor(rng.random((b, M_p)) * cnt).astype(np.int64)
        c = ks - r
        ph = 2 * np.pi * (r[..., None] * xs + c[..., None] * ys) / N
        y = np.exp(1j * ph) @ s
        E[done:done + b] = np.mean(np.abs(y) ** 2, axis=1)
        done += b
    dev = abs(E.mean() - energy)
    se = E.std(ddof=1) / np.sqrt(trials)
    return RipReport(N, M_p, K, dm, float(dev), float(se), float(theorem2_bound(N, M_p, K, dm)),
                     energy, trials)


def uniform_p_trajectory(N, M_p, rng=None):
    return p_trajectory(N, M_p, "uniform", rng)
