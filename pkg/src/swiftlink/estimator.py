"""Swift-Link: CFO-robust compressive channel estimation from p/n trajectories.

A p-trajectory sees the virtual channel distorted by ``p_cnt(eps)`` and an
n-trajectory by ``p_cnt(-eps)`` (up to global phases), so the two sparse
estimates are beamspace shifts of each other in opposite directions. The
shift, and hence the CFO, is read off the contour sums of their product.
"""

import json
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .numerics import dft2, idft2, inner, oversampled_dft, wrap_phase
from .recovery import (channel_from_beamspace, invert_mask, omp, partial_dft_dictionary,
                       recover_masked_beamspace)
from .sequences import spectral_mask
from .trajectories import p_cnt, split_type1, split_type2


@dataclass
class SwiftLinkResult:
    epsilon_hat: float
    H_hat: np.ndarray = field(repr=False)
    phi_hat: float = 0.0
    diagnostics: dict = field(default_factory=dict, repr=False)

    def to_json(self, H_true=None, hz_per_rad=None):
        from .metrics import nmse
        d = {"epsilon_hat_rad": self.epsilon_hat, "phi_hat": self.phi_hat}
        if hz_per_rad is not None:
            d["epsilon_hat_hz"] = self.epsilon_hat * hz_per_rad
        if H_true is not None:
            d["nmse_db"] = nmse(H_true, self.H_hat)
        diag = self.diagnostics
        d["support"] = {k: [list(map(int, s)) for s in v]
                        for k, v in diag.get("support", {}).items()}
        d["residuals"] = diag.get("residuals", {})
        d["timings_ms"] = diag.get("timings_ms", {})
        return json.dumps(d)


def g_vector(G_p, G_n):
    """Contour sums ``g[k] = sum_{r+c=k} G_p(r,c) conj(G_n(r,c))``."""
    G_p = np.asarray(G_p)
    G_n = np.asarray(G_n)
    if G_p.shape != G_n.shape or G_p.ndim != 2 or G_p.shape[0] != G_p.shape[1]:
        raise ValueError("need two N x N matrices of equal size")
    N = G_p.shape[0]
    prod = G_p * np.conj(G_n)
    k = np.add.outer(np.arange(N), np.arange(N)).ravel()
    g = np.zeros(2 * N - 1, dtype=np.complex128)
    np.add.at(g, k, prod.ravel())
    return g


def estimate_cfo(g, spacing=2, range_limit=None, oversample=64):
    """Maximize ``|sum_k g[k] exp(-j spacing delta k)|`` over ``delta``.

    The coarse maximum is taken on a zero-padded DFT grid restricted to
    ``|delta| < range_limit`` (default ``pi/spacing``). Three bins around the
    peak of the phase-centred spectrum give a complex quadratic
    interpolation, and a bounded scalar search on the exact objective within
    half a bin of it finishes the estimate.
    """
    g = np.asarray(g, dtype=np.complex128)
    if spacing not in (2, 4):
        raise ValueError("spacing must be 2 (type I) or 4 (type II)")
    if oversample < 4:
        raise ValueError("oversample must be >= 4")
    if not np.any(np.abs(g) > 0):
        raise ValueError("g is identically zero; no signal to estimate from")
    limit = np.pi / spacing if range_limit is None else float(range_limit)
    n = g.size
    X = oversampled_dft(g, oversample)
    nf = X.size
    omega = wrap_phase(2 * np.pi * np.arange(nf) / nf)
    # phase reference at the middle of g so a symmetric-weight tone gives a real peak
    Xc = X * np.exp(1j * omega * (n - 1) / 2)
    allowed = np.abs(omega) < spacing * limit
    if not allowed.any():
        raise ValueError("search range excludes every DFT bin")
    mag = np.where(allowed, np.abs(Xc), -np.inf)
    b = int(np.argmax(mag))
    a, m, c = Xc[(b - 1) % nf], Xc[b], Xc[(b + 1) % nf]
    denom = 2 * (2 * m - a - c)
    delta = 0.0 if denom == 0 else float(np.real((c - a) / denom))
    delta = float(np.clip(delta, -1.0, 1.0))
    w0 = omega[b] + 2 * np.pi * delta / nf
    k = np.arange(n)

    def neg_mag(w):
        return -abs(np.dot(g, np.exp(-1j * w * k)))

    half = np.pi / nf
    res = minimize_scalar(neg_mag, bounds=(w0 - half, w0 + half), method="bounded",
                          options={"xatol": 1e-13})
    w = res.x if -res.fun >= -neg_mag(w0) else w0
    return float(np.clip(wrap_phase(w) / spacing, -limit, limit))


def compensate_and_combine(G_p, G_n, eps_hat):
    """Undo the opposite contour phase ramps and add the branches coherently.

    Returns ``(M, phi)`` where ``M = G_p . p_cnt(-eps) + exp(j phi) G_n . p_cnt(eps)``
    and ``phi`` is the phase of their inner product.
    """
    if not np.isfinite(eps_hat):
        raise ValueError("eps_hat must be finite")
    N = np.shape(G_p)[0]
    M_p = np.asarray(G_p) * p_cnt(N, -eps_hat)
    M_n = np.asarray(G_n) * p_cnt(N, eps_hat)
    phi = float(np.angle(inner(M_p, M_n)))
    return M_p + np.exp(1j * phi) * M_n, phi


def _branch(y, t, K_max, sigma, label):
    # noise-matched stop, but a branch always keeps its strongest atom
    tol = np.sqrt(len(t)) * sigma
    try:
        est = recover_masked_beamspace(y, t, min(K_max, len(t)), tol, min_atoms=1)
    except ValueError as exc:
        raise ValueError(f"{label}-branch recovery failed: {exc}") from exc
    return est


def polish_cfo(y, t, eps0, K_max=16, halfwidth=0.1, n_grid=41):
    """Local refinement of a CFO estimate by sparse-fit residual minimization.

    At the true offset the de-rotated samples ``y[n] exp(-j eps n)`` are an
    exact ``K``-sparse combination of partial-DFT atoms, so the residual of a
    sparse fit over the whole trajectory is minimal there. A grid over
    ``eps0 +- halfwidth`` picks the support; a bounded scalar search with that
    support fixed gives the final value. The fit always uses ``K_max`` atoms so
    costs stay comparable under noise.
    """
    y = np.asarray(y, dtype=np.complex128)
    A = partial_dft_dictionary(t)
    n = np.arange(len(y))
    K = min(K_max, len(y))

    def sparse_fit(eps):
        _, supp, hist = omp(A, y * np.exp(-1j * eps * n), K)
        return hist[-1], supp

    grid = eps0 + np.linspace(-halfwidth, halfwidth, n_grid)
    costs = [sparse_fit(e)[0] for e in grid]
    i = int(np.argmin(costs))
    _, supp = sparse_fit(grid[i])
    As = A[:, supp]

    def cost(eps):
        yc = y * np.exp(-1j * eps * n)
        coef = np.linalg.lstsq(As, yc, rcond=None)[0]
        return np.linalg.norm(yc - As @ coef)

    step = grid[1] - grid[0]
    res = minimize_scalar(cost, bounds=(grid[i] - step, grid[i] + step), method="bounded",
                          options={"xatol": 1e-10})
    return float(res.x)


def _channel_from_virtual(G, mask):
    return channel_from_beamspace(invert_mask(dft2(G), mask))


def run_type1(y, t, z, K_max=16, sigma=0.0, oversample=64, refine_iters=2,
              polish=True, range_limit=None):
    """Swift-Link on a type I (p then n) trajectory.

    The first pass follows the plain algorithm: two sparse recoveries, the
    contour-sum CFO estimate, compensation and coherent combining. Each of the
    ``refine_iters`` further passes removes the current CFO estimate from the
    samples of both halves, repeats the recoveries and adds the residual
    offset found. With ``polish`` the estimate is finished by
    :func:`polish_cfo`. The halves are always combined with their own phase,
    so an imperfect estimate causes no inter-branch phase error.
    ``refine_iters=0, polish=False`` is the single-pass algorithm.
    """
    if t.kind != "typeI":
        raise ValueError("run_type1 needs a type I trajectory")
    y = np.asarray(y, dtype=np.complex128)
    if len(y) != len(t):
        raise ValueError("measurement count does not match trajectory length")
    t0 = time.perf_counter()
    mask = spectral_mask(z)
    tp, tn = split_type1(t)
    n = np.arange(len(y))
    lim = np.pi / 2 if range_limit is None else range_limit

    def branches(eps_c):
        yc = y * np.exp(-1j * eps_c * n)
        ep = _branch(yc[:len(tp)], tp, K_max, sigma, "p")
        en = _branch(yc[len(tp):], tn, K_max, sigma, "n")
        G_p, G_n = idft2(ep.S_hat), idft2(en.S_hat)
        g = g_vector(G_p, G_n)
        if not np.any(np.abs(g) > 0):
            raise ValueError("branch estimates do not overlap; cannot estimate CFO")
        return ep, en, G_p, G_n, g

    eps_hat = 0.0
    history = []
    for it in range(refine_iters + 1):
        ep, en, G_p, G_n, g = branches(eps_hat)
        delta = estimate_cfo(g, 2, lim if it == 0 else np.pi / 2, oversample)
        eps_hat += delta
        history.append(eps_hat)
    if polish:
        eps_hat = float(np.clip(polish_cfo(y, t, eps_hat, K_max), -lim, lim))
        history.append(eps_hat)
        ep, en, G_p, G_n, g = branches(eps_hat)
        delta = 0.0
    M, phi = compensate_and_combine(G_p, G_n, delta)
    H_hat = _channel_from_virtual(M / 2, mask)
    diag = {
        "g": g, "eps_history": history,
        "support": {"p": ep.support, "n": en.support},
        "residuals": {"p": ep.residual_norm, "n": en.residual_norm},
        "G_p": G_p, "G_n": G_n,
        "timings_ms": {"total": 1e3 * (time.perf_counter() - t0)},
    }
    return SwiftLinkResult(float(eps_hat), H_hat, phi, diag)


def run_type2(y, t, z, K_max=16, sigma=0.0, oversample=64, refine_iters=2,
              polish=True, range_limit=None):
    """Swift-Link on an interleaved (type II) trajectory.

    Odd and even samples give the p- and n-branch estimates; the CFO is
    estimated with the spacing-4 kernel (refined as in :func:`run_type1`),
    every sample is de-rotated and one final recovery runs over the whole
    trajectory.
    """
    if t.kind != "typeII":
        raise ValueError("run_type2 needs a type II trajectory")
    y = np.asarray(y, dtype=np.complex128)
    if len(y) != len(t):
        raise ValueError("measurement count does not match trajectory length")
    t0 = time.perf_counter()
    mask = spectral_mask(z)
    tp, tn = split_type2(t)
    n = np.arange(len(y))
    eps_hat = 0.0
    history = []
    lim = np.pi / 4 if range_limit is None else range_limit
    for it in range(refine_iters + 1):
        yc = y * np.exp(-1j * eps_hat * n)
        ep = _branch(yc[0::2], tp, K_max, sigma, "p")
        en = _branch(yc[1::2], tn, K_max, sigma, "n")
        g = g_vector(idft2(ep.S_hat), idft2(en.S_hat))
        if not np.any(np.abs(g) > 0):
            raise ValueError("branch estimates do not overlap; cannot estimate CFO")
        eps_hat += estimate_cfo(g, 4, lim if it == 0 else np.pi / 4, oversample)
        history.append(eps_hat)
    if polish:
        eps_hat = float(np.clip(polish_cfo(y, t, eps_hat, K_max), -lim, lim))
        history.append(eps_hat)
    yc = y * np.exp(-1j * eps_hat * n)
    final = _branch(yc, t, K_max, sigma, "full")
    H_hat = channel_from_beamspace(invert_mask(final.S_hat, mask))
    diag = {
        "g": g, "eps_history": history,
        "support": {"p": ep.support, "n": en.support, "full": final.support},
        "residuals": {"p": ep.residual_norm, "n": en.residual_norm,
                      "full": final.residual_norm},
        "timings_ms": {"total": 1e3 * (time.perf_counter() - t0)},
    }
    return SwiftLinkResult(float(eps_hat), H_hat, 0.0, diag)


def cfo_range(kind, W, N_s=13, L=13):
    """Largest analog CFO (Hz) whose induced shift is still unambiguous."""
    f1 = W / (4 * (N_s + L - 1))
    if kind == "typeI":
        return f1
    if kind == "typeII":
        return f1 / 2
    raise ValueError(f"unknown trajectory kind {kind!r}")
