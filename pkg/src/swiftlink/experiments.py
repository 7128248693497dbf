"""Monte Carlo orchestration behind the CLI.

Every trial draws its channel and all method randomness from
``SeedSequence([seed, trial])``, so results do not depend on the number of
workers or on scheduling order, and all methods and operating points of one
trial see the same channel.
"""

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, astuple, dataclass, fields

import numpy as np

from . import ripcheck
from .baselines import exhaustive_scan, extract_beams, iid_cs_baseline
from .channel import random_clustered_channel, random_sparse_beamspace
from .config import METHODS
from .estimator import run_type1, run_type2
from .measurement import frame_weights, scatter, wideband_measure
from .metrics import achievable_rate, nmse, papr
from .numerics import dft2
from .recovery import recover_masked_beamspace
from .sequences import zc
from .trajectories import (block_trajectory, n_trajectory, p_trajectory, row_trajectory,
                           swiftlink_trajectory)

CSV_VERSION = "swiftlink-results/1"
RIP_STREAM = 1_000_003  # keeps ripcheck draws apart from simulation trials


@dataclass(frozen=True)
class ResultRow:
    trial: int
    seed: int
    snr_db: float
    cfo_hz: float
    measurements: int
    method: str
    rate: float
    nmse_db: float = None
    cfo_mse: float = None
    papr_db: float = None
    runtime_ms: float = None

    def sort_key(self):
        return (self.snr_db, self.cfo_hz, self.measurements, self.trial,
                METHODS.index(self.method))


def sigma_from_snr(snr_db):
    """Noise std for a per-measurement SNR (unit mean measurement power)."""
    return float(10 ** (-snr_db / 20))


def draw_channel(cfg, rng):
    N, L = cfg.n_antennas, cfg.taps
    if cfg.channel == "clustered":
        return random_clustered_channel(N, L, rng=rng)
    grid = "on" if cfg.channel == "sparse-on" else "off"
    return random_sparse_beamspace(N, cfg.sparsity, grid, rng, L=L)


def reference_channel(ch):
    """Narrowband channel seen by the correlate-and-sum receiver without CFO."""
    w = frame_weights(0.0, ch.L)
    return np.tensordot(w, ch.taps, axes=1)


def _run_method(method, cfg, ch, H_ref, z, snr_db, cfo, M, rng):
    sigma = sigma_from_snr(snr_db)
    W = cfg.bandwidth_hz
    out = {}
    if method.startswith("swiftlink"):
        kind = "typeI" if method.endswith("t1") else "typeII"
        t = swiftlink_trajectory(cfg.n_antennas, M, kind, cfg.trajectory_dist, rng)
        ms = wideband_measure(ch, t, z, cfo, W, sigma, rng)
        run = run_type1 if kind == "typeI" else run_type2
        res = run(ms.y, t, z, cfg.k_max, sigma, cfg.oversample, cfg.refine_iters, cfg.polish)
        beams = extract_beams(res.H_hat, cfg.phase_bits)
        out["nmse_db"] = nmse(H_ref, res.H_hat)
        out["cfo_mse"] = float((res.epsilon_hat - ms.effective_epsilon) ** 2)
        y = ms.y
    elif method.startswith("iid-cs"):
        f = 0.0 if method == "iid-cs-zero-cfo" else cfo
        H_hat, beams, y = iid_cs_baseline(ch, M, f, sigma, cfg.phase_bits, rng, cfg.k_max, W,
                                          return_measurements=True)
        out["nmse_db"] = nmse(H_ref, H_hat)
    elif method == "exhaustive":
        beams, y = exhaustive_scan(ch, sigma, rng, cfo, W, return_measurements=True)
    else:
        raise ValueError(f"unknown method {method!r}")
    out["rate"] = achievable_rate(ch, beams, sigma, cfg.n_subcarriers)
    out["papr_db"] = papr(y)
    return out


def run_trial(cfg, trial, timings=False):
    """All methods and operating points for one trial index."""
    ss = np.random.SeedSequence([cfg.seed, trial])
    ch = draw_channel(cfg, np.random.default_rng(ss.spawn(1)[0]))
    H_ref = reference_channel(ch)
    z = zc(cfg.n_antennas, cfg.zc_root, cfg.phase_bits).entries
    rows = []
    points = [(s, f, M) for s in cfg.snr_db for f in cfg.cfo_points_hz for M in cfg.m_points]
    for i, (snr_db, cfo, M) in enumerate(points):
        for j, method in enumerate(cfg.methods):
            # own stream per (point, method); paired across methods via the channel
            rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, trial, i, j]))
            t0 = time.perf_counter()
            out = _run_method(method, cfg, ch, H_ref, z, snr_db, cfo, M, rng)
            ms = 1e3 * (time.perf_counter() - t0) if timings else None
            rows.append(ResultRow(trial, cfg.seed, float(snr_db), float(cfo), int(M), method,
                                  runtime_ms=ms, **out))
    return rows


def _trial_job(args):
    cfg, trial, timings = args
    return run_trial(cfg, trial, timings)


def run_simulation(cfg, workers=1, timings=False):
    """Rows for ``cfg.trials`` trials, sorted independently of scheduling."""
    jobs = [(cfg, k, timings) for k in range(cfg.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            chunks = list(ex.map(_trial_job, jobs))
    else:
        chunks = [_trial_job(j) for j in jobs]
    rows = [r for c in chunks for r in c]
    return sorted(rows, key=ResultRow.sort_key)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows, columns=None, header_note=""):
    columns = columns or [f.name for f in fields(ResultRow)]
    buf = io.StringIO()
    buf.write(f"# {CSV_VERSION}{(' ' + header_note) if header_note else ''}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        vals = astuple(r) if isinstance(r, ResultRow) else r
        w.writerow([_fmt(v) for v in vals])
    return buf.getvalue()


AGG_COLUMNS = ["snr_db", "cfo_hz", "measurements", "method", "n",
               "rate_mean", "rate_se", "nmse_db_mean", "nmse_db_se",
               "cfo_mse_mean", "papr_db_mean"]


def aggregate(rows):
    """Mean and standard error per (SNR, CFO, M, method) cell."""
    if not rows:
        raise ValueError("no rows to aggregate")
    cells = {}
    for r in rows:
        cells.setdefault((r.snr_db, r.cfo_hz, r.measurements, r.method), []).append(r)
    out = []

    def stats(vals):
        vals = np.array([v for v in vals if v is not None], dtype=float)
        if vals.size == 0:
            return None, None
        se = float(vals.std(ddof=1) / np.sqrt(vals.size)) if vals.size > 1 else 0.0
        return float(vals.mean()), se

    for key in sorted(cells, key=lambda k: (k[0], k[1], k[2], METHODS.index(k[3]))):
        rs = cells[key]
        rate = stats(r.rate for r in rs)
        nm = stats(r.nmse_db for r in rs)
        cm = stats(r.cfo_mse for r in rs)
        pp = stats(r.papr_db for r in rs)
        out.append([*key, len(rs), rate[0], rate[1], nm[0], nm[1], cm[0], pp[0]])
    return out


def demo_shift(N, eps, kind="row", K_max=4):
    """Beamspace magnitude seen through a CFO-distorted trajectory.

    The virtual channel holds a single component at beamspace (0, 0). Full-grid
    kinds (``row``, ``block``) are reassembled sample by sample; ``p`` and
    ``n`` trajectories cover one point per contour and are reconstructed by
    sparse recovery. Returns the ``N x N`` magnitude grid.
    """
    G = np.full((N, N), 1.0 / N, dtype=np.complex128)  # idft2 of a unit spike at (0, 0)
    if kind in ("row", "block"):
        t = row_trajectory(N) if kind == "row" else block_trajectory(N)
        y = G[t.rows, t.cols] * np.exp(1j * eps * np.arange(len(t)))
        return np.abs(dft2(scatter(y, t)))
    if kind in ("p", "n"):
        make = p_trajectory if kind == "p" else n_trajectory
        t = make(N, 2 * N - 1, "uniform", 0)
        y = G[t.rows, t.cols] * np.exp(1j * eps * np.arange(len(t)))
        # no beamspace sparsity once the shift is off-grid, so allow a few atoms
        return np.abs(recover_masked_beamspace(y, t, K_max).S_hat)
    raise ValueError(f"unknown demo kind {kind!r}")


def grid_to_csv(grid, note=""):
    rows = [(int(r), int(c), float(grid[r, c])) for r in range(grid.shape[0])
            for c in range(grid.shape[1])]
    return rows_to_csv(rows, ["r", "c", "magnitude"], note)


def run_ripcheck(cfg):
    """Appendix-style bound checks for every grid size in ``cfg.rip_sizes``.

    Returns ``(summary dict, csv rows, violations)``.
    """
    rows = []
    report = {"harmonic_sum_ok": ripcheck.harmonic_check(), "sizes": {}}
    violations = 0 if report["harmonic_sum_ok"] else 1
    X, Y = ripcheck.default_grid(cfg.rip_grid)
    for i, N in enumerate(cfg.rip_sizes):
        M_p = 2 * N - 1
        l1 = ripcheck.lemma1_check(N, "uniform", (X, Y), details=True)
        l2 = ripcheck.lemma2_grid_check(N, M_p, (X, Y))
        entry = {"lemma1": asdict(l1),
                 "lemma2_failures": l2, "theorem2": []}
        violations += l1.violations + l2
        rows.append((N, M_p, "lemma1", 0, 0, float(l1.violations), 0.0, 0.0, l1.violations == 0))
        rows.append((N, M_p, "lemma2", 0, 0, float(l2), 0.0, 0.0, l2 == 0))
        cases = {"single": [(0, 0)], "max-spacing": [(0, 0), (N // 2, 0)],
                 "adjacent": [(0, 0), (1, 1)]}
        for j, (name, support) in enumerate(cases.items()):
            S = np.zeros((N, N), dtype=np.complex128)
            for x, y in support:
                S[x, y] = 1.0
            rng = np.random.default_rng([cfg.seed, RIP_STREAM, i, j])
            rep = ripcheck.theorem2_check(N, M_p, S, cfg.rip_trials, rng)
            ok = rep.passed
            violations += 0 if ok else 1
            entry["theorem2"].append({"case": name, **json.loads(rep.to_json())})
            rows.append((N, M_p, f"theorem2-{name}", rep.K, rep.d_min,
                         rep.empirical_deviation, rep.standard_error,
                         rep.bound * rep.energy, ok))
        report["sizes"][str(N)] = entry
    report["violations"] = violations
    return report, rows, violations


RIP_COLUMNS = ["N", "M_p", "check", "K", "d_min", "value", "standard_error", "bound", "passed"]
