"""Numerical look at why random contour trajectories preserve sparse energy.

Sampling one random point per contour keeps, on average, the energy of a
sparse beamspace. The drift is controlled by the spacing of its components:
well separated components average out quickly, adjacent ones slowly.

    python3 demos/average_rip.py
"""

import numpy as np

from swiftlink.ripcheck import lemma1_check, sufficient_m, theorem2_bound, theorem2_check


def main():
    res = lemma1_check(16, details=True)
    print(f"step bound on T[n]: {res.violations} violations, {res.ties} exact ties, "
          f"worst ratio {res.max_ratio:.3f}")
    N, M_p = 32, 63
    for name, pts in (("opposite", [(0, 0), (16, 16)]), ("adjacent", [(0, 0), (1, 0)])):
        S = np.zeros((N, N), complex)
        for p in pts:
            S[p] = 1
        rep = theorem2_check(N, M_p, S, trials=50_000, rng=0)
        print(f"{name:9s} d_min={rep.d_min:2d}: drift {rep.empirical_deviation / rep.energy:.4f}"
              f" +- {rep.standard_error / rep.energy:.5f}, bound {rep.bound:.4f}")
    for dmin in (1, 4, 8, 16):
        print(f"N=32, K=2, d_min={dmin:2d}: bound {theorem2_bound(32, 63, 2, dmin):.3f}, "
              f"shortest trajectory for 0.5: {sufficient_m(32, 2, dmin)}")


if __name__ == "__main__":
    main()
