"""How a carrier frequency offset moves energy around the beamspace.

A single path at beamspace (0, 0) is observed through four trajectories. With
row-by-row sampling the offset accumulates N times faster down the rows than
across them, so the peak slides along the first axis. The four-quadrant block
order splits the peak into replicas. Contour-ordered p and n trajectories
shift it diagonally by the same amount in opposite directions, which is what
Swift-Link measures.

    python3 demos/cfo_shift.py
"""

import numpy as np

from swiftlink.experiments import demo_shift


def describe(grid, k=4):
    flat = np.argsort(grid, axis=None)[::-1][:k]
    cells = [np.unravel_index(i, grid.shape) for i in flat]
    return ", ".join(f"({int(r)},{int(c)}) {grid[r, c] / grid.max():.2f}" for r, c in cells)


def main():
    N = 16
    print(f"row, eps = 2pi/N^2  -> {describe(demo_shift(N, 2 * np.pi / N**2, 'row'), 2)}")
    print(f"row, eps = 0.09     -> {describe(demo_shift(N, 0.09, 'row'), 2)}")
    print(f"block, eps = 0.09   -> {describe(demo_shift(N, 0.09, 'block'))}")
    print(f"block N=32          -> {describe(demo_shift(32, 0.09, 'block'))}")
    eps = 2 * np.pi / N
    print(f"p, eps = 2pi/N      -> {describe(demo_shift(N, eps, 'p'), 1)}")
    print(f"n, eps = 2pi/N      -> {describe(demo_shift(N, eps, 'n'), 1)}")


if __name__ == "__main__":
    main()
