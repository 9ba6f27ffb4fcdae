"""Small shared test utilities (not oracles)."""

import math

import numpy as np
from scipy.optimize import minimize_scalar

from hamindex.loops import FourierLoop, e_norm, phase_rotate

TWO_PI = 2 * math.pi


def random_loop(rng, m=4, n=1, scale=1.0, tau=TWO_PI):
    return FourierLoop(tau, scale * rng.normal(size=(2 * m + 1, 2 * n)))


def aligned_e_distance(z: FourierLoop, ref: FourierLoop) -> float:
    """min over continuous phase theta of the E-norm of R(theta) z - ref."""
    ref = ref.with_level(z.m)

    def f(theta):
        return e_norm(phase_rotate(z, theta) - ref)

    grid = np.linspace(0, TWO_PI, 721)
    k = int(np.argmin([f(t) for t in grid]))
    h = grid[1] - grid[0]
    res = minimize_scalar(f, bounds=(grid[k] - h, grid[k] + h), method="bounded", options={"xatol": 1e-13})
    return float(min(res.fun, f(grid[k])))
