"""Fundamental solutions of y' = J B(t) y, iterated paths and monodromy."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import EvaluationError, InvalidArgumentError, NonConvergenceError
from .symplectic import CoefficientPath, standard_j

DEFAULT_STEPS = 512
DEFAULT_STAGES = 3
MONODROMY_TOL = 1e-10
MAX_STEPS = 1 << 16


@dataclass(frozen=True)
class SymplecticPath:
    """Samples (t_i, gamma(t_i)) of a path in Sp(2n) starting at the identity."""

    times: np.ndarray
    values: np.ndarray
    period: float

    @property
    def n(self) -> int:
        return self.values.shape[1] // 2

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def max_defect(self) -> float:
        return float(kernels.max_symplectic_defect(np.ascontiguousarray(self.values)))


@lru_cache(maxsize=8)
def gauss_legendre_tableau(stages: int):
    """Butcher tableau (a, b, c) of the s-stage Gauss collocation method.

    One stage is the implicit midpoint rule.
    """
    if stages < 1:
        raise InvalidArgumentError("stages must be >= 1")
    x, _ = np.polynomial.legendre.leggauss(stages)
    c = 0.5 * (x + 1.0)
    a = np.empty((stages, stages))
    b = np.empty(stages)
    P = np.polynomial.Polynomial
    for j in range(stages):
        others = [c[k] for k in range(stages) if k != j]
        lag = P([1.0])
        for ck in others:
            lag = lag * P([-ck, 1.0]) / (c[j] - ck)
        integ = lag.integ()
        b[j] = integ(1.0) - integ(0.0)
        a[:, j] = integ(c) - integ(0.0)
    return a, b, c


def _stage_matrices(B: CoefficientPath, horizon: float, steps: int, stages: int):
    a, b, c = gauss_legendre_tableau(stages)
    h = horizon / steps
    t = (np.arange(steps)[:, None] + c[None, :]) * h
    vals = B.sample(t.ravel())
    if not np.all(np.isfinite(vals)):
        bad = np.argwhere(~np.all(np.isfinite(vals.reshape(len(vals), -1)), axis=1))[0, 0]
        raise EvaluationError("coefficient evaluation is not finite", t=float(t.ravel()[bad]))
    J = standard_j(B.n)
    stage = np.einsum("ij,kjl->kil", J, vals).reshape(steps, stages, 2 * B.n, 2 * B.n)
    return np.ascontiguousarray(stage), h, a, b


def integrate(B: CoefficientPath, horizon: float, steps: int, stages: int = DEFAULT_STAGES) -> SymplecticPath:
    """One fixed-grid pass of the collocation scheme."""
    if horizon <= 0:
        raise InvalidArgumentError("horizon must be positive")
    if steps < 16:
        raise InvalidArgumentError("steps must be >= 16")
    stage, h, a, b = _stage_matrices(B, horizon, steps, stages)
    values = kernels.collocation_propagate(stage, h, np.ascontiguousarray(a), np.ascontiguousarray(b))
    times = np.arange(steps + 1) * h
    times[-1] = horizon
    return SymplecticPath(times, np.asarray(values), B.period)


def fundamental_solution(B: CoefficientPath, horizon: float | None = None, steps: int = DEFAULT_STEPS,
                         stages: int = DEFAULT_STAGES, refine: bool = True,
                         tol: float = MONODROMY_TOL) -> SymplecticPath:
    """Fundamental solution gamma on [0, horizon] with gamma(0) = I.

    With ``refine`` the grid is doubled until the endpoint changes by less
    than ``tol * max(1, |gamma(horizon)|)`` (max-entry norms); the finer of the
    last two grids is returned.
    """
    horizon = B.period if horizon is None else horizon
    path = integrate(B, horizon, steps, stages)
    if not refine:
        return path
    history = []
    while True:
        finer = integrate(B, horizon, 2 * steps, stages)
        scale = max(1.0, float(np.max(np.abs(finer.values[-1]))))
        change = float(np.max(np.abs(finer.values[-1] - path.values[-1]))) / scale
        history.append((2 * steps, change))
        path, steps = finer, 2 * steps
        if change < tol:
            return path
        if steps >= MAX_STEPS:
            raise NonConvergenceError(f"monodromy did not settle below {tol:g} by {steps} steps",
                                      {"history": history})


def iterate_path(gamma: SymplecticPath, m: int) -> SymplecticPath:
    """gamma^m(t) = gamma(t - j tau) gamma(tau)^j on [j tau, (j+1) tau]."""
    if int(m) != m or m < 1:
        raise InvalidArgumentError(f"iteration count must be a positive integer, got {m!r}")
    m = int(m)
    tau = gamma.horizon
    if abs(tau - gamma.period) > 1e-12 * max(1.0, tau):
        raise InvalidArgumentError("path must cover exactly one period")
    if m == 1:
        return gamma
    M = gamma.values[-1]
    times = [gamma.times]
    values = [gamma.values]
    power = np.eye(M.shape[0])
    for j in range(1, m):
        power = power @ M if j > 1 else M.copy()
        times.append(gamma.times[1:] + j * tau)
        values.append(gamma.values[1:] @ power)
    return SymplecticPath(np.concatenate(times), np.concatenate(values), gamma.period)


def monodromy(gamma: SymplecticPath) -> np.ndarray:
    if len(gamma.values) == 0:
        raise InvalidArgumentError("empty path")
    return gamma.values[-1].copy()
