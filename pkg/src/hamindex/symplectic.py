"""Standard symplectic structure, symplecticity and kernel predicates.

Phase space is R^{2n} with coordinates z = (p, q); every operator here acts
on that space with the block convention J = [[0, -I], [I, 0]].
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidDimensionError

ASYMMETRY_WARN = 1e-10


def standard_j(n: int) -> np.ndarray:
    """Return the 2n x 2n matrix [[0, -I], [I, 0]]."""
    if int(n) != n or n < 1:
        raise InvalidDimensionError(f"half-dimension must be a positive integer, got {n!r}")
    n = int(n)
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = -np.eye(n)
    J[n:, :n] = np.eye(n)
    return J


def half_dim(M: np.ndarray) -> int:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidDimensionError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] % 2:
        raise InvalidDimensionError(f"phase-space operators have even order, got {M.shape[0]}")
    return M.shape[0] // 2


def symplectic_defect(M: np.ndarray) -> float:
    """Max-entry norm of M^T J M - J."""
    M = np.asarray(M, dtype=float)
    J = standard_j(half_dim(M))
    return float(np.max(np.abs(M.T @ J @ M - J)))


def is_symplectic(M: np.ndarray, tol: float = 1e-10) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return symplectic_defect(M) <= tol


def kernel_dimension(M: np.ndarray, tol: float = 1e-8) -> int:
    """Numerical nullity of a square matrix.

    Counts singular values at or below ``tol * max(s_max, 1)``.  The floor of
    one keeps matrices such as ``gamma(tau) - I`` with entries of roundoff size
    from being judged against their own noise level.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidDimensionError(f"expected a square matrix, got shape {M.shape}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = np.linalg.svd(M, compute_uv=False)
    scale = max(float(s[0]) if s.size else 0.0, 1.0)
    return int(np.count_nonzero(s <= tol * scale))


def rotation(theta: float, n: int) -> np.ndarray:
    """exp(theta J) = cos(theta) I + sin(theta) J."""
    return np.cos(theta) * np.eye(2 * n) + np.sin(theta) * standard_j(n)


@dataclass(frozen=True)
class CoefficientPath:
    """A tau-periodic path of symmetric 2n x 2n matrices.

    ``func`` may return slightly asymmetric matrices; values are symmetrized
    on evaluation and a warning is emitted when the asymmetry exceeds 1e-10.
    ``func`` is evaluated on a scalar time unless ``vectorized`` is set, in
    which case it receives a 1-D array of times and returns (N, 2n, 2n).
    """

    func: Callable
    period: float
    n: int
    vectorized: bool = False
    bound: float | None = None  # optional sup-norm hint used to pick Galerkin levels

    def __post_init__(self):
        if self.period <= 0:
            raise ValueError("period must be positive")
        if self.n < 1:
            raise InvalidDimensionError("n must be >= 1")

    def __call__(self, t: float) -> np.ndarray:
        return self.sample(np.array([t]))[0]

    def sample(self, times) -> np.ndarray:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        if self.vectorized:
            vals = np.asarray(self.func(times), dtype=float)
        else:
            vals = np.array([np.asarray(self.func(t), dtype=float) for t in times])
        d = 2 * self.n
        vals = vals.reshape(len(times), d, d)
        asym = np.max(np.abs(vals - vals.transpose(0, 2, 1))) if len(times) else 0.0
        if asym > ASYMMETRY_WARN:
            warnings.warn(f"coefficient asymmetry {asym:.3e} exceeds {ASYMMETRY_WARN:g}; symmetrizing",
                          stacklevel=2)
        return 0.5 * (vals + vals.transpose(0, 2, 1))

    def sup_norm(self, samples: int = 256) -> float:
        """Sampled max spectral norm over one period."""
        t = np.arange(samples) * self.period / samples
        vals = self.sample(t)
        return float(np.max(np.abs(np.linalg.eigvalsh(vals))))

    def rescaled(self, factor: float) -> "CoefficientPath":
        """Scale the values by ``factor`` (used when the period is normalized)."""
        base = self
        if base.vectorized:
            f = lambda t: factor * base.func(t)  # noqa: E731
        else:
            f = lambda t: factor * np.asarray(base.func(t), dtype=float)  # noqa: E731
        bound = None if base.bound is None else abs(factor) * base.bound
        return CoefficientPath(f, base.period, base.n, base.vectorized, bound)

    def with_period(self, period: float) -> "CoefficientPath":
        """Same evaluator, viewed as a path with a (multiple) period."""
        return CoefficientPath(self.func, period, self.n, self.vectorized, self.bound)

    def shifted(self, shift: float) -> "CoefficientPath":
        base = self
        if base.vectorized:
            f = lambda t: base.func(np.asarray(t) + shift)  # noqa: E731
        else:
            f = lambda t: base.func(t + shift)  # noqa: E731
        return CoefficientPath(f, base.period, base.n, base.vectorized, base.bound)


def constant_path(B, period: float = 2 * np.pi) -> CoefficientPath:
    B = np.asarray(B, dtype=float)
    n = half_dim(B)
    B = 0.5 * (B + B.T)
    bound = float(np.max(np.abs(np.linalg.eigvalsh(B))))
    return CoefficientPath(lambda t: np.broadcast_to(B, (np.size(t), 2 * n, 2 * n)),
                           period, n, vectorized=True, bound=bound)


def trig_path(B0, cos_terms=(), sin_terms=(), period: float = 2 * np.pi) -> CoefficientPath:
    """B(t) = B0 + sum_k C_k cos(2 pi k t / period) + S_k sin(2 pi k t / period).

    ``cos_terms[k-1]`` and ``sin_terms[k-1]`` hold the harmonic-k matrices;
    all matrices are symmetrized.
    """
    B0 = np.asarray(B0, dtype=float)
    n = half_dim(B0)
    sym = lambda M: 0.5 * (np.asarray(M, float) + np.asarray(M, float).T)  # noqa: E731
    B0 = sym(B0)
    C = [sym(M) for M in cos_terms]
    S = [sym(M) for M in sin_terms]
    w = 2 * np.pi / period

    def f(t):
        t = np.asarray(t, dtype=float)
        out = np.broadcast_to(B0, (t.size, 2 * n, 2 * n)).copy()
        for k, M in enumerate(C, start=1):
            out += np.cos(k * w * t)[:, None, None] * M
        for k, M in enumerate(S, start=1):
            out += np.sin(k * w * t)[:, None, None] * M
        return out

    bound = float(np.linalg.norm(B0, 2) + sum(np.linalg.norm(M, 2) for M in C + S))
    return CoefficientPath(f, period, n, vectorized=True, bound=bound)
