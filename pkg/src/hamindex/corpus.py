"""Seeded random coefficient corpora used by the property checks."""

from __future__ import annotations

import numpy as np

from .symplectic import CoefficientPath, trig_path


def _sym(rng, d, scale=1.0):
    M = rng.uniform(-scale, scale, size=(d, d))
    return 0.5 * (M + M.T)


def random_trig_coefficient(rng: np.random.Generator, n: int, degree: int = 2,
                            max_entry: float = 1.5, period: float = 2 * np.pi) -> CoefficientPath:
    """Trigonometric B(t) of the given degree with every entry of B(t) in [-max_entry, max_entry].

    Harmonic amplitudes are drawn uniformly, then the whole path is rescaled
    by a uniform factor so that the entrywise sup bound holds.
    """
    d = 2 * n
    B0 = _sym(rng, d)
    cos_terms = [_sym(rng, d) for _ in range(degree)]
    sin_terms = [_sym(rng, d) for _ in range(degree)]
    env = np.abs(B0) + sum(np.abs(M) for M in cos_terms + sin_terms)
    factor = max_entry * rng.uniform(0.3, 1.0) / float(env.max())
    return trig_path(B0 * factor, [M * factor for M in cos_terms],
                     [M * factor for M in sin_terms], period)


def random_positive_coefficient(rng: np.random.Generator, n: int, degree: int = 1,
                                shift: float = 0.1, period: float = 2 * np.pi) -> CoefficientPath:
    """B(t) = P(t)^T P(t) + shift I with P a random trigonometric matrix polynomial."""
    d = 2 * n
    w = 2 * np.pi / period
    P0 = rng.uniform(-1, 1, size=(d, d))
    Pc = [rng.uniform(-1, 1, size=(d, d)) for _ in range(degree)]
    Ps = [rng.uniform(-1, 1, size=(d, d)) for _ in range(degree)]
    bound = float((np.linalg.norm(P0, 2) + sum(np.linalg.norm(M, 2) for M in Pc + Ps)) ** 2 + shift)

    def f(t):
        t = np.asarray(t, dtype=float)
        P = np.broadcast_to(P0, (t.size, d, d)).copy()
        for k, (C, S) in enumerate(zip(Pc, Ps), start=1):
            P += np.cos(k * w * t)[:, None, None] * C + np.sin(k * w * t)[:, None, None] * S
        return np.einsum("kji,kjl->kil", P, P) + shift * np.eye(d)

    return CoefficientPath(f, period, n, vectorized=True, bound=bound)


def random_constant_symmetric(rng: np.random.Generator, n: int, low: float = -2.0, high: float = 2.0):
    M = rng.uniform(low, high, size=(2 * n, 2 * n))
    return np.triu(M) + np.triu(M, 1).T


def trig_corpus(seed: int = 20240501, size: int = 100, n_values=(1, 2)):
    rng = np.random.default_rng(seed)
    return [random_trig_coefficient(rng, n_values[k % len(n_values)]) for k in range(size)]


def positive_corpus(seed: int = 20240502, size: int = 50, n_values=(1, 2)):
    rng = np.random.default_rng(seed)
    return [random_positive_coefficient(rng, n_values[k % len(n_values)]) for k in range(size)]
