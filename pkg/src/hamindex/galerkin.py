"""Fourier-Galerkin matrices on the truncated loop space E_m.

Coordinates: a loop z(t) = sum_{|j|<=m} exp(2 j pi t / tau J) a_j is stored as
the flat vector (a_{-m}, ..., a_m), each block of length 2n.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import NumericError, QuadratureError
from .symplectic import CoefficientPath, standard_j

ZERO_EIG = 1e-7
QUAD_TOL = 1e-9


def modes(m: int) -> np.ndarray:
    return np.arange(-m, m + 1)


def quadrature_nodes(m: int, minimum: int | None = None) -> int:
    n_nodes = 8 * (2 * m + 1)
    return max(n_nodes, minimum or 0)


def gram_weights(m: int, n: int, tau: float) -> np.ndarray:
    """Diagonal of the E-inner-product Gram matrix: tau for j = 0, tau |j| otherwise."""
    w = tau * np.maximum(np.abs(modes(m)), 1).astype(float)
    return np.repeat(w, 2 * n)


def a_matrix_diagonal(m: int, n: int) -> np.ndarray:
    """<A z, w> = 2 pi sum_j j a_j . b_j, for any period."""
    return np.repeat(2 * np.pi * modes(m).astype(float), 2 * n)


def b_matrix_from_samples(samples: np.ndarray, m: int, tau: float) -> np.ndarray:
    """Matrix of (x, y) -> int_0^tau B(t) x(t) . y(t) dt from uniform samples of B.

    Uses exp(theta J) = e^{i theta} P+ + e^{-i theta} P- with P+- = (I -+ iJ)/2,
    which reduces every block to projected Fourier coefficients of B.
    """
    N, d, _ = samples.shape
    n = d // 2
    if N <= 4 * m:
        raise QuadratureError(f"{N} nodes cannot resolve level {m}")
    J = standard_j(n)
    Pp = 0.5 * (np.eye(d) - 1j * J)
    Pm = 0.5 * (np.eye(d) + 1j * J)
    # Bt[l] = int B(t) exp(i l w t) dt for l = -2m..2m
    spec = tau * np.fft.ifft(samples, axis=0)
    ell = np.arange(-2 * m, 2 * m + 1)
    Bt = spec[ell % N]
    j = modes(m)
    out = np.zeros((2 * m + 1, 2 * m + 1, d, d), dtype=complex)
    for sl, Pl in ((1, Pp), (-1, Pm)):
        for sr, Pr in ((1, Pp), (-1, Pm)):
            idx = sr * j[None, :] - sl * j[:, None] + 2 * m
            out += Pl @ Bt[idx] @ Pr
    F = out.real.transpose(0, 2, 1, 3).reshape((2 * m + 1) * d, (2 * m + 1) * d)
    return 0.5 * (F + F.T)


def b_matrix(B: CoefficientPath, m: int, tau: float | None = None, nodes: int | None = None,
             tol: float = QUAD_TOL, max_doublings: int = 6) -> np.ndarray:
    """Quadrature of the B-form with a node-doubling convergence check."""
    tau = B.period if tau is None else tau
    N = quadrature_nodes(m, nodes)

    def at(N):
        t = np.arange(N) * (tau / N)
        return b_matrix_from_samples(B.sample(t), m, tau)

    F = at(N)
    for _ in range(max_doublings):
        F2 = at(2 * N)
        change = float(np.max(np.abs(F2 - F)))
        if change <= tol * max(1.0, float(np.max(np.abs(F2)))):
            return F2
        F, N = F2, 2 * N
    raise QuadratureError(f"B-form quadrature did not converge (last change {change:.3e} at {N} nodes)")


@dataclass(frozen=True)
class GalerkinForm:
    """Symmetric form F on E_m together with the diagonal E Gram matrix W."""

    level: int
    n: int
    tau: float
    F: np.ndarray
    W: np.ndarray
    _eigs: list = field(default_factory=list, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return (2 * self.level + 1) * 2 * self.n

    def eigenvalues(self) -> np.ndarray:
        """Generalized eigenvalues of F v = lambda W v, ascending."""
        if not self._eigs:
            s = 1.0 / np.sqrt(self.W)
            try:
                lam = scipy.linalg.eigvalsh(s[:, None] * self.F * s[None, :])
            except (np.linalg.LinAlgError, ValueError) as exc:
                raise NumericError(f"eigensolver failed: {exc}") from exc
            self._eigs.append(lam)
        return self._eigs[0]

    def negated(self) -> "GalerkinForm":
        return GalerkinForm(self.level, self.n, self.tau, -self.F, self.W)


def select_gap(eigs: np.ndarray, zero: float = ZERO_EIG) -> float:
    """Half the smallest |lambda| above the zero threshold."""
    big = np.abs(eigs)[np.abs(eigs) > zero]
    return 0.5 * float(big.min()) if big.size else 1.0


def inertia(eigs: np.ndarray, d: float) -> tuple[int, int, int]:
    """Counts in [d, inf), (-inf, -d], (-d, d)."""
    plus = int(np.count_nonzero(eigs >= d))
    minus = int(np.count_nonzero(eigs <= -d))
    return plus, minus, len(eigs) - plus - minus
