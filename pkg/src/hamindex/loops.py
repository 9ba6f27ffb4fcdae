"""Truncated Fourier loop space E_m and the rescaled action functional.

A loop of period tau is z(t) = sum_{|j|<=m} exp(2 j pi t / tau J) a_j with
a_j in R^{2n}.  The E inner product weights mode j by tau |j| and the
constant mode by tau.  The action on 2 pi-periodic loops is

    G_alpha(z) = alpha int_0^tau H(alpha t, z(t)) dt - 1/2 <A z, z>,

whose critical points are the 2 pi alpha-periodic solutions of z' = J H'_z
after the substitution t -> t / alpha.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import galerkin
from .errors import IncompatibleLoopsError, InvalidArgumentError, QuadratureError
from .galerkin import GalerkinForm
from .symplectic import CoefficientPath, standard_j

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class FourierLoop:
    """Coefficients ``coeffs[j + m]`` = a_j for j = -m..m."""

    tau: float
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 2 or c.shape[0] % 2 == 0 or c.shape[1] % 2:
            raise InvalidArgumentError(f"coefficients must have shape (2m+1, 2n), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise InvalidArgumentError("loop coefficients must be finite")
        if self.tau <= 0:
            raise InvalidArgumentError("period must be positive")
        object.__setattr__(self, "coeffs", c)

    @property
    def m(self) -> int:
        return (self.coeffs.shape[0] - 1) // 2

    @property
    def n(self) -> int:
        return self.coeffs.shape[1] // 2

    @classmethod
    def zeros(cls, m: int, n: int, tau: float = TWO_PI) -> "FourierLoop":
        return cls(tau, np.zeros((2 * m + 1, 2 * n)))

    @classmethod
    def single_mode(cls, j: int, a, m: int, tau: float = TWO_PI) -> "FourierLoop":
        a = np.asarray(a, dtype=float)
        z = np.zeros((2 * m + 1, a.size))
        z[j + m] = a
        return cls(tau, z)

    @classmethod
    def from_vector(cls, v, m: int, n: int, tau: float = TWO_PI) -> "FourierLoop":
        return cls(tau, np.asarray(v, dtype=float).reshape(2 * m + 1, 2 * n))

    def vector(self) -> np.ndarray:
        return self.coeffs.ravel().copy()

    def mode(self, j: int) -> np.ndarray:
        if abs(j) > self.m:
            return np.zeros(2 * self.n)
        return self.coeffs[j + self.m]

    def with_level(self, m: int) -> "FourierLoop":
        """Pad with zero modes or truncate to level m."""
        out = np.zeros((2 * m + 1, 2 * self.n))
        k = min(m, self.m)
        out[m - k:m + k + 1] = self.coeffs[self.m - k:self.m + k + 1]
        return FourierLoop(self.tau, out)

    def __add__(self, other: "FourierLoop") -> "FourierLoop":
        a, b = _aligned(self, other)
        return FourierLoop(self.tau, a + b)

    def __sub__(self, other: "FourierLoop") -> "FourierLoop":
        a, b = _aligned(self, other)
        return FourierLoop(self.tau, a - b)

    def __mul__(self, s: float) -> "FourierLoop":
        return FourierLoop(self.tau, s * self.coeffs)

    __rmul__ = __mul__

    def __call__(self, t):
        return evaluate(self, t)

    def to_json(self) -> dict:
        return {"tau": self.tau, "n": self.n, "m": self.m, "coeffs": self.coeffs.tolist()}

    @classmethod
    def from_json(cls, data) -> "FourierLoop":
        if isinstance(data, str):
            data = json.loads(data)
        loop = cls(float(data["tau"]), np.asarray(data["coeffs"], dtype=float))
        if loop.m != int(data["m"]) or loop.n != int(data["n"]):
            raise InvalidArgumentError("loop payload m/n do not match the coefficient array")
        return loop


def _aligned(z1: FourierLoop, z2: FourierLoop):
    if abs(z1.tau - z2.tau) > 1e-12 * max(z1.tau, z2.tau):
        raise IncompatibleLoopsError(f"period mismatch: {z1.tau} vs {z2.tau}")
    if z1.n != z2.n:
        raise IncompatibleLoopsError(f"dimension mismatch: n={z1.n} vs n={z2.n}")
    m = max(z1.m, z2.m)
    return z1.with_level(m).coeffs, z2.with_level(m).coeffs


@dataclass(frozen=True)
class SplitLoop:
    plus: FourierLoop
    zero: FourierLoop
    minus: FourierLoop

    def total(self) -> FourierLoop:
        return self.plus + self.zero + self.minus


def split(z: FourierLoop) -> SplitLoop:
    j = galerkin.modes(z.m)[:, None]
    return SplitLoop(FourierLoop(z.tau, np.where(j > 0, z.coeffs, 0.0)),
                     FourierLoop(z.tau, np.where(j == 0, z.coeffs, 0.0)),
                     FourierLoop(z.tau, np.where(j < 0, z.coeffs, 0.0)))


def _trig_tables(m: int, tau: float, t):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    ang = np.outer(t, galerkin.modes(m)) * (TWO_PI / tau)
    return np.cos(ang), np.sin(ang)


@lru_cache(maxsize=64)
def _node_tables(m: int, tau: float, N: int):
    C, S = _trig_tables(m, tau, node_times(N, tau))
    C.setflags(write=False)
    S.setflags(write=False)
    return C, S


def _evaluate_nodes(z: FourierLoop, N: int) -> np.ndarray:
    C, S = _node_tables(z.m, z.tau, N)
    return C @ z.coeffs + S @ (z.coeffs @ standard_j(z.n).T)


def evaluate(z: FourierLoop, t) -> np.ndarray:
    """z(t) for scalar t (shape (2n,)) or an array of times (shape (N, 2n))."""
    scalar = np.ndim(t) == 0
    C, S = _trig_tables(z.m, z.tau, t)
    J = standard_j(z.n)
    vals = C @ z.coeffs + S @ (z.coeffs @ J.T)
    return vals[0] if scalar else vals


def derivative(z: FourierLoop) -> FourierLoop:
    """Spectral derivative: mode j maps to (2 j pi / tau) J a_j."""
    J = standard_j(z.n)
    w = galerkin.modes(z.m)[:, None] * (TWO_PI / z.tau)
    return FourierLoop(z.tau, w * (z.coeffs @ J.T))


def node_times(N: int, tau: float) -> np.ndarray:
    return np.arange(N) * (tau / N)


def project(values: np.ndarray, m: int, tau: float) -> np.ndarray:
    """Coefficients c_j = int_0^tau exp(-2 j pi t/tau J) f(t) dt by trapezoid on N uniform nodes.

    These are the components of the functional w -> int f . w in the E_m basis.
    """
    N, d = values.shape
    C, S = _node_tables(m, tau, N)
    J = standard_j(d // 2)
    w = tau / N
    return w * (C.T @ values - S.T @ (values @ J.T))


def e_inner(z1: FourierLoop, z2: FourierLoop) -> float:
    a, b = _aligned(z1, z2)
    m = (a.shape[0] - 1) // 2
    w = z1.tau * np.maximum(np.abs(galerkin.modes(m)), 1)
    return float(np.sum(w * np.sum(a * b, axis=1)))


def e_norm(z: FourierLoop) -> float:
    return float(np.sqrt(e_inner(z, z)))


def l2_norm(z: FourierLoop) -> float:
    return float(np.sqrt(z.tau * np.sum(z.coeffs ** 2)))


def a_form(z1: FourierLoop, z2: FourierLoop) -> float:
    """<A z1, z2> = int -J z1' . z2 dt = 2 pi sum_j j a_j . b_j."""
    a, b = _aligned(z1, z2)
    m = (a.shape[0] - 1) // 2
    return float(TWO_PI * np.sum(galerkin.modes(m) * np.sum(a * b, axis=1)))


def b_form(B: CoefficientPath, z1: FourierLoop, z2: FourierLoop, nodes: int | None = None) -> float:
    """int_0^tau B(t) z1(t) . z2(t) dt via the Galerkin B-matrix (node doubling checked)."""
    a, b = _aligned(z1, z2)
    m = (a.shape[0] - 1) // 2
    Bm = galerkin.b_matrix(B, m, z1.tau, nodes)
    return float(a.ravel() @ Bm @ b.ravel())


def _n_nodes(z: FourierLoop, nodes: int | None) -> int:
    return galerkin.quadrature_nodes(z.m, nodes)


NONLINEAR_TOL = 1e-10
MAX_DOUBLINGS = 6


def _adaptive(evaluate, z: FourierLoop, nodes: int | None):
    """Evaluate a nonlinear quadrature, doubling nodes until successive values agree."""
    if nodes is not None:
        return evaluate(_n_nodes(z, nodes))
    N = _n_nodes(z, None)
    prev = evaluate(N)
    change = float("inf")
    for _ in range(MAX_DOUBLINGS):
        N *= 2
        cur = evaluate(N)
        change = float(np.max(np.abs(np.asarray(cur) - np.asarray(prev))))
        if change <= NONLINEAR_TOL * max(1.0, float(np.max(np.abs(cur)))):
            return cur
        prev = cur
    raise QuadratureError(f"nonlinear quadrature did not converge (last change {change:.3e} at {N} nodes)")


def _check_alpha(model, z: FourierLoop, alpha: float) -> None:
    """alpha > 0, and for a T-periodic model alpha * tau must be a multiple of T."""
    if alpha <= 0:
        raise InvalidArgumentError("alpha must be positive")
    T = getattr(model, "period", None)
    if T is not None:
        k = alpha * z.tau / T
        if round(k) < 1 or abs(k - round(k)) > 1e-9 * max(1.0, k):
            raise InvalidArgumentError(f"alpha * tau = {alpha * z.tau:.12g} is not a multiple of the model period {T:.12g}")


def action(model, z: FourierLoop, alpha: float, nodes: int | None = None) -> float:
    _check_alpha(model, z, alpha)

    def evaluate(N):
        t = node_times(N, z.tau)
        return float(alpha * np.sum(model.evaluate_H(alpha * t, _evaluate_nodes(z, N))) * (z.tau / N))

    return _adaptive(evaluate, z, nodes) - 0.5 * a_form(z, z)


def derivative_vector(model, z: FourierLoop, alpha: float, nodes: int | None = None) -> np.ndarray:
    """Coefficient-space derivative dG_alpha(z)[e_{j,r}] as a flat vector."""
    _check_alpha(model, z, alpha)

    def evaluate(N):
        t = node_times(N, z.tau)
        return alpha * project(model.evaluate_grad(alpha * t, _evaluate_nodes(z, N)), z.m, z.tau)

    c = _adaptive(evaluate, z, nodes) - TWO_PI * galerkin.modes(z.m)[:, None] * z.coeffs
    return c.ravel()


def gradient(model, z: FourierLoop, alpha: float, nodes: int | None = None) -> FourierLoop:
    """Riesz representative of dG_alpha(z) in the E inner product."""
    c = derivative_vector(model, z, alpha, nodes)
    W = galerkin.gram_weights(z.m, z.n, z.tau)
    return FourierLoop.from_vector(c / W, z.m, z.n, z.tau)


def hessian_coefficient(model, z: FourierLoop, alpha: float) -> CoefficientPath:
    """t -> alpha H''_zz(alpha t, z(t)), the linearization along z."""
    _check_alpha(model, z, alpha)

    def f(t):
        t = np.asarray(t, dtype=float)
        return alpha * model.evaluate_hess(alpha * t, evaluate(z, t))

    return CoefficientPath(f, z.tau, z.n, vectorized=True)


def hessian(model, z: FourierLoop, alpha: float, nodes: int | None = None) -> GalerkinForm:
    """Second variation of G_alpha on E_m: alpha b_form(H'') - a_form."""
    Bm = galerkin.b_matrix(hessian_coefficient(model, z, alpha), z.m, z.tau, nodes)
    F = Bm - np.diag(galerkin.a_matrix_diagonal(z.m, z.n))
    return GalerkinForm(z.m, z.n, z.tau, F, galerkin.gram_weights(z.m, z.n, z.tau))


def rho_exponents(varrho: float, sigma: float, omega: float):
    """(omega~, sigma~) = (varrho omega, varrho sigma) / (sigma + omega)."""
    if sigma <= 0 or omega <= 0:
        raise InvalidArgumentError("sigma and omega must be positive")
    w_t = varrho * omega / (sigma + omega)
    s_t = varrho * sigma / (sigma + omega)
    if w_t < 1 or s_t < 1:
        raise InvalidArgumentError(f"need varrho*omega/(sigma+omega) >= 1 and varrho*sigma/(sigma+omega) >= 1, "
                                   f"got {w_t:.6g}, {s_t:.6g}")
    return w_t, s_t


def b_rho_scale(z: FourierLoop, rho: float, varrho: float, sigma: float, omega: float) -> FourierLoop:
    """Pointwise map (p, q) -> (rho^(omega~ - 1) p, rho^(sigma~ - 1) q) in Fourier coordinates.

    D = diag(a I, b I) does not commute with J when a != b, so mode j feeds
    mode j with (a + b)/2 and mode -j with (a - b)/2 diag(I, -I).
    """
    if rho <= 0:
        raise InvalidArgumentError("rho must be positive")
    w_t, s_t = rho_exponents(varrho, sigma, omega)
    a = rho ** (w_t - 1.0)
    b = rho ** (s_t - 1.0)
    n, m = z.n, z.m
    K = np.concatenate([np.ones(n), -np.ones(n)])
    c = z.coeffs
    out = 0.5 * (a + b) * c + 0.5 * (a - b) * (c[::-1] * K)
    D = np.concatenate([np.full(n, a), np.full(n, b)])
    out[m] = D * c[m]
    return FourierLoop(z.tau, out)


def phase_rotate(z: FourierLoop, theta: float) -> FourierLoop:
    """Loop t -> z(t + theta tau / 2 pi), i.e. mode j rotated by exp(j theta J)."""
    ang = galerkin.modes(z.m)[:, None] * theta
    J = standard_j(z.n)
    return FourierLoop(z.tau, np.cos(ang) * z.coeffs + np.sin(ang) * (z.coeffs @ J.T))
