"""Iteration inequalities, phase shifts and geometric distinctness of periodic loops."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import galerkin
from .errors import InvalidArgumentError
from .flow import fundamental_solution, monodromy
from .index import IndexPair, maslov_index_report
from .loops import FourierLoop, l2_norm, phase_rotate
from .symplectic import CoefficientPath, standard_j

DISTINCT_TOL = 1e-4


def _period_multiple(z: FourierLoop, tau: float) -> int:
    k = z.tau / tau
    kr = round(k)
    if kr < 1 or abs(k - kr) > 1e-9 * max(1.0, k):
        raise InvalidArgumentError(f"loop period {z.tau} is not a positive integer multiple of {tau}")
    return int(kr)


def phase_shift(z: FourierLoop, j: int, tau: float) -> FourierLoop:
    """The loop t -> z(t + j tau) for z of period k tau."""
    k = _period_multiple(z, tau)
    return phase_rotate(z, 2 * math.pi * (j % k) / k)


def extend_period(z: FourierLoop, factor: int) -> FourierLoop:
    """Same function viewed on period factor * tau: mode l becomes mode l * factor."""
    if int(factor) != factor or factor < 1:
        raise InvalidArgumentError("extension factor must be a positive integer")
    factor = int(factor)
    if factor == 1:
        return z
    m = z.m * factor
    out = np.zeros((2 * m + 1, 2 * z.n))
    out[m + factor * galerkin.modes(z.m)] = z.coeffs
    return FourierLoop(z.tau * factor, out)


@dataclass
class IterationRow:
    m: int
    i: int
    nu: int
    prop2_lower: int
    prop2_upper: int
    prop3_lower: int
    prop3_upper: int
    holds: bool
    sharper: bool

    def as_dict(self):
        return dict(self.__dict__)


@dataclass
class IterationReport:
    base: IndexPair
    n: int
    rows: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(r.holds for r in self.rows)

    @property
    def sharper(self) -> bool:
        return all(r.sharper for r in self.rows)

    def prop5_violations(self) -> list:
        """Rows with m > 1 where i_m <= n+1, i >= n and nu >= 1 (which would contradict m = 1)."""
        i, nu = self.base
        if not (i >= self.n and nu >= 1):
            return []
        return [r.m for r in self.rows if r.m > 1 and r.i <= self.n + 1]

    def as_dict(self):
        return {"base": self.base.as_dict(), "n": self.n, "holds": self.holds, "sharper": self.sharper,
                "prop5_violations": self.prop5_violations(), "rows": [r.as_dict() for r in self.rows]}


def iteration_bounds(base: IndexPair, n: int, m: int, nu_m: int) -> tuple[int, int, int, int]:
    """(prop2_lower, prop2_upper, prop3_lower, prop3_upper) for the m-th iterate."""
    i, nu = base
    return (m * (i + nu - n) - n,
            m * (i + n) + n - nu_m,
            m * (i + nu - n) + n - nu,
            m * (i + n) - n - (nu_m - nu))


def check_iteration_inequalities(B: CoefficientPath, tau: float | None = None, m_max: int = 5,
                                 max_level: int = 256) -> IterationReport:
    """Index pairs of the iterates m = 1..m_max and both inequality chains.

    The monodromy of the m-fold period is taken as gamma(tau)^m, the endpoint
    of the iterated path.
    """
    if m_max < 1:
        raise InvalidArgumentError("m_max must be >= 1")
    tau = B.period if tau is None else float(tau)
    M = monodromy(fundamental_solution(B.with_period(tau), tau))
    base_report = maslov_index_report(B, tau, max_level, monodromy_matrix=M)
    report = IterationReport(base_report.pair, B.n)
    power = np.eye(2 * B.n)
    for m in range(1, m_max + 1):
        power = power @ M
        if m == 1:
            pair = base_report.pair
        else:
            pair = maslov_index_report(B.with_period(m * tau), m * tau, max_level, monodromy_matrix=power).pair
        l2, u2, l3, u3 = iteration_bounds(base_report.pair, B.n, m, pair.nu)
        holds = l2 <= pair.i <= u2 and l3 <= pair.i <= u3
        report.rows.append(IterationRow(m, pair.i, pair.nu, l2, u2, l3, u3, holds, l3 >= l2 and u3 <= u2))
    return report


@dataclass
class DistinctnessResult:
    distinct: bool
    min_distance: float
    shift: int
    common_multiple: int
    continuous_min_distance: float
    continuous_shift: float

    def __bool__(self):
        return self.distinct

    def as_dict(self):
        return {"distinct": self.distinct, "min_distance": self.min_distance, "shift": self.shift,
                "common_multiple": self.common_multiple,
                "continuous_min_distance": self.continuous_min_distance,
                "continuous_shift": self.continuous_shift,
                "note": "continuous-shift minimum is informational; distinctness uses integer shifts only"}


def distinctness(z1: FourierLoop, z2: FourierLoop, tau: float, tol: float = DISTINCT_TOL) -> DistinctnessResult:
    """Minimum normalized L2 distance between integer phase shifts of z1 and z2.

    Both loops are extended to the common period lcm(k1, k2) tau.  The shift
    j in 0..lcm-1 acts on z1; the witness is the minimizing shift.
    """
    if z1.n != z2.n:
        raise InvalidArgumentError("loops live in different phase spaces")
    if tol <= 0:
        raise InvalidArgumentError("tol must be positive")
    k1, k2 = _period_multiple(z1, tau), _period_multiple(z2, tau)
    L = math.lcm(k1, k2)
    e1, e2 = extend_period(z1, L // k1), extend_period(z2, L // k2)
    m = max(e1.m, e2.m)
    e1, e2 = e1.with_level(m), e2.with_level(m)
    e1 = FourierLoop(e2.tau, e1.coeffs)
    scale = max(l2_norm(e1), l2_norm(e2), 1.0)
    # |R(theta) e1 - e2|^2 = |e1|^2 + |e2|^2 - 2 tau sum_l [cos(l theta) a_l.b_l + sin(l theta) J a_l.b_l]
    J = standard_j(z1.n)
    ls = galerkin.modes(m)
    dots = np.sum(e1.coeffs * e2.coeffs, axis=1)
    cross = np.sum((e1.coeffs @ J.T) * e2.coeffs, axis=1)
    base = l2_norm(e1) ** 2 + l2_norm(e2) ** 2

    def dist_many(thetas):
        ang = np.outer(thetas, ls)
        sq = base - 2 * e2.tau * (np.cos(ang) @ dots + np.sin(ang) @ cross)
        return np.sqrt(np.maximum(sq, 0.0)) / scale

    def dist(theta):
        return l2_norm(phase_rotate(e1, theta) - e2) / scale

    d_int = [dist(2 * math.pi * j / L) for j in range(L)]
    j_best = int(np.argmin(d_int))

    grid = np.linspace(0, 2 * math.pi, 4097)[:-1]
    vals = dist_many(grid)
    k = int(np.argmin(vals))
    h = grid[1] - grid[0]
    res = minimize_scalar(dist, bounds=(grid[k] - h, grid[k] + h), method="bounded",
                          options={"xatol": 1e-12})
    cont_theta, cont_val = (float(res.x) % (2 * math.pi), float(res.fun)) if res.fun < vals[k] else (grid[k], vals[k])
    cont_val = min(cont_val, d_int[j_best])
    return DistinctnessResult(bool(d_int[j_best] > tol), float(d_int[j_best]), j_best, L,
                              float(cont_val), float(cont_theta * L / (2 * math.pi)))


def distinctness_bound(pair: IndexPair, n: int) -> int | None:
    """Least integer l with l > 2n / (i + nu - n), or None when i + nu <= n."""
    i, nu = pair
    excess = i + nu - n
    if excess <= 0:
        return None
    return (2 * n) // excess + 1
