"""Maslov-type index pair (i, nu) by Galerkin inertia counting.

For a tau-periodic symmetric B(t) the truncated form A - B on E_m satisfies,
for m large and a small spectral gap d,

    #eig <= -d  =  dim E_m / 2 + i,      #eig in (-d, d)  =  nu,

where dim E_m = (2m + 1) 2n.  ``maslov_index`` escalates m until the pair is
stable and the nullity agrees with dim ker(gamma(tau) - I).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import galerkin
from .errors import InvalidArgumentError, NonConvergenceError
from .flow import fundamental_solution, monodromy
from .galerkin import ZERO_EIG, GalerkinForm
from .symplectic import CoefficientPath, constant_path, half_dim

MAX_LEVEL = 256
NULLITY_TOL = 1e-8


@dataclass(frozen=True)
class IndexPair:
    i: int
    nu: int

    def __iter__(self):
        yield self.i
        yield self.nu

    def as_dict(self):
        return {"i": self.i, "nu": self.nu}


@dataclass
class IndexReport:
    """Stabilized pair plus the escalation evidence behind it."""

    pair: IndexPair
    levels: list
    monodromy_nullity: int
    monodromy: np.ndarray
    gap: float

    def as_dict(self):
        return {
            "i": self.pair.i,
            "nu": self.pair.nu,
            "monodromy_nullity": self.monodromy_nullity,
            "levels": self.levels,
            "gap": self.gap,
            "stabilization_policy": "pair equal on two consecutive levels and nu equal to monodromy nullity",
        }


def monodromy_nullity(M: np.ndarray, tol: float = NULLITY_TOL, cluster: float = 0.1) -> int:
    """dim ker(M - I), measured on the invariant subspace of eigenvalues near 1.

    A hyperbolic monodromy can have |M| of order 1e9, which drowns an O(1)
    singular value of M - I under a threshold relative to |M|.  The ordered
    Schur form isolates the eigenvalues within ``cluster`` of 1; restricted
    to their invariant subspace the operator is well scaled, and the count is
    ``kernel_dimension`` of that block minus the identity.
    """
    from scipy.linalg import schur

    M = np.asarray(M, dtype=float)
    T, _, sdim = schur(M.astype(complex), output="complex", sort=lambda x: abs(x - 1) < cluster)
    if sdim == 0:
        return 0
    block = T[:sdim, :sdim] - np.eye(sdim)
    s = np.linalg.svd(block, compute_uv=False)
    return int(np.count_nonzero(s <= tol * max(float(s[0]), 1.0)))


def assemble_galerkin_form(B: CoefficientPath, tau: float | None = None, m: int = 32,
                           nodes: int | None = None) -> GalerkinForm:
    """Form of A - B on E_m (A part exact, B part by periodic quadrature)."""
    if m < 1:
        raise InvalidArgumentError("level m must be >= 1")
    tau = B.period if tau is None else float(tau)
    Bm = galerkin.b_matrix(B, m, tau, nodes)
    F = np.diag(galerkin.a_matrix_diagonal(m, B.n)) - Bm
    return GalerkinForm(m, B.n, tau, F, galerkin.gram_weights(m, B.n, tau))


def index_counts(form: GalerkinForm, d: float | None = None) -> tuple[int, int, int]:
    """(dimPlus, dimMinus, dimZero) of the generalized spectrum of (F, W).

    With ``d`` omitted, eigenvalues with |lambda| <= 1e-7 are null and the rest
    are split by sign, which is the window count at d = half the smallest
    nonzero |lambda|.
    """
    eigs = form.eigenvalues()
    if d is None:
        zero = int(np.count_nonzero(np.abs(eigs) <= ZERO_EIG))
        plus = int(np.count_nonzero(eigs > ZERO_EIG))
        return plus, len(eigs) - plus - zero, zero
    if d <= 0:
        raise InvalidArgumentError("gap d must be positive")
    return galerkin.inertia(eigs, d)


def pair_from_counts(counts, level: int, n: int) -> IndexPair:
    _, minus, zero = counts
    return IndexPair(minus - (2 * level + 1) * n, zero)


def maslov_index_galerkin(B: CoefficientPath, tau: float | None = None, m: int = 32,
                          d: float | None = None) -> IndexPair:
    form = assemble_galerkin_form(B, tau, m)
    return pair_from_counts(index_counts(form, d), m, B.n)


def starting_level(B: CoefficientPath, tau: float) -> int:
    """Smallest level of the escalation ladder 8, 16, 32, ... worth trying.

    Modes |j| well above tau sup|B| / 2 pi are dominated by A, so the count is
    only meaningful once the truncation reaches past that frequency.
    """
    bound = B.bound if B.bound is not None else B.sup_norm()
    scale = tau * bound / (2 * np.pi)
    level = 8
    while level < 2 * scale + 4:
        level *= 2
    return level


def maslov_index_report(B: CoefficientPath, tau: float | None = None, max_level: int = MAX_LEVEL,
                        start: int | None = None, monodromy_matrix=None) -> IndexReport:
    """Escalate the Galerkin level until the pair is certified.

    ``monodromy_matrix`` may carry a precomputed gamma(tau), e.g. the power
    gamma(tau0)^k when tau is a multiple of the coefficient's own period.
    """
    tau = B.period if tau is None else float(tau)
    if monodromy_matrix is None:
        M = monodromy(fundamental_solution(B.with_period(tau), tau))
    else:
        M = np.asarray(monodromy_matrix, dtype=float)
    mono_nu = monodromy_nullity(M, NULLITY_TOL)
    level = start or starting_level(B, tau)
    history = []
    prev = None
    while level <= max_level:
        form = assemble_galerkin_form(B, tau, level)
        eigs = form.eigenvalues()
        pair = pair_from_counts(index_counts(form), level, B.n)
        small = np.sort(np.abs(eigs))[: 2 * B.n + 2]
        history.append({"level": level, "i": pair.i, "nu": pair.nu,
                        "smallest_abs_eigs": [float(x) for x in small]})
        if prev is not None and pair == prev and pair.nu == mono_nu:
            return IndexReport(pair, history, mono_nu, M, galerkin.select_gap(eigs))
        prev = pair
        level *= 2
    raise NonConvergenceError(
        f"index pair did not stabilize by level {max_level}",
        {"levels": history, "monodromy_nullity": mono_nu},
    )


def maslov_index(B: CoefficientPath, tau: float | None = None, max_level: int = MAX_LEVEL) -> IndexPair:
    return maslov_index_report(B, tau, max_level).pair


def constant_block_oracle(B, tau: float = 2 * np.pi, m: int = 32) -> IndexPair:
    """Exact index of a constant coefficient by per-frequency block inertia.

    Works in the real cos/sin basis: the constant block is -tau B with Gram
    tau, and frequency j >= 1 contributes the 4n x 4n block on
    cos(2 j pi t / tau) u + sin(2 j pi t / tau) v with Gram tau j / 2.
    """
    B = np.asarray(B, dtype=float)
    n = half_dim(B)
    B = 0.5 * (B + B.T)
    from .symplectic import standard_j

    J = standard_j(n)
    Z = np.zeros_like(J)
    minus = zero = 0

    def count(block, gram):
        nonlocal minus, zero
        lam = np.linalg.eigvalsh(block / gram)
        zero += int(np.count_nonzero(np.abs(lam) <= ZERO_EIG))
        minus += int(np.count_nonzero(lam < -ZERO_EIG))

    count(-tau * B, tau)
    for j in range(1, m + 1):
        a_part = j * math.pi * np.block([[Z, -J], [J, Z]])
        b_part = 0.5 * tau * np.block([[B, Z], [Z, B]])
        count(a_part - b_part, 0.5 * tau * j)
    return IndexPair(minus - (2 * m + 1) * n, zero)


def constant_index(B, tau: float = 2 * np.pi) -> IndexPair:
    """Convenience wrapper: maslov_index of a constant matrix."""
    return maslov_index(constant_path(B, tau))
