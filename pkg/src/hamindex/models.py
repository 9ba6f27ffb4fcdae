"""Hamiltonian models and numeric certificates for the structural hypotheses.

Models evaluate vectorized: ``t`` has shape (N,), ``Z`` has shape (N, 2n);
H returns (N,), the gradient (N, 2n) and the Hessian (N, 2n, 2n).  A model
with ``period=None`` is autonomous.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import EvaluationError, InvalidArgumentError
from .symplectic import CoefficientPath, constant_path

GOLDEN = (1 + math.sqrt(5)) / 2
PARAM_KEYS = ("sigma", "omega", "mu", "upsilon", "beta", "lambda", "b0", "c1", "c2", "c3", "varrho")


@dataclass(frozen=True)
class HamiltonianModel:
    name: str
    n: int
    H: Callable
    grad: Callable
    hess: Callable
    period: float | None = None
    params: dict = field(default_factory=dict)
    test_only: bool = False
    bhat: CoefficientPath | None = None

    def __post_init__(self):
        p = self.params
        if "mu" in p and "upsilon" in p and abs(1 / p["mu"] + 1 / p["upsilon"] - 1) > 1e-12:
            raise InvalidArgumentError("declared mu, upsilon must satisfy 1/mu + 1/upsilon = 1")
        if not self.test_only:
            beta = p.get("beta")
            lam = p.get("lambda")
            if beta is not None and not 1 < beta < 2:
                raise InvalidArgumentError(f"beta must lie in (1, 2), got {beta}")
            if lam is not None and beta is not None and not 1 <= lam < beta ** 2 / (beta + 1):
                raise InvalidArgumentError(f"lambda must lie in [1, beta^2/(beta+1)) = [1, {beta**2/(beta+1):.6g})")

    @property
    def autonomous(self) -> bool:
        return self.period is None

    def _check(self, vals, t, what):
        if not np.all(np.isfinite(vals)):
            flat = np.asarray(vals).reshape(len(t), -1)
            bad = int(np.argwhere(~np.all(np.isfinite(flat), axis=1))[0, 0])
            raise EvaluationError(f"{self.name}: non-finite {what}", t=float(t[bad]))
        return vals

    def evaluate_H(self, t, Z):
        t, Z = _prep(t, Z)
        return self._check(np.asarray(self.H(t, Z), dtype=float).reshape(len(t)), t, "H")

    def evaluate_grad(self, t, Z):
        t, Z = _prep(t, Z)
        return self._check(np.asarray(self.grad(t, Z), dtype=float).reshape(Z.shape), t, "gradient")

    def evaluate_hess(self, t, Z):
        t, Z = _prep(t, Z)
        d = Z.shape[1]
        return self._check(np.asarray(self.hess(t, Z), dtype=float).reshape(len(t), d, d), t, "Hessian")


def _prep(t, Z):
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    t = np.broadcast_to(np.asarray(t, dtype=float), (Z.shape[0],)).copy()
    return t, Z


def _radial(n, phi, dphi, ddphi):
    """Evaluators of H(z) = phi(|z|^2): H' = 2 phi' z, H'' = 2 phi' I + 4 phi'' z z^T."""

    def H(t, Z):
        return phi(np.sum(Z * Z, axis=1))

    def grad(t, Z):
        return 2 * dphi(np.sum(Z * Z, axis=1))[:, None] * Z

    def hess(t, Z):
        s = np.sum(Z * Z, axis=1)
        return (2 * dphi(s)[:, None, None] * np.eye(2 * n)
                + 4 * ddphi(s)[:, None, None] * Z[:, :, None] * Z[:, None, :])

    return H, grad, hess


def soft_power_model(n: int = 1, beta: float = 1.75) -> HamiltonianModel:
    """H(z) = (1 + |z|^2)^(beta/2) - 1, autonomous and strictly convex.

    Nontrivial periodic orbits are circles z(t) = exp(2 phi'(r^2) t J) z0 with
    |z0| = r and period pi / phi'(r^2), phi(s) = (1 + s)^(beta/2) - 1.
    """
    if not GOLDEN < beta < 2:
        raise InvalidArgumentError(f"soft-power exponent must lie in (golden ratio, 2), got {beta}")
    e = beta / 2
    H, grad, hess = _radial(
        n,
        lambda s: (1 + s) ** e - 1,
        lambda s: e * (1 + s) ** (e - 1),
        lambda s: e * (e - 1) * (1 + s) ** (e - 2),
    )
    params = {"sigma": 1.0, "omega": 1.0, "mu": 2.0, "upsilon": 2.0, "beta": beta, "lambda": 1.0,
              "b0": beta, "c1": 1.0, "c2": (1 - beta / 2) / 2, "c3": 1.0, "varrho": 10.0}
    return HamiltonianModel(f"soft_power(n={n}, beta={beta})", n, H, grad, hess, None, params)


def soft_power_orbit_period(r: float, beta: float = 1.75) -> float:
    """Period pi / phi'(r^2) of the circular orbit of radius r."""
    return math.pi / ((beta / 2) * (1 + r * r) ** (beta / 2 - 1))


def soft_power_radius(T: float, beta: float = 1.75, j: int = 1) -> float:
    """Radius of the circle travelled j times in time T (scalar root find)."""
    from scipy.optimize import brentq

    target = T / j
    if target <= soft_power_orbit_period(0.0, beta):
        raise InvalidArgumentError(f"no circular orbit of period {target}")
    hi = 1.0
    while soft_power_orbit_period(hi, beta) < target:
        hi *= 2
    return brentq(lambda r: soft_power_orbit_period(r, beta) - target, 0.0, hi, xtol=1e-15, rtol=1e-15)


def quadratic_model(n: int = 1, b: float = 1.0) -> HamiltonianModel:
    """H = b |z|^2 / 2.  Violates the subquadratic growth hypothesis; test use only."""
    H, grad, hess = _radial(n, lambda s: 0.5 * b * s, lambda s: 0.5 * b + 0 * s, lambda s: 0 * s)
    params = {"sigma": 1.0, "omega": 1.0, "mu": 2.0, "upsilon": 2.0}
    return HamiltonianModel(f"quadratic(n={n}, b={b})", n, H, grad, hess, None, params, test_only=True)


def anisotropic_model(n: int = 1, sigma: float = 1.0, omega: float = 1.0, beta: float = 1.75,
                      varrho: float | None = None) -> HamiltonianModel:
    """H = (1 + |p|^2)^(beta/2) + (1 + |q|^2)^(beta/2) - 2.

    The growth ratio against |p|^(1 + sigma/omega) + |q|^(1 + omega/sigma)
    vanishes at infinity when beta < min(1 + sigma/omega, 1 + omega/sigma);
    the declared mu = 1 + sigma/omega, upsilon = 1 + omega/sigma.  The
    scaling exponent varrho is recorded only when given.
    """
    if sigma <= 0 or omega <= 0:
        raise InvalidArgumentError("sigma and omega must be positive")
    if not beta < min(1 + sigma / omega, 1 + omega / sigma):
        raise InvalidArgumentError("beta must be below min(1 + sigma/omega, 1 + omega/sigma)")
    if not GOLDEN < beta < 2:
        raise InvalidArgumentError(f"beta must lie in (golden ratio, 2), got {beta}")
    e = beta / 2

    def parts(Z):
        return Z[:, :n], Z[:, n:]

    def H(t, Z):
        p, q = parts(Z)
        return (1 + np.sum(p * p, 1)) ** e + (1 + np.sum(q * q, 1)) ** e - 2

    def grad(t, Z):
        p, q = parts(Z)
        gp = 2 * e * (1 + np.sum(p * p, 1))[:, None] ** (e - 1) * p
        gq = 2 * e * (1 + np.sum(q * q, 1))[:, None] ** (e - 1) * q
        return np.concatenate([gp, gq], axis=1)

    def hess(t, Z):
        out = np.zeros((len(Z), 2 * n, 2 * n))
        for sl, x in ((slice(0, n), Z[:, :n]), (slice(n, 2 * n), Z[:, n:])):
            s = np.sum(x * x, 1)
            out[:, sl, sl] = (2 * e * (1 + s)[:, None, None] ** (e - 1) * np.eye(n)
                              + 4 * e * (e - 1) * (1 + s)[:, None, None] ** (e - 2) * x[:, :, None] * x[:, None, :])
        return out

    mu = 1 + sigma / omega
    ups = 1 + omega / sigma
    bmin = min(mu, ups)
    params = {"sigma": sigma, "omega": omega, "mu": mu, "upsilon": ups, "beta": beta, "lambda": 1.0,
              "b0": beta, "c1": 1.0, "c2": (1 - beta / bmin) / 4, "c3": 2.0}
    if varrho is not None:
        params["varrho"] = float(varrho)
    return HamiltonianModel(f"anisotropic(n={n}, sigma={sigma}, omega={omega}, beta={beta})",
                            n, H, grad, hess, None, params)


def nonautonomous_model(base: HamiltonianModel, a: Callable, period: float,
                        a_bounds: tuple[float, float] | None = None) -> HamiltonianModel:
    """H(t, z) = a(t) H_base(z) with a > 0 smooth and T-periodic.

    With a_bounds = (a_min, a_max) the base constants are rescaled so the
    declared inequalities stay valid.
    """
    if period <= 0:
        raise InvalidArgumentError("period must be positive")
    ts = np.linspace(0, period, 257)
    vals = np.asarray(a(ts), dtype=float)
    if np.any(vals <= 0):
        raise InvalidArgumentError("modulation a(t) must be positive")
    lo, hi = a_bounds if a_bounds else (float(vals.min()), float(vals.max()))

    def H(t, Z):
        return np.asarray(a(t)) * base.H(t, Z)

    def grad(t, Z):
        return np.asarray(a(t))[:, None] * base.grad(t, Z)

    def hess(t, Z):
        return np.asarray(a(t))[:, None, None] * base.hess(t, Z)

    params = dict(base.params)
    for key in ("b0", "c1", "c3"):
        if key in params:
            params[key] = params[key] * hi
    if "c2" in params:
        params["c2"] = params["c2"] * lo
    return HamiltonianModel(f"modulated[{base.name}]", base.n, H, grad, hess, period, params, base.test_only)


def quadratic_plus_model(bhat: CoefficientPath, base: HamiltonianModel) -> HamiltonianModel:
    """H(t, z) = 1/2 (Bhat(t) z, z) + H_base(t, z); records w = max_t |Bhat(t)|."""
    if bhat.n != base.n:
        raise InvalidArgumentError("Bhat dimension does not match the base model")
    if base.period is not None and abs(bhat.period - base.period) > 1e-12 * bhat.period:
        raise InvalidArgumentError("Bhat and base model periods differ")

    def H(t, Z):
        Bt = bhat.sample(t)
        return 0.5 * np.einsum("ki,kij,kj->k", Z, Bt, Z) + base.H(t, Z)

    def grad(t, Z):
        return np.einsum("kij,kj->ki", bhat.sample(t), Z) + base.grad(t, Z)

    def hess(t, Z):
        return bhat.sample(t) + base.hess(t, Z)

    params = dict(base.params)
    params["w"] = bhat.sup_norm(256)
    return HamiltonianModel(f"quadratic_plus[{base.name}]", base.n, H, grad, hess, bhat.period, params,
                            base.test_only, bhat)


# --------------------------------------------------------------------------- expressions

_ALLOWED_FUNCS = {"sin", "cos", "tan", "exp", "log", "sqrt", "Abs", "abs", "tanh", "cosh", "sinh"}
_ALLOWED_NODES = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name, ast.Load, ast.Constant,
                  ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd)


def _validate_expression(text: str, symbols: set[str]) -> None:
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise InvalidArgumentError(f"cannot parse expression {text!r}: {exc}") from None
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise InvalidArgumentError(f"disallowed syntax {type(node).__name__} in {text!r}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise InvalidArgumentError(f"only numeric constants are allowed in {text!r}")
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _ALLOWED_FUNCS or node.keywords:
                raise InvalidArgumentError(f"disallowed call in {text!r}")
        if isinstance(node, ast.Name) and node.id not in symbols | _ALLOWED_FUNCS | {"pi"}:
            raise InvalidArgumentError(f"unknown symbol {node.id!r} in {text!r}")


def _sympify(text: str, symbols: dict):
    import sympy

    _validate_expression(text, set(symbols))
    local = dict(symbols)
    local.update({name: getattr(sympy, "Abs" if name == "abs" else name) for name in _ALLOWED_FUNCS})
    local["pi"] = sympy.pi
    return sympy.sympify(text, locals=local)


def expression_model(expression: str, n: int, period: float | None = None, params: dict | None = None,
                     name: str | None = None) -> HamiltonianModel:
    """Model from an expression in t, p1..pn, q1..qn (derivatives taken symbolically)."""
    import sympy

    names = [f"p{i}" for i in range(1, n + 1)] + [f"q{i}" for i in range(1, n + 1)]
    syms = {s: sympy.Symbol(s, real=True) for s in names + ["t"]}
    expr = _sympify(expression, syms)
    zs = [syms[s] for s in names]
    grad_exprs = [sympy.diff(expr, z) for z in zs]
    hess_exprs = [[sympy.diff(g, z) for z in zs] for g in grad_exprs]
    args = [syms["t"]] + zs
    fH = sympy.lambdify(args, expr, "numpy")
    fG = [sympy.lambdify(args, g, "numpy") for g in grad_exprs]
    fHH = [[sympy.lambdify(args, h, "numpy") for h in row] for row in hess_exprs]

    def call(f, t, Z):
        return np.broadcast_to(np.asarray(f(t, *Z.T), dtype=float), (len(t),))

    def H(t, Z):
        return call(fH, t, Z)

    def grad(t, Z):
        return np.stack([call(f, t, Z) for f in fG], axis=1)

    def hess(t, Z):
        return np.stack([np.stack([call(f, t, Z) for f in row], axis=1) for row in fHH], axis=1)

    return HamiltonianModel(name or f"expression({expression})", n, H, grad, hess, period, dict(params or {}))


def expression_path(entries, period: float) -> CoefficientPath:
    """Coefficient path from a square matrix of expression strings in t."""
    import sympy

    rows = [list(r) for r in entries]
    d = len(rows)
    if d % 2 or any(len(r) != d for r in rows):
        raise InvalidArgumentError("coefficient expression matrix must be square of even order")
    t = sympy.Symbol("t", real=True)
    funcs = [[sympy.lambdify([t], _sympify(str(e), {"t": t}), "numpy") for e in r] for r in rows]

    def f(ts):
        ts = np.asarray(ts, dtype=float)
        out = np.empty((ts.size, d, d))
        for i in range(d):
            for j in range(d):
                out[:, i, j] = np.broadcast_to(np.asarray(funcs[i][j](ts), dtype=float), ts.shape)
        return out

    return CoefficientPath(f, period, d // 2, vectorized=True)


# --------------------------------------------------------------------------- hypotheses

CERTIFIED = "certified-on-grid"
VIOLATED = "violated"
NOT_APPLICABLE = "not-applicable"


@dataclass
class HypothesisReport:
    model: str
    entries: dict
    grid: dict

    @property
    def all_certified(self) -> bool:
        return all(e["status"] in (CERTIFIED, NOT_APPLICABLE) for e in self.entries.values())

    def as_dict(self):
        return {"model": self.model, "grid": self.grid, "entries": self.entries,
                "all_certified": self.all_certified}


@dataclass(frozen=True)
class Grid:
    """Sampling spec: log-spaced radii up to ``radius``, seeded directions, times over one period."""

    radius: float = 1e3
    r_min: float = 1e-3
    n_radii: int = 61
    n_directions: int = 24
    n_times: int = 16
    seed: int = 0

    def as_dict(self):
        return dict(self.__dict__)


def _directions(n: int, grid: Grid) -> np.ndarray:
    d = 2 * n
    rng = np.random.default_rng(grid.seed)
    dirs = [np.eye(d)[i] for i in range(d)]
    dirs.append(np.ones(d) / math.sqrt(d))
    diag = np.concatenate([np.ones(n), -np.ones(n)]) / math.sqrt(d)
    dirs.append(diag)
    rand = rng.normal(size=(grid.n_directions, d))
    dirs.extend(rand / np.linalg.norm(rand, axis=1, keepdims=True))
    return np.array(dirs)


def _witness(t, z, value, bound, note=""):
    return {"t": float(t), "z": [float(x) for x in z], "value": float(value), "bound": float(bound), "note": note}


def _mu_split(model, t, Z):
    n = model.n
    g = model.evaluate_grad(t, Z)
    mu, ups = model.params.get("mu", 2.0), model.params.get("upsilon", 2.0)
    return np.sum(g[:, :n] * Z[:, :n], 1) / mu + np.sum(g[:, n:] * Z[:, n:], 1) / ups


def verify_hypotheses(model: HamiltonianModel, grid: Grid | None = None) -> HypothesisReport:
    """Evaluate each hypothesis with the model's declared constants on a grid.

    Limit statements are checked as monotone trends over the largest radius
    decades and labeled as such; nothing here is a proof.
    """
    grid = grid or Grid()
    n, P = model.n, model.params
    radii = np.geomspace(grid.r_min, grid.radius, grid.n_radii)
    dirs = _directions(n, grid)
    T = model.period
    times = np.array([0.0]) if T is None else np.arange(grid.n_times) * (T / grid.n_times)
    tt, rr, dd = np.meshgrid(times, radii, np.arange(len(dirs)), indexing="ij")
    t = tt.ravel()
    r = rr.ravel()
    Z = r[:, None] * dirs[dd.ravel()]
    H = model.evaluate_H(t, Z)
    entries = {}

    def record(key, ok_mask, values, bounds, label, note=""):
        if np.all(ok_mask):
            margin = float(np.min(values - bounds)) if values is not None else None
            entries[key] = {"status": CERTIFIED, "check": label, "margin": margin}
        else:
            k = int(np.argmin(np.where(ok_mask, np.inf, values - bounds)))
            entries[key] = {"status": VIOLATED, "check": label,
                            "witness": _witness(t[k], Z[k], values[k], bounds[k], note)}

    # (H1): nonnegativity and sampled periodicity
    ok = H >= -1e-12
    if T is not None:
        H_shift = model.evaluate_H(t + T, Z)
        per = np.abs(H_shift - H) <= 1e-10 * (1 + np.abs(H))
        record("H1", ok & per, np.minimum(H, -np.abs(H_shift - H) + 0 * H), 0 * H,
               "H >= 0 and H(t+T, z) = H(t, z)")
    else:
        record("H1", ok, H, 0 * H, "H >= 0 (autonomous)")

    # (H2): ratio H / (|p|^(1+s/w) + |q|^(1+w/s)) decreasing over the three largest decades
    if "sigma" in P and "omega" in P:
        s, w = P["sigma"], P["omega"]
        dec = np.array([grid.radius / 1e3, grid.radius / 1e2, grid.radius / 10, grid.radius])
        ratios = []
        for R in dec:
            Zr = R * dirs
            worst = -np.inf
            for tv in times:
                tv_arr = np.full(len(dirs), tv)
                Hr = model.evaluate_H(tv_arr, Zr)
                den = (np.linalg.norm(Zr[:, :n], axis=1) ** (1 + s / w)
                       + np.linalg.norm(Zr[:, n:], axis=1) ** (1 + w / s))
                worst = max(worst, float(np.max(Hr / den)))
            ratios.append(worst)
        ratios = np.array(ratios)
        decreasing = np.all(ratios[1:] <= ratios[:-1] * (1 - 1e-3))
        label = "trend, not proof: sup ratio decreasing over the three largest radius decades"
        if decreasing:
            entries["H2"] = {"status": CERTIFIED, "check": label, "ratios": ratios.tolist(),
                             "radii": dec.tolist()}
        else:
            k = int(np.argmax(ratios[1:] > ratios[:-1] * (1 - 1e-3))) + 1
            entries["H2"] = {"status": VIOLATED, "check": label, "ratios": ratios.tolist(), "radii": dec.tolist(),
                             "witness": {"radius": float(dec[k]), "ratio": float(ratios[k]),
                                         "previous_ratio": float(ratios[k - 1])}}
    else:
        entries["H2"] = {"status": NOT_APPLICABLE, "check": "sigma/omega not declared"}

    weighted = _mu_split(model, t, Z)
    if "c1" in P:
        record("H3", weighted >= -P["c1"], weighted, np.full_like(H, -P["c1"]),
               "(1/mu) H_p.p + (1/upsilon) H_q.q >= -c1")
    else:
        entries["H3"] = {"status": NOT_APPLICABLE, "check": "c1 not declared"}

    if {"c2", "c3", "beta"} <= P.keys():
        lhs = H - weighted
        rhs = P["c2"] * r ** P["beta"] - P["c3"]
        record("H4", lhs >= rhs, lhs, rhs, "H - (1/mu) H_p.p - (1/upsilon) H_q.q >= c2 |z|^beta - c3")
    else:
        entries["H4"] = {"status": NOT_APPLICABLE, "check": "c2, c3, beta not declared"}

    hess = model.evaluate_hess(t, Z)
    eig = np.linalg.eigvalsh(0.5 * (hess + hess.transpose(0, 2, 1)))
    if {"b0", "lambda"} <= P.keys():
        hnorm = np.max(np.abs(eig), axis=1)
        bound = P["b0"] * (r ** (P["lambda"] - 1) + 1)
        record("H5", hnorm <= bound, -hnorm, -bound, "|H''| <= b0 (|z|^(lambda-1) + 1)")
    else:
        entries["H5"] = {"status": NOT_APPLICABLE, "check": "b0, lambda not declared"}

    H0 = model.evaluate_H(times, np.zeros((len(times), 2 * n)))
    gnorm = np.linalg.norm(model.evaluate_grad(t, Z), axis=1)
    zero_ok = np.all(np.abs(H0) <= 1e-12)
    if not zero_ok:
        k = int(np.argmax(np.abs(H0)))
        entries["H6"] = {"status": VIOLATED, "check": "H(t, 0) = 0 and |H'(t, z)| > 0 for z != 0",
                         "witness": _witness(times[k], np.zeros(2 * n), H0[k], 0.0, "H(t,0) != 0")}
    else:
        record("H6", gnorm > 0, gnorm, 0 * gnorm, "H(t, 0) = 0 and |H'(t, z)| > 0 for z != 0")

    if model.autonomous:
        off = r > 1e-8
        record("H8", eig[:, 0] > 0 | ~off, eig[:, 0], 0 * r, "min eig H''(z) > 0 off a 1e-8 ball")
    else:
        entries["H8"] = {"status": NOT_APPLICABLE, "check": "autonomous models only"}

    if model.bhat is not None and {"mu", "upsilon"} <= P.keys():
        entries["H7"] = check_h7(model.bhat, P["mu"], P["upsilon"], grid)
    else:
        entries["H7"] = {"status": NOT_APPLICABLE, "check": "no quadratic part"}

    if {"beta", "lambda"} <= P.keys():
        b, lam = P["beta"], P["lambda"]
        entries["parameters"] = {
            "status": CERTIFIED if (1 < b < 2 and 1 <= lam < b * b / (b + 1)) else VIOLATED,
            "check": "beta in (1,2), lambda in [1, beta^2/(beta+1))",
            "beta": b, "lambda": lam, "lambda_limit": b * b / (b + 1),
        }
    return HypothesisReport(model.name, entries, grid.as_dict())


def check_h7(bhat: CoefficientPath, mu: float, upsilon: float, grid: Grid | None = None) -> dict:
    """Residual of (Bz, z) = 2 (Bz, V(1/mu, 1/upsilon) z) on grid points."""
    if abs(1 / mu + 1 / upsilon - 1) > 1e-12:
        raise InvalidArgumentError("need 1/mu + 1/upsilon = 1")
    grid = grid or Grid()
    n = bhat.n
    dirs = _directions(n, grid)
    radii = np.geomspace(grid.r_min, grid.radius, grid.n_radii)
    times = np.arange(grid.n_times) * (bhat.period / grid.n_times)
    V = np.concatenate([np.full(n, 1 / mu), np.full(n, 1 / upsilon)])
    Bt = bhat.sample(times)
    worst = (-np.inf, None)
    for k, tv in enumerate(times):
        Z = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, 2 * n)
        BZ = Z @ Bt[k].T
        lhs = np.sum(BZ * Z, 1)
        rhs = 2 * np.sum(BZ * (Z * V), 1)
        rel = np.abs(lhs - rhs) / (1 + np.sum(Z * Z, 1))
        i = int(np.argmax(rel))
        if rel[i] > worst[0]:
            worst = (float(rel[i]), (tv, Z[i], lhs[i], rhs[i]))
    label = "(Bz, z) = 2 (Bz, V(1/mu, 1/upsilon) z), residual <= 1e-9 (1 + |z|^2)"
    if worst[0] <= 1e-9:
        return {"status": CERTIFIED, "check": label, "max_relative_residual": worst[0]}
    tv, z, lhs, rhs = worst[1]
    return {"status": VIOLATED, "check": label, "max_relative_residual": worst[0],
            "witness": _witness(tv, z, lhs, rhs, "lhs vs rhs")}


def k_range_bound(bhat: CoefficientPath, T: float, samples: int = 256) -> float:
    """floor(2 pi / (w T)) with w the sampled max spectral norm; inf when Bhat vanishes."""
    w = bhat.sup_norm(samples)
    if w == 0:
        return math.inf
    return float(math.floor(2 * math.pi / (w * T) + 1e-12))


def zero_bhat(n: int, period: float) -> CoefficientPath:
    return constant_path(np.zeros((2 * n, 2 * n)), period)
