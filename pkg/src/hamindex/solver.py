"""Nontrivial critical points of the rescaled action on E_m and their certificates.

A kT-periodic orbit of z' = J H'(t, z) is sought as a 2 pi-periodic critical
point of G_{k alpha}, alpha = T / 2 pi.  The search is a damped Newton
iteration on the coefficient-space derivative, deflated away from the trivial
solution and from every orbit already found, started from points of the
linking sphere B_theta(dQ) and from radial scans along low Fourier modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from . import galerkin
from .errors import (CriticalPointNotFound, DegenerateLoopError, InvalidArgumentError,
                     NonConvergenceError)
from .galerkin import ZERO_EIG, GalerkinForm
from .index import IndexPair, maslov_index_report
from .iteration import DISTINCT_TOL, distinctness, distinctness_bound, extend_period, phase_shift
from .loops import (FourierLoop, action, b_rho_scale, derivative, derivative_vector, e_norm, evaluate,
                    hessian, hessian_coefficient)
from .models import HamiltonianModel, k_range_bound
from .symplectic import standard_j

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class SolverOptions:
    residual_tol: float = 1e-8
    polish_tol: float = 1e-12
    max_iter: int = 80
    thetas: tuple = (2.0, 4.0, 8.0)
    sphere_seeds: int = 3
    ray_modes: tuple = (1, 2, 3)
    max_solutions: int = 4
    seed: int = 0
    min_norm: float = 1e-6
    distinct_tol: float = DISTINCT_TOL
    varrho: float | None = None


@dataclass
class SolutionRecord:
    loop: FourierLoop
    k: int
    alpha: float
    residual: float
    action_value: float
    index: IndexPair | None = None
    morse: tuple | None = None
    certificates: dict = field(default_factory=dict)
    seed_label: str = ""

    @property
    def alpha_eff(self) -> float:
        return self.k * self.alpha

    @property
    def period(self) -> float:
        """Original-time period kT."""
        return TWO_PI * self.alpha_eff

    @property
    def n(self) -> int:
        return self.loop.n

    def period_loop(self) -> FourierLoop:
        """The same coefficients on period k * 2 pi (the base period counts as 2 pi)."""
        return FourierLoop(TWO_PI * self.k, self.loop.coeffs)

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "alpha": self.alpha,
            "T": TWO_PI * self.alpha,
            "period": self.period,
            "residual": self.residual,
            "action_value": self.action_value,
            "index": None if self.index is None else self.index.as_dict(),
            "morse": None if self.morse is None else dict(zip(("minus", "zero", "plus"), self.morse)),
            "certificates": self.certificates,
            "seed": self.seed_label,
            "loop": self.loop.to_json(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SolutionRecord":
        idx = data.get("index")
        morse = data.get("morse")
        return cls(FourierLoop.from_json(data["loop"]), int(data["k"]), float(data["alpha"]),
                   float(data["residual"]), float(data["action_value"]),
                   None if idx is None else IndexPair(int(idx["i"]), int(idx["nu"])),
                   None if morse is None else (morse["minus"], morse["zero"], morse["plus"]),
                   dict(data.get("certificates", {})), data.get("seed", ""))


def residual_norm(model, z: FourierLoop, alpha: float) -> float:
    """E-norm of the gradient of G_alpha at z."""
    c = derivative_vector(model, z, alpha)
    return float(np.sqrt(np.sum(c * c / galerkin.gram_weights(z.m, z.n, z.tau))))


def morse_counts(form: GalerkinForm, d: float | None = None) -> tuple[int, int, int]:
    """(m-, m0, m+) of a Hessian form; same engine as index_counts.

    The Hessian of G is B - A, so m- here equals dimPlus of A - B.
    """
    eigs = form.eigenvalues()
    if d is None:
        zero = int(np.count_nonzero(np.abs(eigs) <= ZERO_EIG))
        minus = int(np.count_nonzero(eigs < -ZERO_EIG))
        return minus, zero, len(eigs) - minus - zero
    if d <= 0:
        raise InvalidArgumentError("gap d must be positive")
    plus, minus, zero = galerkin.inertia(eigs, d)
    return minus, zero, plus


def bracketing_holds(morse, m: int, n: int) -> bool:
    """m- <= dim Y_m <= m- + m0 with dim Y_m = dim E_m / 2 - n."""
    minus, zero, _ = morse
    dim_y = (2 * m + 1) * n - n
    return minus <= dim_y <= minus + zero


# --------------------------------------------------------------------------- Newton core

def _pinv_solve(Hm: np.ndarray, g: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Solve Hm d = -g in Gram-normalized coordinates, dropping near-null directions.

    Autonomous problems carry an exact kernel (time translation) at every
    solution, so a truncated spectral pseudo-inverse replaces a plain
    factorization.
    """
    s = 1 / np.sqrt(W)
    lam, Q = np.linalg.eigh((Hm * s[:, None]) * s[None, :])
    thr = 1e-10 * max(1.0, float(np.max(np.abs(lam))))
    inv = np.where(np.abs(lam) > thr, 1 / np.where(lam == 0, 1, lam), 0.0)
    y = Q @ (inv * (Q.T @ (-g * s)))
    return y * s


class _Deflation:
    """m(z) = prod_i (1 / |z - z_i|_E^2 + 1), always including z_i = 0."""

    def __init__(self, W):
        self.W = W
        self.points = [np.zeros_like(W)]

    def add(self, x):
        self.points.append(np.array(x, dtype=float))

    def value_and_log_grad(self, x):
        val = 1.0
        lg = np.zeros_like(x)
        for p in self.points:
            e = x - p
            r2 = float(np.sum(self.W * e * e))
            if r2 == 0:
                return math.inf, lg
            f = 1 / r2 + 1
            val *= f
            lg += (-2 * self.W * e / r2 ** 2) / f
        return val, lg


def _enorm_dual(c, W):
    return float(np.sqrt(np.sum(c * c / W)))


def _newton(model, x0, m, n, alpha, deflation, opts, use_deflation=True):
    W = galerkin.gram_weights(m, n, TWO_PI)

    def state(x):
        z = FourierLoop.from_vector(x, m, n)
        g = derivative_vector(model, z, alpha)
        if use_deflation:
            mv, lg = deflation.value_and_log_grad(x)
        else:
            mv, lg = 1.0, np.zeros_like(x)
        return z, g, mv, lg

    x = np.array(x0, dtype=float)
    z, g, mv, lg = state(x)
    merit = mv * _enorm_dual(g, W)
    for it in range(opts.max_iter):
        res = _enorm_dual(g, W)
        if res <= opts.polish_tol * max(1.0, e_norm(z)):
            return x, res, it
        if not math.isfinite(merit):
            return None, math.inf, it
        Hm = hessian(model, z, alpha).F
        d = _pinv_solve(Hm, g, W)
        eta = float(lg @ d)
        step = d / (1 - eta) if use_deflation and abs(1 - eta) > 1e-12 else d
        lam = 1.0
        accepted = False
        while lam >= 2 ** -12:
            xt = x + lam * step
            try:
                zt, gt, mt, lgt = state(xt)
            except Exception:
                lam *= 0.5
                continue
            mt_merit = mt * _enorm_dual(gt, W)
            if math.isfinite(mt_merit) and mt_merit < (1 - 1e-4 * lam) * merit:
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            # stalled: good enough if the residual already meets the contract
            return (x, res, it) if res <= opts.residual_tol else (None, res, it)
        x, z, g, mv, lg, merit = xt, zt, gt, mt, lgt, mt_merit
    res = _enorm_dual(g, W)
    return (x, res, opts.max_iter) if res <= opts.residual_tol else (None, res, opts.max_iter)


def _polish(model, x, m, n, alpha, opts):
    xp, res, _ = _newton(model, x, m, n, alpha, None, opts, use_deflation=False)
    return xp, res


# --------------------------------------------------------------------------- seeds

def _ray_seeds(model, m, n, alpha, modes):
    """Sign changes of s -> dG(s u)[u] along unit E-vectors u of single Fourier modes."""
    seeds = []
    radii = np.geomspace(1e-3, 1e5, 161)
    for j in modes:
        if j > m:
            continue
        for r in range(2 * n):
            a = np.zeros(2 * n)
            a[r] = 1 / math.sqrt(TWO_PI * j)
            u = FourierLoop.single_mode(j, a, m)
            uv = u.vector()

            def phi(s, u=u, uv=uv):
                return float(derivative_vector(model, u * s, alpha) @ uv)

            vals = np.array([phi(s) for s in radii])
            for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
                s = brentq(phi, radii[i], radii[i + 1], xtol=1e-14, rtol=1e-13)
                seeds.append((f"ray(mode={j}, coord={r}, s={s:.6g})", (u * s).vector()))
    return seeds


def _sphere_seeds(model, m, n, opts, rng):
    P = model.params
    varrho = opts.varrho if opts.varrho is not None else P.get("varrho")
    sigma, omega = P.get("sigma", 1.0), P.get("omega", 1.0)
    W = galerkin.gram_weights(m, n, TWO_PI).reshape(2 * m + 1, 2 * n)
    seeds = []
    for theta in opts.thetas:
        for _ in range(opts.sphere_seeds):
            c = rng.normal(size=(2 * m + 1, 2 * n)) / np.sqrt(W)
            c[: m + 1] = 0
            c[m + 1:] *= np.exp(-np.arange(m)[:, None])
            z = FourierLoop(TWO_PI, c)
            z = z * (theta / e_norm(z))
            if varrho is not None:
                z = b_rho_scale(z, theta, varrho, sigma, omega)
            seeds.append((f"sphere(theta={theta})", z.vector()))
    for s in (1.0, 10.0):
        c = np.zeros((2 * m + 1, 2 * n))
        c[m] = rng.normal(size=2 * n)
        c[m] *= s / np.linalg.norm(c[m])
        c[m + 1] = 0.1 * rng.normal(size=2 * n)
        seeds.append((f"constant-ray(s={s})", c.ravel()))
    return seeds


# --------------------------------------------------------------------------- public API

def find_critical_point(model: HamiltonianModel, alpha: float, k: int = 1, m: int = 32,
                        opts: SolverOptions | None = None, verify: bool = True) -> SolutionRecord:
    """Nontrivial kT-periodic orbit as a critical point of G_{k alpha} on E_m.

    Every converged, pairwise distinct candidate is kept; the returned record
    is the first one meeting the Morse bracketing of the linking theorem and
    carrying positive action, falling back to the first candidate found.
    """
    opts = opts or SolverOptions()
    if alpha <= 0:
        raise InvalidArgumentError("alpha must be positive")
    if int(k) != k or k < 1:
        raise InvalidArgumentError("k must be a positive integer")
    if m < 8:
        raise InvalidArgumentError("level m must be >= 8")
    k = int(k)
    n = model.n
    a_eff = k * alpha
    rng = np.random.default_rng(opts.seed)
    W = galerkin.gram_weights(m, n, TWO_PI)
    deflation = _Deflation(W)
    seeds = _ray_seeds(model, m, n, a_eff, opts.ray_modes) + _sphere_seeds(model, m, n, opts, rng)
    found, attempts = [], []
    for label, x0 in seeds:
        x, res, iters = _newton(model, x0, m, n, a_eff, deflation, opts)
        attempts.append({"seed": label, "converged": x is not None, "residual": res, "iterations": iters})
        if x is None:
            continue
        xp, res_p = _polish(model, x, m, n, a_eff, opts)
        if xp is not None:
            x, res = xp, res_p
        z = FourierLoop.from_vector(x, m, n)
        if e_norm(z) <= opts.min_norm or res > opts.residual_tol:
            continue
        if any(not distinctness(z, f.loop, TWO_PI, opts.distinct_tol).distinct for f in found):
            deflation.add(x)
            continue
        deflation.add(x)
        morse = morse_counts(hessian(model, z, a_eff))
        rec = SolutionRecord(z, k, alpha, res, action(model, z, a_eff), morse=morse, seed_label=label)
        rec.certificates["morse_bracketing"] = bracketing_holds(morse, m, n)
        found.append(rec)
        if rec.certificates["morse_bracketing"] and rec.action_value > 0:
            break
        if len(found) >= opts.max_solutions:
            break
    if not found:
        raise CriticalPointNotFound(f"no nontrivial critical point found for alpha={alpha}, k={k}", attempts)
    good = [r for r in found if r.certificates["morse_bracketing"] and r.action_value > 0]
    best = good[0] if good else found[0]
    best.certificates["alternatives"] = [
        {"seed": r.seed_label, "action_value": r.action_value, "morse": list(r.morse), "e_norm": e_norm(r.loop)}
        for r in found if r is not best
    ]
    if model.bhat is not None:
        best.certificates["outside_theorem_range"] = bool(k > k_range_bound(model.bhat, TWO_PI * alpha))
    return verify_solution(model, best) if verify else best


def ode_defect(model, z: FourierLoop, alpha: float, samples: int | None = None) -> float:
    """max_s |z'(s) - alpha J H'(alpha s, z(s))| on a fine uniform grid."""
    N = samples or 4 * galerkin.quadrature_nodes(z.m)
    s = np.arange(N) * (z.tau / N)
    dz = evaluate(derivative(z), s)
    J = standard_j(z.n)
    rhs = alpha * model.evaluate_grad(alpha * s, evaluate(z, s)) @ J.T
    return float(np.max(np.linalg.norm(dz - rhs, axis=1)))


def verify_solution(model: HamiltonianModel, rec: SolutionRecord, max_level: int = 256) -> SolutionRecord:
    """Fill the ODE defect, index pair, index-interval flag and Morse cross-checks."""
    z, a_eff, n = rec.loop, rec.alpha_eff, rec.n
    cert = rec.certificates
    cert["residual"] = residual_norm(model, z, a_eff)
    cert["ode_defect"] = ode_defect(model, z, a_eff)
    cert["nontrivial"] = bool(e_norm(z) > 1e-6 and rec.action_value > 0)
    form = hessian(model, z, a_eff)
    rec.morse = morse_counts(form)
    cert["morse_bracketing"] = bracketing_holds(rec.morse, z.m, n)
    try:
        report = maslov_index_report(hessian_coefficient(model, z, a_eff), TWO_PI, max_level)
    except NonConvergenceError as exc:
        rec.index = None
        cert["index_status"] = "indeterminate"
        cert["index_diagnostic"] = exc.diagnostic
        cert["index_interval"] = None
        cert["morse_consistent"] = None
        return rec
    rec.index = report.pair
    i, nu = report.pair
    cert["index_status"] = "certified"
    cert["index_levels"] = [lv["level"] for lv in report.levels]
    cert["index_interval"] = bool(i <= n <= i + nu)
    half = (2 * z.m + 1) * n
    # Morse index of B - A equals dimPlus(A - B) = dim E_m / 2 - i - nu
    cert["morse_consistent"] = bool(rec.morse[0] == half - i - nu and rec.morse[1] == nu)
    return rec


def as_subharmonic(rec: SolutionRecord, factor: int) -> SolutionRecord:
    """The same orbit regarded as a (k * factor)-periodic solution."""
    ext = extend_period(rec.period_loop(), factor)
    loop = FourierLoop(TWO_PI, ext.coeffs)
    return replace(rec, loop=loop, k=rec.k * factor, index=None, morse=None, certificates={})


def shifted_loop(rec: SolutionRecord, j: int) -> FourierLoop:
    """Rescaled loop of the phase shift t -> z(t + jT)."""
    return FourierLoop(TWO_PI, phase_shift(rec.period_loop(), j, TWO_PI).coeffs)


def minimal_period(rec: SolutionRecord, tol: float = 1e-6) -> float:
    """Original-time minimal period kT / g, g the gcd of active nonzero modes."""
    c = rec.loop.coeffs
    norms = np.linalg.norm(c, axis=1)
    top = float(norms.max())
    js = galerkin.modes(rec.loop.m)
    active = [abs(int(j)) for j, v in zip(js, norms) if j != 0 and top > 0 and v > tol * top]
    if not active:
        raise DegenerateLoopError("no active nonconstant Fourier mode; the loop is an equilibrium")
    g = 0
    for j in active:
        g = math.gcd(g, j)
    return rec.period / g


def fourier_gcd(rec: SolutionRecord, tol: float = 1e-6) -> int:
    return int(round(rec.period / minimal_period(rec, tol)))


@dataclass
class FamilyReport:
    records: dict
    distinct: list
    thresholds: dict
    findings: list

    def as_dict(self):
        return {
            "records": {str(k): (v.as_dict() if isinstance(v, SolutionRecord) else v) for k, v in self.records.items()},
            "distinctness": self.distinct,
            "thresholds": {str(k): v for k, v in self.thresholds.items()},
            "findings": self.findings,
        }


def subharmonic_family(model: HamiltonianModel, alpha: float, k_max: int, m: int = 32,
                       opts: SolverOptions | None = None) -> FamilyReport:
    """Orbits for k = 1..k_max, pairwise distinctness and the index-based thresholds."""
    if k_max < 1:
        raise InvalidArgumentError("k_max must be >= 1")
    records = {}
    for k in range(1, k_max + 1):
        try:
            records[k] = find_critical_point(model, alpha, k, m, opts)
        except CriticalPointNotFound as exc:
            records[k] = {"status": "not-found", "message": str(exc), "attempts": exc.attempts}
    ks = [k for k in records if isinstance(records[k], SolutionRecord)]
    matrix = []
    if len(ks) > 1:
        for a in ks:
            row = []
            for b in ks:
                res = distinctness(records[a].period_loop(), records[b].period_loop(), TWO_PI)
                row.append({"k1": a, "k2": b, **res.as_dict()})
            matrix.append(row)
    thresholds, findings = {}, []
    for k in ks:
        rec = records[k]
        bound = None if rec.index is None else distinctness_bound(rec.index, model.n)
        thresholds[k] = bound
        if bound is None:
            continue
        for l in range(bound, k_max // k + 1):
            if l * k in ks and l > 1:
                res = distinctness(rec.period_loop(), records[l * k].period_loop(), TWO_PI)
                if not res.distinct:
                    findings.append({"k": k, "lk": l * k, "claim": "distinct", "observed": res.as_dict()})
    return FamilyReport(records, matrix, thresholds, findings)


@dataclass
class LinkingReport:
    theta: float
    m: int
    sup_on_boundary: float
    inf_on_s: float
    nsamples: int
    seed: int
    varrho: float

    @property
    def gap_holds(self) -> bool:
        return self.sup_on_boundary < self.inf_on_s

    def as_dict(self):
        return {"theta": self.theta, "m": self.m, "sup_on_boundary": self.sup_on_boundary,
                "inf_on_s": self.inf_on_s, "gap": self.inf_on_s - self.sup_on_boundary,
                "gap_holds": self.gap_holds, "nsamples": self.nsamples, "seed": self.seed,
                "varrho": self.varrho, "note": "sampled sup/inf; no universal claim"}


def linking_gap(model: HamiltonianModel, alpha: float, m: int, theta: float, nsamples: int = 500,
                seed: int = 0, varrho: float | None = None) -> LinkingReport:
    """Sampled sup of G_alpha on B_theta(dQ_m) against the sampled inf on S_m.

    dQ_m is the E-sphere of radius theta in E_m^+, S_m = E_m^- + E^0 + u0
    with u0 the unit E-vector of mode 1 along the first coordinate, sampled
    over the ball of radius 10 theta.
    """
    if theta <= 1:
        raise InvalidArgumentError("theta must exceed 1")
    if nsamples < 100:
        raise InvalidArgumentError("nsamples must be >= 100")
    P = model.params
    varrho = varrho if varrho is not None else P.get("varrho")
    if varrho is None:
        raise InvalidArgumentError("varrho must be given or declared by the model")
    sigma, omega = P.get("sigma", 1.0), P.get("omega", 1.0)
    n = model.n
    rng = np.random.default_rng(seed)
    W = galerkin.gram_weights(m, n, TWO_PI).reshape(2 * m + 1, 2 * n)
    j = galerkin.modes(m)[:, None]

    def sphere_point(c):
        z = FourierLoop(TWO_PI, c)
        return b_rho_scale(z * (theta / e_norm(z)), theta, varrho, sigma, omega)

    sup_b = -math.inf
    basis = []
    for r in range(2 * n):
        c = np.zeros((2 * m + 1, 2 * n))
        c[m + 1, r] = 1.0
        basis.append(c)
    for i in range(nsamples):
        if i < len(basis):
            c = basis[i]
        else:
            c = np.where(j > 0, rng.normal(size=W.shape) / np.sqrt(W), 0.0)
        sup_b = max(sup_b, action(model, sphere_point(c), alpha))

    u0 = np.zeros((2 * m + 1, 2 * n))
    u0[m + 1, 0] = 1 / math.sqrt(TWO_PI)
    inf_s = action(model, FourierLoop(TWO_PI, u0), alpha)
    for _ in range(nsamples - 1):
        c = np.where(j <= 0, rng.normal(size=W.shape) / np.sqrt(W), 0.0)
        w = FourierLoop(TWO_PI, c)
        w = w * (10 * theta * rng.uniform() / e_norm(w))
        inf_s = min(inf_s, action(model, FourierLoop(TWO_PI, w.coeffs + u0), alpha))
    return LinkingReport(theta, m, float(sup_b), float(inf_s), nsamples, seed, float(varrho))


def estimate_alpha0(model: HamiltonianModel, k: int = 1, m: int = 16, lo: float = 0.1, hi: float = 10.0,
                    iterations: int = 12, opts: SolverOptions | None = None) -> dict:
    """Empirical threshold: bisection on 'solver succeeds with action >= 1'.

    A stand-in for the existence constant; the predicate need not be monotone.
    """

    def ok(a):
        try:
            rec = find_critical_point(model, a, k, m, opts, verify=False)
        except CriticalPointNotFound:
            return False
        return rec.action_value >= 1

    if not ok(hi):
        return {"alpha0": None, "status": "predicate false at upper end", "lo": lo, "hi": hi}
    if ok(lo):
        return {"alpha0": lo, "status": "predicate true at lower end", "lo": lo, "hi": hi}
    for _ in range(iterations):
        mid = math.sqrt(lo * hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return {"alpha0": hi, "status": "empirical bisection", "lo": lo, "hi": hi,
            "note": "empirical estimate, not a certified constant"}
