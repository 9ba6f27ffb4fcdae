import math

import numpy as np
import pytest

from hamindex.errors import EvaluationError, InvalidArgumentError
from hamindex.models import (CERTIFIED, NOT_APPLICABLE, VIOLATED, Grid, anisotropic_model, check_h7,
                             expression_model, k_range_bound, nonautonomous_model, quadratic_model,
                             quadratic_plus_model, soft_power_model, soft_power_orbit_period, soft_power_radius,
                             verify_hypotheses, zero_bhat)
from hamindex.symplectic import constant_path, standard_j, trig_path
from oracles import SOFT_POWER_R6, SOFT_POWER_R10, rotation_exact, soft_power_radius_closed

TWO_PI = 2 * math.pi


def _modulation(t):
    return 1 + 0.5 * np.cos(np.asarray(t))


def _bhat(n, scale=0.3):
    rng = np.random.default_rng(7)
    d = 2 * n
    mats = [rng.uniform(-1, 1, (d, d)) for _ in range(3)]
    B0, C, S = [scale * (M + M.T) / 2 for M in mats]
    return trig_path(B0, [C], [S], TWO_PI)


def _all_models():
    sp1 = soft_power_model(1)
    return [
        sp1,
        soft_power_model(2, 1.65),
        anisotropic_model(1, 1.0, 1.2, 1.7),
        anisotropic_model(2, 1.0, 1.0, 1.9),
        nonautonomous_model(sp1, _modulation, TWO_PI),
        quadratic_plus_model(_bhat(1), sp1),
        expression_model("(1 + p1**2 + q1**2)**(7/8) - 1 + 0.1*sin(t)*p1**2", 1, TWO_PI),
    ]


@pytest.mark.parametrize("model", _all_models(), ids=lambda m: m.name)
def test_finite_difference_consistency(model):
    rng = np.random.default_rng(2024)
    d = 2 * model.n
    T = model.period or TWO_PI
    t = rng.uniform(0, T, 100)
    Z = rng.normal(size=(100, d)) * rng.uniform(0.1, 20, (100, 1))
    g = model.evaluate_grad(t, Z)
    Hs = model.evaluate_hess(t, Z)
    assert np.allclose(Hs, Hs.transpose(0, 2, 1), atol=1e-12)
    for r in range(d):
        h = 1e-6 * (1 + np.abs(Z[:, r]))
        e = np.zeros(d)
        e[r] = 1
        Zp, Zm = Z + h[:, None] * e, Z - h[:, None] * e
        fd_g = (model.evaluate_H(t, Zp) - model.evaluate_H(t, Zm)) / (2 * h)
        assert np.allclose(fd_g, g[:, r], rtol=1e-6, atol=1e-6 * (1 + np.abs(g).max()))
        fd_h = (model.evaluate_grad(t, Zp) - model.evaluate_grad(t, Zm)) / (2 * h[:, None])
        assert np.allclose(fd_h, Hs[:, :, r], rtol=1e-5, atol=1e-5 * (1 + np.abs(Hs).max()))


@pytest.mark.parametrize("model", _all_models(), ids=lambda m: m.name)
def test_nonnegative_and_zero_at_origin(model):
    rng = np.random.default_rng(3)
    T = model.period or TWO_PI
    t = rng.uniform(0, T, 200)
    Z = rng.normal(size=(200, 2 * model.n)) * 10
    assert np.all(model.evaluate_H(t, Z) >= 0)
    assert np.all(model.evaluate_H(t, np.zeros((200, 2 * model.n))) == 0)
    assert np.all(model.evaluate_grad(t, np.zeros((200, 2 * model.n))) == 0)


def test_soft_power_circular_solutions():
    beta = 1.75
    model = soft_power_model(1, beta)
    r = 3.0
    omega = 2 * (beta / 2) * (1 + r * r) ** (beta / 2 - 1)
    z0 = np.array([r, 0.0])
    J = standard_j(1)
    ts = np.linspace(0, 5, 11)
    Z = np.array([rotation_exact(omega * t) @ z0 for t in ts])
    dZ = omega * Z @ J.T
    assert np.allclose(dZ, model.evaluate_grad(ts, Z) @ J.T, atol=1e-13)
    assert soft_power_orbit_period(r, beta) == pytest.approx(TWO_PI / omega, rel=1e-14)


def test_soft_power_radius_against_frozen_values():
    assert soft_power_radius(6.0) == pytest.approx(SOFT_POWER_R6, rel=1e-13)
    assert soft_power_radius(10.0) == pytest.approx(SOFT_POWER_R10, rel=1e-13)
    assert soft_power_radius(12.0, j=2) == pytest.approx(SOFT_POWER_R6, rel=1e-13)
    assert soft_power_radius(7.5, 1.8) == pytest.approx(soft_power_radius_closed(7.5, 1.8), rel=1e-12)
    with pytest.raises(InvalidArgumentError):
        soft_power_radius(1.0)


def test_soft_power_hessian_min_eigenvalue():
    beta = 1.75
    model = soft_power_model(2, beta)
    rng = np.random.default_rng(0)
    Z = rng.normal(size=(50, 4)) * rng.uniform(0, 100, (50, 1))
    s = np.sum(Z * Z, 1)
    expected = beta * (1 + s) ** (beta / 2 - 2) * (1 + (beta - 1) * s)
    eig = np.linalg.eigvalsh(model.evaluate_hess(0.0, Z))
    assert np.allclose(eig[:, 0], expected, rtol=1e-12)
    assert np.all(eig[:, 0] > 0)


def test_composition_examples():
    base = soft_power_model(1)
    rng = np.random.default_rng(1)
    t = rng.uniform(0, TWO_PI, 40)
    Z = rng.normal(size=(40, 2)) * 5
    same = nonautonomous_model(base, lambda s: np.ones_like(np.asarray(s, dtype=float)), TWO_PI)
    plus0 = quadratic_plus_model(zero_bhat(1, TWO_PI), base)
    for m in (same, plus0):
        assert np.array_equal(m.evaluate_H(t, Z), base.evaluate_H(t, Z))
        assert np.array_equal(m.evaluate_grad(t, Z), base.evaluate_grad(t, Z))
        assert np.array_equal(m.evaluate_hess(t, Z), base.evaluate_hess(t, Z))
    assert plus0.params["w"] == 0.0


def test_anisotropic_equal_weights_matches_soft_power_per_block():
    beta = 1.8
    aniso = anisotropic_model(2, 1.0, 1.0, beta)
    sp = soft_power_model(2, beta)
    rng = np.random.default_rng(5)
    P = rng.normal(size=(30, 2)) * 4
    Q = rng.normal(size=(30, 2)) * 4
    zero = np.zeros_like(P)
    Z = np.concatenate([P, Q], 1)
    split = sp.evaluate_H(0.0, np.concatenate([P, zero], 1)) + sp.evaluate_H(0.0, np.concatenate([zero, Q], 1))
    assert np.allclose(aniso.evaluate_H(0.0, Z), split, rtol=1e-14)
    assert aniso.params["mu"] == aniso.params["upsilon"] == 2.0


def test_expression_model_matches_soft_power():
    expr = expression_model("(1 + p1**2 + q1**2)**(7/8) - 1", 1)
    sp = soft_power_model(1)
    Z = np.random.default_rng(9).normal(size=(25, 2)) * 3
    assert np.allclose(expr.evaluate_H(0.0, Z), sp.evaluate_H(0.0, Z), rtol=1e-13)
    assert np.allclose(expr.evaluate_grad(0.0, Z), sp.evaluate_grad(0.0, Z), rtol=1e-12)
    assert np.allclose(expr.evaluate_hess(0.0, Z), sp.evaluate_hess(0.0, Z), rtol=1e-11, atol=1e-14)
    assert expr.autonomous


@pytest.mark.parametrize("text", ["__import__('os').system('true')", "p1.real", "[p1]", "x1 + p1",
                                  "lambda: 1", "p1 if q1 else 0", "'s'"])
def test_expression_rejects_unsafe_or_unknown(text):
    with pytest.raises(InvalidArgumentError):
        expression_model(text, 1)


@pytest.mark.filterwarnings("ignore:invalid value")
def test_evaluation_error_reports_time():
    model = expression_model("log(p1 + 2) + q1**2", 1, TWO_PI)
    with pytest.raises(EvaluationError) as info:
        model.evaluate_H([0.5, 1.5], [[0.0, 0.0], [-3.0, 0.0]])
    assert info.value.t == 1.5


def test_invalid_parameters():
    with pytest.raises(InvalidArgumentError):
        soft_power_model(1, 1.5)
    with pytest.raises(InvalidArgumentError):
        soft_power_model(1, 2.0)
    with pytest.raises(InvalidArgumentError):
        anisotropic_model(1, 1.0, 3.0, 1.7)
    with pytest.raises(InvalidArgumentError):
        anisotropic_model(1, 0.0, 1.0, 1.7)
    with pytest.raises(InvalidArgumentError):
        nonautonomous_model(soft_power_model(1), lambda t: np.cos(np.asarray(t)), TWO_PI)
    with pytest.raises(InvalidArgumentError):
        quadratic_plus_model(_bhat(2), soft_power_model(1))
    with pytest.raises(InvalidArgumentError):
        expression_model("p1**2", 1, params={"mu": 3.0, "upsilon": 2.0})
    with pytest.raises(InvalidArgumentError):
        expression_model("p1**2", 1, params={"beta": 1.8, "lambda": 1.2})


def test_lambda_window_of_builtin_models():
    for model in _all_models()[:-1]:
        b, lam = model.params["beta"], model.params["lambda"]
        assert 1 < b < 2 and 1 <= lam < b * b / (b + 1)


def test_soft_power_hypotheses_certified():
    report = verify_hypotheses(soft_power_model(1, 1.75))
    assert report.all_certified
    for key in ("H1", "H2", "H3", "H4", "H5", "H6", "H8", "parameters"):
        assert report.entries[key]["status"] == CERTIFIED, key
    assert report.entries["H7"]["status"] == NOT_APPLICABLE
    assert "trend, not proof" in report.entries["H2"]["check"]
    assert report.entries["H4"]["margin"] >= 0


def test_quadratic_violates_growth_with_witness():
    report = verify_hypotheses(quadratic_model(1, 1.0))
    h2 = report.entries["H2"]
    assert h2["status"] == VIOLATED
    assert {"radius", "ratio", "previous_ratio"} <= h2["witness"].keys()
    assert not report.all_certified


def test_other_models_hypotheses():
    grid = Grid(n_times=8)
    assert verify_hypotheses(anisotropic_model(1, 1.0, 1.2, 1.7), grid).all_certified
    mod = verify_hypotheses(nonautonomous_model(soft_power_model(1), _modulation, TWO_PI), grid)
    assert mod.entries["H1"]["status"] == CERTIFIED
    assert mod.entries["H8"]["status"] == NOT_APPLICABLE
    assert mod.all_certified


def test_violated_entry_carries_witness():
    # declared c3 too small for the H4 tail bound near the origin
    base = soft_power_model(1)
    params = dict(base.params, c3=0.0, c2=1.0)
    model = expression_model("(1 + p1**2 + q1**2)**(7/8) - 1", 1, params=params)
    entry = verify_hypotheses(model).entries["H4"]
    assert entry["status"] == VIOLATED
    w = entry["witness"]
    assert w["value"] < w["bound"]
    assert len(w["z"]) == 2


def test_check_h7_examples():
    sym = _bhat(2, 1.0)
    assert check_h7(sym, 2.0, 2.0)["status"] == CERTIFIED
    assert check_h7(zero_bhat(1, TWO_PI), 3.0, 1.5)["status"] == CERTIFIED
    block = constant_path(np.diag([1.0, 2.0]), TWO_PI)
    entry = check_h7(block, 3.0, 1.5)
    assert entry["status"] == VIOLATED
    assert entry["witness"]["value"] != pytest.approx(entry["witness"]["bound"])
    with pytest.raises(InvalidArgumentError):
        check_h7(block, 3.0, 3.0)


def test_k_range_bound_examples():
    assert k_range_bound(constant_path(0.1 * np.eye(2), TWO_PI), TWO_PI) == 10
    assert k_range_bound(constant_path(np.diag([0.05, -0.1, 0.02, 0.0]), TWO_PI), TWO_PI) == 10
    assert k_range_bound(constant_path(2.0 * np.eye(2), TWO_PI), TWO_PI) == 0
    assert k_range_bound(zero_bhat(1, TWO_PI), TWO_PI) == math.inf
