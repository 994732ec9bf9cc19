import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orderedcover.shifts import (
    FiniteVector,
    TruncationOverflowError,
    backward_power,
    build_common_vector,
    check_cs1_bounds,
    check_cs2_lipschitz,
    cs1_envelope_closed_form,
    cs1_envelope_generic,
    DynamicsConfig,
    forward_power,
    measured_shift_bound,
    plus_power_family,
    power_family,
    product_apply,
    rolewicz_family,
    run_dynamics_experiment,
    slog_add,
    slog_from_values,
    slog_to_values,
    weight_family,
)
from orderedcover.tagging import BuilderParams, build_tagged_covering
from orderedcover.zoo import sierpinski_gasket, unit_interval

FAMILIES = [rolewicz_family(), power_family(0.5), plus_power_family(0.5)]


# dense one-step reference: applies the literal weight recurrences
def dense_backward(fam, x, n, values):
    out = np.asarray(values, dtype=float).copy()
    L = len(out) - 1
    for _ in range(n):
        nxt = np.zeros_like(out)
        for l in range(L):
            nxt[l] = fam.weight(x, l + 1) * out[l + 1]
        out = nxt
    return out


def dense_forward(fam, x, n, values):
    out = np.asarray(values, dtype=float).copy()
    L = len(out) - 1
    for _ in range(n):
        nxt = np.zeros_like(out)
        for l in range(L):
            nxt[l + 1] = out[l] / fam.weight(x, l + 1)
        out = nxt
    return out


small = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)


@given(a=small, b=small)
def test_slog_add_matches_float_addition(a, b):
    s, m = slog_add(*slog_from_values(np.array([a])), *slog_from_values(np.array([b])))
    got = slog_to_values(s, m)[0]
    assert got == pytest.approx(a + b, rel=1e-12, abs=1e-12)


def test_slog_add_exact_cancellation():
    s, m = slog_add(*slog_from_values(np.array([3.5])), *slog_from_values(np.array([-3.5])))
    assert s[0] == 0.0 and np.isneginf(m[0])


def test_slog_zero_operands():
    s, m = slog_add(
        *slog_from_values(np.array([0.0, 0.0, 2.0])),
        *slog_from_values(np.array([0.0, -1.0, 0.0])),
    )
    assert slog_to_values(s, m) == pytest.approx([0.0, -1.0, 2.0])


def test_vector_roundtrip_and_norms():
    values = np.array([[1.0, -0.5, 0.0, 0.25], [0.0, 2.0, -0.125, 0.0]])
    vec = FiniteVector.from_values(values)
    assert np.allclose(vec.to_values(), values, atol=1e-14)
    assert vec.norm() == pytest.approx(2.0)
    p2 = FiniteVector.from_values(values, norm_kind=2.0)
    expected = max(np.linalg.norm(values[0]), np.linalg.norm(values[1]))
    assert p2.norm() == pytest.approx(expected, rel=1e-12)


def test_vector_plus_minus_match_dense():
    a = np.array([[1.0, -2.0, 0.5, 0.0]])
    b = np.array([[0.25, 2.0, -0.5, -1.0]])
    va, vb = FiniteVector.from_values(a), FiniteVector.from_values(b)
    assert np.allclose(va.plus(vb).to_values(), a + b, atol=1e-12)
    assert np.allclose(va.minus(vb).to_values(), a - b, atol=1e-12)


def test_basis_and_support():
    e = FiniteVector.basis(2, 10, 3, -2.0)
    vals = e.to_values()
    assert vals[0][3] == pytest.approx(-2.0) and vals[1][3] == pytest.approx(-2.0)
    assert e.support_max() == 3
    assert FiniteVector.zeros(1, 5).support_max() == -1


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.name)
@pytest.mark.parametrize("n", [0, 1, 3, 5])
def test_backward_power_matches_iterated_steps(fam, n):
    rng = np.random.default_rng(3)
    values = rng.uniform(-1.0, 1.0, size=13)
    x = 1.7
    expected = dense_backward(fam, x, n, values)
    sign, logmag = backward_power(fam, x, n, slog_from_values(values))
    assert np.allclose(slog_to_values(sign, logmag), expected, rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.name)
@pytest.mark.parametrize("n", [0, 1, 4])
def test_forward_power_matches_iterated_steps(fam, n):
    rng = np.random.default_rng(4)
    values = np.concatenate([rng.uniform(-1.0, 1.0, size=9 - n), np.zeros(n)])
    x = 1.3
    expected = dense_forward(fam, x, n, values)
    sign, logmag = forward_power(fam, x, n, slog_from_values(values))
    assert np.allclose(slog_to_values(sign, logmag), expected, rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.name)
def test_backward_inverts_forward_on_support(fam):
    values = np.array([0.5, -0.25, 1.0, 0.0, 0.0, 0.0, 0.0])
    fwd = forward_power(fam, 1.5, 4, slog_from_values(values))
    back_sign, back_logmag = backward_power(fam, 1.5, 4, fwd)
    assert np.allclose(slog_to_values(back_sign, back_logmag), values, rtol=1e-9, atol=1e-12)


def test_forward_power_guards_truncation():
    values = np.zeros(6)
    values[4] = 1.0
    with pytest.raises(TruncationOverflowError):
        forward_power(rolewicz_family(), 1.0, 3, slog_from_values(values))


def test_backward_power_beyond_support_is_zero():
    fam = rolewicz_family()
    sign, logmag = backward_power(fam, 1.0, 9, slog_from_values(np.ones(5)))
    assert (sign == 0.0).all() and np.isneginf(logmag).all()


def test_product_apply_uses_per_factor_parameters():
    fam = rolewicz_family()
    values = np.array([[0.0, 1.0, 0.0, 0.0], [0.0, -2.0, 0.0, 0.0]])
    u = FiniteVector.from_values(values)
    out = product_apply(fam, (1.0, 2.0), 1, u, "backward")
    got = out.to_values()
    assert got[0][0] == pytest.approx(math.e * 1.0)
    assert got[1][0] == pytest.approx(-2.0 * math.e**2)
    with pytest.raises(ValueError):
        product_apply(fam, (1.0,), 1, u, "backward")
    with pytest.raises(ValueError):
        product_apply(fam, (1.0, 2.0), 1, u, "sideways")


def test_weight_family_lookup():
    assert weight_family("rolewicz").name == "rolewicz"
    assert weight_family("power", 0.7).alpha == pytest.approx(0.7)
    assert weight_family("plus-power", 0.5).C0 == pytest.approx(2.0)
    with pytest.raises(KeyError):
        weight_family("geometric")
    with pytest.raises(ValueError):
        weight_family("power")


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.name)
def test_lipschitz_certificates_hold(fam):
    report = check_cs2_lipschitz(fam, (1.0, 2.0), n_max=400)
    assert report.passed
    assert report.measured <= fam.C0 * (1.0 + 1e-9)


def test_power_family_lipschitz_constant_is_sharp():
    report = check_cs2_lipschitz(power_family(0.5), (1.0, 2.0), n_max=400)
    assert report.measured == pytest.approx(1.0, abs=1e-12)


def test_rolewicz_lipschitz_constant_is_sharp():
    report = check_cs2_lipschitz(rolewicz_family(), (1.0, 2.0), n_max=400)
    assert report.measured == pytest.approx(1.0, abs=1e-12)


def test_closed_form_envelope_limits():
    env = cs1_envelope_closed_form(0.5, (1.0, 2.0))
    assert env(10.0) == pytest.approx(-5.0)
    finite = cs1_envelope_closed_form(0.5, (1.0, 2.0), alpha_g=1.0, horizon=100)
    assert finite(10.0) < env(10.0)  # finite horizon is strictly tighter
    with pytest.raises(ValueError):
        cs1_envelope_closed_form(0.5, (1.0, 2.0), alpha_g=0.7, horizon=None)


def test_measured_shift_bound_matches_dense_ops():
    fam = rolewicz_family()
    x, y, n, k, l = 1.4, 1.1, 3, 2, 1
    L = 12
    e = np.zeros(L + 1)
    e[l] = 1.0
    staged = dense_forward(fam, y, n + k, e)
    staged = dense_backward(fam, x, n, staged)
    expected = math.log(np.abs(staged).max())
    got = measured_shift_bound(fam, x, y, n, k, [l])
    assert got == pytest.approx(expected, rel=1e-12)


def test_cs1_bounds_rolewicz_under_closed_form():
    env = cs1_envelope_closed_form(0.5, (1.0, 2.0))
    report = check_cs1_bounds(
        rolewicz_family(),
        gamma=1.0,
        D=0.5,
        interval=(1.0, 2.0),
        kappa=1,
        k_max=20,
        n_max=20,
        envelope=env,
    )
    assert report.passed
    assert report.worst_log_margin <= 0.0
    assert report.ratio_margin == pytest.approx(1.0 - math.exp(-0.5), rel=1e-9)
    assert report.tail_sums["1"] < 2.0


def test_cs1_generic_envelope_decays_for_growth_family():
    fam = power_family(0.5)
    env = cs1_envelope_generic(fam, 0.05, (1.0, 2.0), support_max=2)
    ks = [4, 16, 64, 256]
    vals = [env(k) for k in ks]
    assert all(b < a for a, b in zip(vals, vals[1:]))


@pytest.fixture(scope="module")
def flagship():
    ifs = sierpinski_gasket()
    return run_dynamics_experiment(ifs, rolewicz_family(), eta=0.1)


def test_experiment_selects_frozen_step_and_scale(flagship):
    assert flagship.config.bigN == 6
    assert flagship.sigma == pytest.approx(0.00760109048258, rel=1e-9)
    assert flagship.D_scaled == pytest.approx(0.06080872386064, rel=1e-9)
    assert flagship.envelope_tail == pytest.approx(0.014046456762, rel=1e-6)
    assert flagship.config.L == 200


def test_experiment_meets_accuracy_targets(flagship):
    assert flagship.passed
    assert flagship.u_minus_u0 < 0.1
    assert flagship.universality.worst_error < 0.3
    assert flagship.universality.min_samples_per_box >= 10
    assert flagship.universality.samples >= 27 * 10
    assert flagship.separation_ratio <= 1.0


def test_experiment_report_serializes(flagship):
    import json

    text = json.dumps(flagship.to_record())
    assert '"pass": true' in text


def test_growth_family_beyond_exponent_is_refused():
    ifs = sierpinski_gasket()
    with pytest.raises(ValueError, match="1/gamma"):
        run_dynamics_experiment(ifs, power_family(0.9))


def test_single_factor_run_on_the_line():
    line = unit_interval()
    report = run_dynamics_experiment(line, rolewicz_family(), eta=0.1, d=1)
    assert report.passed
    assert report.q == 4
    assert report.config.d == 1


def test_compatible_growth_family_runs_on_the_line():
    line = unit_interval()
    report = run_dynamics_experiment(line, power_family(0.5), eta=0.2)
    assert report.certificate == "uniform"
    assert report.passed


def test_common_vector_certificate_bounds_measurement():
    ifs = sierpinski_gasket()
    rep = run_dynamics_experiment(ifs, rolewicz_family(), eta=0.1)
    cov = build_tagged_covering(ifs, BuilderParams.from_stage(ifs, 1, 1))
    scaled = cov.affine_scaled(rep.sigma, rep.offset)
    cfg = rep.config
    fam = rolewicz_family()
    u0 = FiniteVector.basis(cfg.d, cfg.L, 0, 1.0)
    vt = FiniteVector.from_values(
        np.tile(np.array([1.0, 0.5, 0.25, *([0.0] * (cfg.L - 2))]), (cfg.d, 1))
    )
    env = cs1_envelope_closed_form(
        rep.D_scaled, cfg.interval, 1.0 / ifs.gamma, horizon=cov.q * cfg.bigN
    )
    u, cert = build_common_vector(scaled, fam, cfg, u0, vt, env)
    assert cert["measured_diff"] <= cert["envelope_sum"] * (1.0 + 1e-9)
    assert cert["measured_diff"] == pytest.approx(rep.u_minus_u0, rel=1e-12)


def test_truncation_too_short_is_rejected():
    ifs = sierpinski_gasket()
    cov = build_tagged_covering(ifs, BuilderParams.from_stage(ifs, 1, 1))
    scaled = cov.affine_scaled(0.005, (1.0 - 0.005 * -0.5, 1.0 - 0.005 * -0.28867513459481287))
    cfg = DynamicsConfig(d=2, interval=(1.0, 2.0), L=50, eta=0.1, kappa=3, bigN=6)
    u0 = FiniteVector.basis(2, 50, 0)
    vt = FiniteVector.from_values(np.tile([1.0, 0.5, 0.25] + [0.0] * 48, (2, 1)))
    with pytest.raises(TruncationOverflowError):
        build_common_vector(scaled, rolewicz_family(), cfg, u0, vt)
