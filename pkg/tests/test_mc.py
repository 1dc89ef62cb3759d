"""Thermal-average estimator: oracles, invariances, and failure modes.

The beta = 0 limit has closed-form sphere moments, the enumerated
product-form model has hand-checkable values, and the estimator carries
three structural invariances worth pinning: worker-count independence,
additive-constant cancellation in the weight exponent, and the analytic
spin-flip symmetrization that zeroes the signed magnetization.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from squimld import (
    DegenerateWeights,
    EnsembleConfig,
    EsmResult,
    InvalidParams,
    McEstimate,
    esm_evaluate,
    infinite_T_msq_exact,
    thermal_average,
)
from squimld.ensembles import chain_tables, g_values
from squimld.mc import MODELS, OBSERVABLES


def test_config_validation():
    ok = EnsembleConfig(N=8, beta=1.0, model="SCWM", samples=100)
    assert ok.shards >= 1
    with pytest.raises(InvalidParams):
        EnsembleConfig(N=8, beta=1.0, model="XXX", samples=100)
    with pytest.raises(InvalidParams):
        EnsembleConfig(N=1, beta=1.0, model="SCWM", samples=100)
    with pytest.raises(InvalidParams):
        EnsembleConfig(N=25, beta=1.0, model="SQUIM_d1", samples=100)
    with pytest.raises(InvalidParams):
        EnsembleConfig(N=8, beta=-1.0, model="SCWM", samples=100)
    with pytest.raises(InvalidParams):
        EnsembleConfig(N=8, beta=1.0, model="SCWM", samples=0)
    with pytest.raises(InvalidParams):
        EnsembleConfig(N=8, beta=1.0, model="SCWM_WFE", samples=100)  # omega missing
    with pytest.raises(InvalidParams):
        EnsembleConfig(N=8, beta=1.0, model="SCWM", samples=100, omega=1.2)
    with pytest.raises(InvalidParams):
        EnsembleConfig(N=8, beta=1.0, model="SCWM", samples=100, eps=1.5)
    with pytest.raises(InvalidParams):
        EnsembleConfig(N=8, beta=1.0, model="SCWM", samples=100, seed=-1)
    with pytest.raises(InvalidParams):
        EnsembleConfig(N=8, beta=1.0, model="SCWM", samples=100, workers=0)


def test_estimate_validation():
    with pytest.raises(InvalidParams):
        McEstimate(mean=0.1, std_error=-1.0, n_samples=10, numerator_ess=5.0)
    with pytest.raises(InvalidParams):
        McEstimate(mean=0.1, std_error=0.1, n_samples=0, numerator_ess=5.0)


def test_unknown_observable_rejected():
    cfg = EnsembleConfig(N=4, beta=0.0, model="SCWM", samples=1000)
    with pytest.raises(InvalidParams):
        thermal_average(cfg, "energy")


def test_infinite_t_exact_values():
    # N = 2: d = 6 coordinates, (c1 - c2) sum g^2 = (4/48) * 2 = 1/6
    assert infinite_T_msq_exact(2) == pytest.approx(1.0 / 6.0, abs=1e-15)
    g = g_values(8)
    assert infinite_T_msq_exact(8) == pytest.approx(
        float(g @ g) / (9.0 * 10.0), abs=1e-15
    )
    with pytest.raises(InvalidParams):
        infinite_T_msq_exact(1)


@pytest.mark.parametrize("n_spins", [2, 8, 32])
def test_beta_zero_matches_sphere_moments(n_spins):
    cfg = EnsembleConfig(N=n_spins, beta=0.0, model="SCWM", samples=200_000, seed=11)
    est = thermal_average(cfg, "msq")
    exact = infinite_T_msq_exact(n_spins)
    assert abs(est.mean - exact) < 3.0 * est.std_error
    assert est.std_error > 0.0
    # uniform weights at beta = 0: the numerator ESS is samples/(1 + CV^2)
    # of the observable itself, far above any weight-collapse level
    assert est.numerator_ess > 0.2 * cfg.samples


def test_beta_zero_brute_force_cross_check():
    # independent route: raw normalized Gaussians, no simplex shortcut
    n_spins = 2
    rng = np.random.default_rng(42)
    g = g_values(n_spins)
    z = rng.standard_normal((200_000, 2 * (n_spins + 1)))
    w = z[:, ::2] ** 2 + z[:, 1::2] ** 2
    w /= w.sum(axis=1, keepdims=True)
    msq = (w @ g) ** 2
    se = float(msq.std(ddof=1)) / math.sqrt(msq.size)
    assert abs(float(msq.mean()) - 1.0 / 6.0) < 3.0 * se


def test_squim_chain_beta_zero_oracle():
    # flat Dirichlet over K = 2^N cells: [m^2] = sum g^2 / (K (K+1))
    n_spins = 2
    cfg = EnsembleConfig(N=n_spins, beta=0.0, model="SQUIM_d1", samples=200_000, seed=7)
    est = thermal_average(cfg, "msq")
    assert abs(est.mean - 0.1) < 3.0 * est.std_error


def test_entropy_weighting_shifts_mass_to_center():
    # binomial weights favor the m ~ 0 classes, lowering [m^2] below uniform
    plain = thermal_average(
        EnsembleConfig(N=8, beta=0.0, model="SCWM", samples=100_000, seed=3), "msq"
    )
    tilted = thermal_average(
        EnsembleConfig(N=8, beta=0.0, model="SCWM_ENTROPY", samples=100_000, seed=3),
        "msq",
    )
    gap_se = math.hypot(plain.std_error, tilted.std_error)
    assert plain.mean - tilted.mean > 3.0 * gap_se


def test_heating_raises_msq_for_scwm():
    # the exponent exp(-beta N (1 - m^2)) rewards aligned states
    cold = thermal_average(
        EnsembleConfig(N=8, beta=40.0, model="SCWM", samples=100_000, seed=5), "msq"
    )
    hot = thermal_average(
        EnsembleConfig(N=8, beta=0.0, model="SCWM", samples=100_000, seed=5), "msq"
    )
    assert cold.mean - hot.mean > 3.0 * math.hypot(cold.std_error, hot.std_error)


def test_wfe_exceeds_plain_at_low_temperature():
    # paired seeds: the wavefunction-energy correction pushes [m^2] up
    kw = dict(N=8, beta=40.0, samples=100_000, seed=7)
    plain = thermal_average(EnsembleConfig(model="SCWM", **kw), "msq")
    wfe = thermal_average(EnsembleConfig(model="SCWM_WFE", omega=1.2, **kw), "msq")
    assert wfe.mean - plain.mean > 3.0 * math.hypot(wfe.std_error, plain.std_error)


def test_worker_count_is_an_execution_detail():
    cfg1 = EnsembleConfig(N=8, beta=40.0, model="SCWM", samples=60_000, seed=9, workers=1)
    cfg2 = EnsembleConfig(N=8, beta=40.0, model="SCWM", samples=60_000, seed=9, workers=2)
    for obs in ("msq", "dispersion"):
        assert thermal_average(cfg1, obs) == thermal_average(cfg2, obs)


def test_energy_shift_cancels():
    cfg = EnsembleConfig(N=8, beta=12.0, model="SCWM", samples=50_000, seed=4)
    base = thermal_average(cfg, "msq")
    shifted = thermal_average(cfg, "msq", energy_shift=7.3)
    assert abs(shifted.mean - base.mean) < 1e-10
    assert abs(shifted.std_error - base.std_error) < 1e-10


def test_signed_magnetization_is_identically_zero():
    cfg = EnsembleConfig(N=8, beta=15.0, model="SCWM", samples=20_000, seed=1)
    est = thermal_average(cfg, "m_signed")
    assert est.mean == 0.0
    assert est.std_error == 0.0


def test_magnetized_fraction_monotone_in_threshold():
    means = []
    for eps in (0.0, 0.2, 0.5, 0.9):
        cfg = EnsembleConfig(
            N=8, beta=8.0, model="SCWM", samples=50_000, seed=4, eps=eps
        )
        means.append(thermal_average(cfg, "magnetized_fraction").mean)
    assert means[0] == 1.0
    assert all(a >= b for a, b in zip(means, means[1:]))


def test_degenerate_weights_guard():
    cfg = EnsembleConfig(
        N=32, beta=40.0, model="SCWM_WFE", omega=1.2, samples=20_000, seed=0
    )
    with pytest.raises(DegenerateWeights):
        thermal_average(cfg, "msq")


def test_observable_tuple_is_public():
    assert set(OBSERVABLES) == {"msq", "m_abs", "magnetized_fraction", "dispersion"}
    assert set(MODELS) == {"SQUIM_d1", "SCWM", "SCWM_WFE", "SCWM_ENTROPY"}


# ---------------------------------------------------------------------------
# enumerated product-form model
# ---------------------------------------------------------------------------


def test_esm_hand_values():
    res = esm_evaluate(2, 1.0)
    assert res.logZhat == pytest.approx(2.0 * math.log(8.0 / 9.0), abs=1e-14)
    assert res.msq_dispersion == pytest.approx(1.0 / 32.0, abs=1e-16)


def test_esm_dispersion_decreases_with_n():
    v8 = esm_evaluate(8, 1.0).msq_dispersion
    v16 = esm_evaluate(16, 1.0).msq_dispersion
    assert 0.0 < v16 < v8


def test_esm_beta_zero_is_flat():
    # at beta = 0 every factor is 1, so log Zhat
    # vanishes and the dispersion term is the bare sum of M^2 over a^2
    res = esm_evaluate(5, 0.0)
    assert res.logZhat == 0.0
    m_conf, _, _ = chain_tables(5)
    a = 2.0 * 2**5
    assert res.msq_dispersion == pytest.approx(float(np.sum(m_conf**2)) / a**2)


@given(st.integers(min_value=2, max_value=12), st.floats(min_value=0.0, max_value=50.0))
@settings(max_examples=60)
def test_esm_structural_bounds(n_spins, beta):
    res = esm_evaluate(n_spins, beta)
    # every factor of Zhat is 1/(1 + nonnegative), so log Zhat <= 0
    assert res.logZhat <= 0.0
    # denominators >= 1 can only shrink the beta = 0 dispersion
    assert 0.0 < res.msq_dispersion <= esm_evaluate(n_spins, 0.0).msq_dispersion


def test_esm_guards():
    with pytest.raises(InvalidParams):
        esm_evaluate(1, 1.0)
    with pytest.raises(InvalidParams):
        esm_evaluate(2, -1.0)
    with pytest.raises(InvalidParams):
        EsmResult(logZhat=0.0, msq_dispersion=-0.1, N=2, beta=1.0)
