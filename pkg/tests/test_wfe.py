"""Transition-bound pipeline: parabola weights, dual, and the rare event.

p(theta) has a direct quadrature oracle, the Legendre dual obeys the
pointwise inequality p*(y) >= theta*y - p(theta) for every admissible
probe theta, and the tilted rare-event estimator is cross-checked against
brute-force simulation at sizes where the event is still common enough to
count directly.  The headline values at (omega, eps) = (1.2, 0.1) are
frozen to the digits reproduced by the golden searches.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from squimld import (
    HypothesisViolation,
    InvalidParams,
    OutOfThetaRange,
    WfeParams,
    admissibility_bound,
    beta_critical,
    check_hypotheses,
    p_star,
    p_star_inf,
    p_theta,
    rare_event_rate_mc,
)
from squimld.wfe import (
    a_extremes,
    a_of_x,
    grid_weights,
    psi_weighted,
    solve_tilt,
    theta_range,
    x_lower_root,
)

P12 = WfeParams(omega=1.2, eps=0.1)


def test_admissibility_bound_value():
    # r = 1/6, bound = (1 + sqrt(1/3))^2 / 4, approximately 0.622
    assert admissibility_bound(1.2) == pytest.approx(0.6220084679281462, abs=1e-12)
    assert abs(admissibility_bound(1.2) - 0.622) < 5e-4


def test_check_hypotheses_regions():
    assert check_hypotheses(1.2, 0.1)
    assert check_hypotheses(1.2, 0.1, delta=0.05)
    assert not check_hypotheses(1.0, 0.1)
    assert not check_hypotheses(4.0 / 3.0, 0.1)
    assert not check_hypotheses(1.5, 0.1)
    assert not check_hypotheses(1.2, 0.7)
    assert not check_hypotheses(1.2, 0.0)
    assert not check_hypotheses(1.2, 0.1, delta=-1.0)


def test_params_validation_and_defaults():
    assert P12.r == pytest.approx(1.0 / 6.0)
    assert P12.delta == 0.1  # saturation default delta = eps
    assert WfeParams(omega=1.2, eps=0.1, delta=0.03).delta == 0.03
    with pytest.raises(HypothesisViolation):
        WfeParams(omega=1.0, eps=0.1)
    with pytest.raises(HypothesisViolation):
        WfeParams(omega=1.4, eps=0.1)
    with pytest.raises(HypothesisViolation):
        WfeParams(omega=1.2, eps=0.9)
    with pytest.raises(HypothesisViolation):
        WfeParams(omega=1.2, eps=0.1, delta=0.0)


def test_parabola_extremes():
    a_min, a_max, x_at_max, a_max_line = a_extremes(P12)
    # vertex sqrt(delta)/(2r) = 3 sqrt(0.1) < 1 sits inside the interval,
    # so the interval max equals the whole-line max delta(4-3w)/(4(w-1))
    assert x_at_max == pytest.approx(3.0 * math.sqrt(0.1))
    assert a_max == pytest.approx(0.05, abs=1e-15)
    assert a_max == pytest.approx(a_max_line, abs=1e-15)
    assert a_min == pytest.approx(a_of_x(-1.0, P12))
    assert a_min < 0.0 < a_max
    xs = np.linspace(-1.0, 1.0, 2001)
    vals = a_of_x(xs, P12)
    assert float(vals.max()) <= a_max + 1e-12
    assert float(vals.min()) >= a_min - 1e-12


def test_lower_root_is_a_zero_inside_the_interval():
    x0 = x_lower_root(P12)
    assert 0.0 < x0 < 1.0
    assert a_of_x(x0, P12) == pytest.approx(0.0, abs=1e-14)


def test_theta_range_brackets_zero():
    lo, hi = theta_range(P12)
    assert lo < 0.0 < hi
    assert hi == pytest.approx(10.0)  # 1/(2 * 0.05)


def test_p_theta_oracle_and_guards():
    assert p_theta(0.0, P12) == 0.0
    xs = np.linspace(-1.0, 1.0, 400_001)
    for theta in (-0.5, 1.0, 6.0):
        ref = -0.25 * float(
            np.trapezoid(np.log1p(-2.0 * theta * a_of_x(xs, P12)), xs)
        )
        assert p_theta(theta, P12) == pytest.approx(ref, abs=1e-9)
    with pytest.raises(OutOfThetaRange):
        p_theta(10.0, P12)
    with pytest.raises(OutOfThetaRange):
        p_theta(-2.0, P12)


def test_p_theta_is_convex_on_probes():
    thetas = np.linspace(-0.6, 8.0, 25)
    vals = [p_theta(float(t), P12) for t in thetas]
    second = np.diff(vals, 2)
    assert np.all(second > -1e-10)


@given(st.floats(min_value=0.01, max_value=5.0), st.floats(min_value=-0.8, max_value=9.5))
@settings(max_examples=20, deadline=None)
def test_dual_dominates_every_probe(y, theta):
    # p*(y) = sup_theta {theta y - p(theta)} can never fall below one probe
    assert p_star(y, P12) >= theta * y - p_theta(theta, P12) - 1e-7


def test_dual_is_convex_in_y():
    ys = np.geomspace(0.05, 20.0, 12)
    vals = np.array([p_star(float(y), P12) for y in ys])
    # convexity in y (checked on chords, robust to the 1e-8 solver tol)
    for i in range(1, len(ys) - 1):
        lam = (ys[i] - ys[i - 1]) / (ys[i + 1] - ys[i - 1])
        chord = (1.0 - lam) * vals[i - 1] + lam * vals[i + 1]
        assert vals[i] <= chord + 1e-6


def test_p_star_inf_frozen_value():
    res = p_star_inf(P12)
    assert res.p_star_inf == pytest.approx(0.34076375319859581, abs=1e-8)
    # the infimum over y > 0 is approached at the small end of the bracket
    assert res.y_at_inf == pytest.approx(1e-4, rel=0.5)
    assert res.theta_range[0] < 0.0 < res.theta_range[1]


def test_beta_critical_frozen_value():
    res, beta_c = beta_critical(P12)
    assert beta_c == pytest.approx(17.038187659929793, abs=1e-6)
    assert beta_c == pytest.approx(res.p_star_inf / 0.02, rel=1e-12)


def test_beta_critical_rejects_nonpositive_parabola():
    # delta large pushes the lower root of A past 1: A <= 0 on [0, 1]
    bad = WfeParams(omega=1.2, eps=0.1, delta=3.0)
    with pytest.raises(HypothesisViolation):
        beta_critical(bad)


# ---------------------------------------------------------------------------
# weighted chi-square rare event
# ---------------------------------------------------------------------------


def test_grid_weights_shape_and_values():
    b = grid_weights(P12, 10)
    assert b.shape == (11,)
    assert b[0] == pytest.approx(a_of_x(1.0, P12))
    assert b[-1] == pytest.approx(a_of_x(-1.0, P12))
    assert float(b.max()) > 0.0 > float(b.sum())


def test_solve_tilt_zeroes_the_derivative():
    b = grid_weights(P12, 50)
    t = solve_tilt(b)
    assert 0.0 < t < 1.0 / (2.0 * float(b.max()))
    step = 1e-7
    dpsi = (psi_weighted(b, t + step) - psi_weighted(b, t - step)) / (2.0 * step)
    assert abs(dpsi) < 1e-4
    assert psi_weighted(b, 0.0) == 0.0


def test_rare_event_matches_brute_force_when_countable():
    # at N = 6 the event still has probability ~1.6e-2, countable directly
    n_sites = 6
    b = grid_weights(P12, n_sites)
    rng = np.random.default_rng(77)
    total = 1_000_000
    z = rng.standard_normal((total, b.size))
    hits = int(np.count_nonzero((z * z) @ b >= 0.0))
    p_bf = hits / total
    se_bf = math.sqrt(p_bf * (1.0 - p_bf) / total)
    res = rare_event_rate_mc(P12, n_sites=n_sites, replicas=200_000, seed=1)
    assert abs(math.exp(res.log_p) - p_bf) < 4.0 * se_bf
    assert res.hits > 0
    assert res.replicas == 200_000


def test_rare_event_is_deterministic_across_workers():
    a = rare_event_rate_mc(P12, n_sites=40, replicas=50_000, seed=3, workers=1)
    b = rare_event_rate_mc(P12, n_sites=40, replicas=50_000, seed=3, workers=2)
    assert a == b


def test_rare_event_rejects_bad_budget():
    with pytest.raises(InvalidParams):
        rare_event_rate_mc(P12, n_sites=10, replicas=0)
