"""KL machinery and the generalization-bound evaluators.

Closed-form oracle values were computed independently (by hand / direct
arithmetic) and frozen here.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from marginforge.bounds import (
    BoundInputs,
    bound_breiman,
    bound_distribution,
    bound_emargin,
    bound_kth,
    bound_lower,
    bound_new,
    check_corollary2,
    index_schapire,
    kl,
    kl_inverse,
)
from marginforge.margin import MarginProfile, cdf, i_hat, kth_margin, moments

fractions = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


def make_inputs(margins, m=None, h_size=1024, delta=0.05):
    p = MarginProfile.from_values(margins)
    return BoundInputs(m=m or p.m, h_size=h_size, delta=delta, profile=p)


# --- KL ----------------------------------------------------------------------


def test_kl_known_values():
    assert kl(0.5, 0.5) == 0.0
    assert kl(0.25, 0.75) == pytest.approx(0.5 * math.log(3.0), abs=1e-12)
    assert kl(0.25, 0.75) == pytest.approx(0.549306, abs=1e-6)
    # q = 0 convention: first term vanishes.
    assert kl(0.0, 0.3) == pytest.approx(-math.log(0.7), abs=1e-12)
    assert kl(0.0, 0.0) == 0.0
    assert kl(1.0, 1.0) == 0.0


def test_kl_infinities_and_validation():
    assert kl(0.5, 0.0) == math.inf
    assert kl(0.5, 1.0) == math.inf
    assert kl(0.0, 1.0) == math.inf
    with pytest.raises(ValueError):
        kl(-0.1, 0.5)
    with pytest.raises(ValueError):
        kl(0.5, 1.1)


@settings(max_examples=200, deadline=None)
@given(q=fractions, p=fractions)
def test_kl_pinsker_lower_bound(q, p):
    v = kl(q, p)
    assert v >= 2.0 * (q - p) ** 2 - 1e-12


@settings(max_examples=100, deadline=None)
@given(q=fractions)
def test_kl_zero_iff_equal(q):
    assert kl(q, q) == pytest.approx(0.0, abs=1e-15)


def test_kl_inverse_known_values():
    assert kl_inverse(0.3, 0.0) == 0.3  # exact at u = 0
    assert kl_inverse(0.0, math.log(2.0)) == pytest.approx(0.5, abs=1e-12)
    assert kl_inverse(0.0, 1.0) == pytest.approx(1.0 - math.exp(-1.0), abs=1e-12)
    assert kl_inverse(1.0, 5.0) == 1.0
    assert kl_inverse(0.5, 1e6) == 1.0  # saturated


def test_kl_inverse_validation():
    with pytest.raises(ValueError):
        kl_inverse(-0.1, 1.0)
    with pytest.raises(ValueError):
        kl_inverse(0.5, -1.0)


def test_kl_inverse_bisection_self_consistency():
    w = kl_inverse(0.1, 0.05)
    assert abs(kl(0.1, w) - 0.05) <= 1e-10


@settings(max_examples=200, deadline=None)
@given(
    q=st.floats(min_value=0.0, max_value=0.99),
    u=st.floats(min_value=1e-6, max_value=5.0),
)
def test_kl_inverse_roundtrip_property(q, u):
    w = kl_inverse(q, u)
    assert q <= w <= 1.0
    # Very close to 1 the KL curve is so steep that adjacent float64
    # values of w move KL by more than 1e-10; only the flat region can
    # meet the tight tolerance.
    if w < 1.0 - 1e-6:
        assert abs(kl(q, w) - u) <= 1e-10
    elif w < 1.0:
        assert kl(q, w) >= u - 1e-8


@settings(max_examples=100, deadline=None)
@given(
    q=st.floats(min_value=0.0, max_value=0.9),
    u=st.floats(min_value=0.0, max_value=2.0),
    du=st.floats(min_value=0.0, max_value=1.0),
)
def test_kl_inverse_monotone_in_u(q, u, du):
    assert kl_inverse(q, u) <= kl_inverse(q, u + du) + 1e-12


# --- Breiman -----------------------------------------------------------------


def test_breiman_published_style_oracle():
    # m=1000, |H|=1024, delta=0.05, theta1=0.5: R = 32 ln(2048)/250
    # = 0.97595..., total ~ 8.428 (vacuous, reported as-is).
    inputs = make_inputs([0.5], m=1000)
    rep = bound_breiman(inputs)
    assert rep.preconditions_ok
    assert rep.intermediates["R"] == pytest.approx(0.975951, abs=1e-5)
    assert rep.value == pytest.approx(8.428, abs=1e-3)
    assert rep.rigorous


def test_breiman_gate_failure_recorded():
    inputs = make_inputs([0.05], m=1000)  # 0.05 < 4*sqrt(2/1024) = 0.1768
    rep = bound_breiman(inputs)
    assert not rep.preconditions_ok
    assert not rep.rigorous
    assert math.isfinite(rep.value)  # still reported


def test_breiman_nonpositive_min_margin_infinite():
    rep = bound_breiman(make_inputs([-0.2, 0.5], m=100))
    assert rep.value == math.inf
    assert not rep.rigorous


def test_breiman_decreases_in_m():
    a = bound_breiman(make_inputs([0.5], m=1000)).value
    b = bound_breiman(make_inputs([0.5], m=2000)).value
    assert b < a


# --- kth margin --------------------------------------------------------------


def test_kth_value_matches_closed_form():
    inputs = make_inputs([0.3, 0.5, 0.7, 0.9], m=4)
    k = 2
    theta = 0.5
    m, h, delta = 4, 1024, 0.05
    q = (
        8.0 * math.log(2 * h) / theta**2 * math.log(2 * m * m / math.log(h))
        + math.log(h)
        + math.log(m / delta)
    )
    expect = math.log(h) / m + kl_inverse((k - 1) / m, q / m)
    rep = bound_kth(inputs, k)
    assert rep.value == pytest.approx(expect, abs=1e-12)
    assert rep.arg == 2
    assert rep.intermediates["theta"] == 0.5


def test_kth_gate_and_nonpositive_margin():
    inputs = make_inputs([-0.1, 0.6], m=2)
    rep = bound_kth(inputs, 1)
    assert rep.value == math.inf
    assert not rep.preconditions_ok


def test_kth_constant_k_variant_gated_on_m():
    # m = 4k withholds the constant-k companion; m > 4k records it.
    small = make_inputs([0.5, 0.6, 0.7, 0.8], m=4)
    assert "constant_k_value" not in bound_kth(small, 1).intermediates
    big = make_inputs([0.5] * 5, m=5)
    assert "constant_k_value" in bound_kth(big, 1).intermediates


def test_kth_ordering_between_k_values():
    # Much larger 2nd margin shrinks the q-term but pays (k-1)/m in the KL
    # inverse; both values come straight from the closed form.
    inputs = make_inputs([0.1, 0.9] + [0.9] * 98, m=100)
    v1 = bound_kth(inputs, 1)
    v2 = bound_kth(inputs, 2)
    assert math.isfinite(v1.value) and math.isfinite(v2.value)
    assert v2.value < v1.value  # theta jump from 0.1 to 0.9 dominates here


# --- Emargin -----------------------------------------------------------------


def test_emargin_brute_force_grid():
    m, h, delta = 4, 1024, 0.05
    inputs = make_inputs([0.3, 0.5, 0.7, 0.9], m=m, h_size=h, delta=delta)
    from marginforge.margin import emargin_theta

    best = math.inf
    log_h = math.log(h)
    for i in range(m + 1):
        q = i / m
        theta = emargin_theta(inputs.profile, q, h)
        if theta is None:
            continue
        u = (
            8.0 * log_h / theta**2 * math.log(2 * m * m / log_h)
            + log_h
            + math.log(m / delta)
        ) / m
        best = min(best, kl_inverse(q, u))
    rep = bound_emargin(inputs)
    assert rep.value == pytest.approx(log_h / m + best, abs=1e-12)


def test_emargin_dominates_kth_everywhere():
    rng = np.random.default_rng(3)
    for _ in range(5):
        margins = np.sort(rng.uniform(-0.2, 1.0, 30))
        inputs = make_inputs(margins, m=30, h_size=512)
        e = bound_emargin(inputs).value
        for k in range(1, 31):
            if kth_margin(inputs.profile, k) <= 0.0:
                continue
            assert e <= bound_kth(inputs, k).value + 1e-12


def test_emargin_all_inadmissible():
    # Every margin below sqrt(8/|H|) except the vacuous q=1 grid point,
    # which keeps the value finite via theta_hat = 1.
    inputs = make_inputs([0.01, 0.02], m=2, h_size=1024)
    rep = bound_emargin(inputs)
    assert math.isfinite(rep.value)
    assert rep.intermediates["q_grid_minimizer"] == 1.0


def test_emargin_records_kth_infimum_companion():
    inputs = make_inputs([0.4, 0.5, 0.6, 0.7], m=4)
    rep = bound_emargin(inputs)
    assert "kth_infimum_value" in rep.intermediates
    assert 1 <= rep.intermediates["kth_infimum_k"] <= 4


# --- new upper bound (variance-aware) ----------------------------------------


def test_new_bound_closed_form_at_min_margin():
    # The infimum is <= the value of the objective at theta = theta_1,
    # where the CDF term vanishes.
    m, h, delta = 200, 1024, 0.05
    theta1 = 0.5
    inputs = make_inputs([theta1] + [0.8] * (m - 1), m=m)
    mu1 = 8.0 / theta1**2 * math.log(m) * math.log(2 * h) + math.log(2 * h / delta)
    cap = 2.0 / m + (7.0 * mu1 + 3.0 * math.sqrt(2.0 * mu1)) / (3.0 * m)
    rep = bound_new(inputs)
    assert rep.value <= cap + 1e-12


def test_new_bound_degenerate_profile_theta_one():
    inputs = make_inputs([1.0] * 50, m=50)
    rep = bound_new(inputs)
    assert rep.arg == 1.0
    # CDF term is zero at theta = 1 for an all-ones profile.
    assert cdf(inputs.profile, 1.0, strict=True) == 0.0


def test_new_bound_decreases_in_m():
    vals = [
        bound_new(make_inputs([0.5] * 10, m=m)).value for m in (100, 400, 1600)
    ]
    assert vals[0] > vals[1] > vals[2]


def test_new_bound_requires_m_at_least_4():
    with pytest.raises(ValueError):
        bound_new(make_inputs([0.5, 0.5], m=2))


# --- corollary-2 executable theorem -------------------------------------------


def test_corollary2_reference_point():
    inputs = make_inputs([0.5] * 1000, m=1000)
    verdict = check_corollary2(inputs)
    assert verdict.preconditions_ok
    assert verdict.inequality_holds
    assert verdict.breiman_value == pytest.approx(8.428, abs=1e-3)
    assert verdict.new_value <= verdict.breiman_value


def test_corollary2_gate_failure_makes_no_claim():
    inputs = make_inputs([0.05] * 100, m=100)
    verdict = check_corollary2(inputs)
    assert not verdict.preconditions_ok


def test_corollary2_nonpositive_margin():
    verdict = check_corollary2(make_inputs([-0.5, 0.5], m=100))
    assert not verdict.preconditions_ok
    assert verdict.inequality_holds  # vacuous


# --- lower bound --------------------------------------------------------------


def test_lower_bound_all_positive_margins_zero():
    rep = bound_lower(make_inputs([0.2, 0.4, 0.6, 0.8], m=4))
    assert rep.value == 0.0
    assert rep.intermediates["raw_value"] <= 0.0


def test_lower_bound_balanced_extreme_profile():
    m = 20000
    margins = [-0.9] * (m // 2) + [0.9] * (m // 2)
    rep = bound_lower(make_inputs(margins, m=m, h_size=64))
    # Pr[yf < -theta] = 0.5 just below 0.9; penalties shrink with m.
    assert 0.25 < rep.value < 0.5


def test_lower_bound_below_new_bound():
    rng = np.random.default_rng(11)
    for _ in range(5):
        margins = rng.uniform(-1.0, 1.0, 40)
        inputs = make_inputs(margins, m=40)
        assert bound_lower(inputs).value <= bound_new(inputs).value + 1e-12


# --- distribution bound --------------------------------------------------------


def test_distribution_bound_term_by_term():
    m, h, delta = 4, 1024, 0.05
    inputs = make_inputs([0.2, 0.4, 0.6, 0.8], m=m, h_size=h, delta=delta)
    rep = bound_distribution(inputs)
    theta = rep.arg
    avg, _ = moments(inputs.profile)
    mu = 144.0 * math.log(m) * math.log(2 * h) / theta**2 + math.log(2 * h / delta)
    expect = (
        1.0 / m**50
        + cdf(inputs.profile, theta, strict=True)
        + math.sqrt(6.0 * mu) / m**1.5
        + 7.0 * mu / (3.0 * m)
        + math.sqrt(2.0 * mu / m * i_hat(inputs.profile, theta))
        + math.exp(-2.0 * math.log(m) / (1.0 - avg * avg + theta / 9.0))
    )
    assert rep.value == pytest.approx(expect, abs=1e-12)
    assert set(rep.intermediates["summands"]) == {
        "cdf",
        "sqrt_mu",
        "linear_mu",
        "spread",
        "exp",
    }


def test_distribution_exponential_term_monotone_in_average():
    # Larger average margin (squared) shrinks the exponential summand.
    theta, m = 0.5, 100
    exps = [
        math.exp(-2.0 * math.log(m) / (1.0 - a * a + theta / 9.0))
        for a in (0.0, 0.5, 0.9)
    ]
    assert exps[0] > exps[1] > exps[2]


# --- schapire index -------------------------------------------------------------


def test_index_schapire_flagged_non_rigorous():
    inputs = make_inputs([0.5] * 100, m=100)
    rep = index_schapire(inputs, 0.5)
    assert not rep.rigorous
    with pytest.raises(ValueError):
        index_schapire(inputs, 0.0)


def test_index_schapire_sqrt_m_scaling():
    # Quadrupling m halves the penalty once the bracket (which carries its
    # own ln m) is divided out; the CDF term is 0 below theta = 0.5.
    theta, h, delta = 0.5, 1024, 0.05
    pen = {}
    for m in (100, 400):
        inputs = make_inputs([0.9] * m, m=m, h_size=h, delta=delta)
        bracket = math.log(m) * math.log(h) / theta**2 + math.log(1.0 / delta)
        pen[m] = index_schapire(inputs, theta).value / math.sqrt(bracket)
    assert pen[400] == pytest.approx(pen[100] / 2.0, rel=1e-9)


def test_scaling_rates_new_vs_index():
    # log-log slope across m in {1e2, 1e3, 1e4}: the index decays roughly
    # like m^-0.5, the variance-aware bound roughly like ln(m)/m; both pick
    # up a small +1/(2 ln m)-ish correction from the logarithmic factors.
    ms = [100, 1000, 10000]
    idx, new = [], []
    for m in ms:
        inputs = make_inputs([0.9] * 100, m=m)
        idx.append(index_schapire(inputs, 0.5).value)
        new.append(bound_new(inputs).value)
    slope = lambda v: (math.log(v[2]) - math.log(v[0])) / (
        math.log(ms[2]) - math.log(ms[0])
    )
    assert slope(idx) == pytest.approx(-0.5, abs=0.12)
    assert slope(new) == pytest.approx(-1.0, abs=0.2)
