from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morreyemb.phi import (
    InvLog,
    LogBlend,
    PhiProduct,
    PiecewisePower,
    Power,
    PowerLog,
    PsiCritical,
    Tabulated,
    dyadic_samples,
    eval_phi,
    log2_dyadic,
    normalize,
    phi_from_json,
    phi_to_json,
    rate_at_zero,
    smallest_intc_epsilon,
    validate_gp,
    validate_intc,
)
from morreyemb.rates import Confidence, RateTerm


def symbolic_menu(d: int):
    return [
        (Power(2, d=d), 2.0),
        (Power(math.inf, d=d), 1.0),
        (PiecewisePower(3, math.inf, d=d), 3.0),
        (PowerLog(2, -1.0, 3.0, d=d), 2.0),
        (InvLog(a=math.e**2, d=d), 2.0 * d),
        (PsiCritical(1, d=d), 1.0),
        (LogBlend(d=d), float(d)),
    ]


# ---------------------------------------------------------------- evaluation


def test_eval_examples():
    assert eval_phi(Power(1), 0.5) == 0.5
    assert eval_phi(LogBlend(), 1.0) == 1.0
    assert eval_phi(InvLog(a=math.e), math.exp(-2)) == pytest.approx(0.5, rel=1e-15)


def test_eval_rejects_non_positive_t():
    with pytest.raises(ValueError):
        eval_phi(Power(2), 0.0)


def test_tabulated_only_at_dyadic_points():
    tab = Tabulated((1.0, 0.5, 0.25))
    assert eval_phi(tab, 0.25) == 0.25
    for t in (0.3, 0.125):
        with pytest.raises(ValueError):
            eval_phi(tab, t)


def test_log2_dyadic_matches_direct_evaluation():
    j = np.arange(0, 30)
    for phi, _ in symbolic_menu(2):
        direct = np.log2(eval_phi(phi, np.exp2(-j.astype(float))))
        assert np.allclose(log2_dyadic(phi, j), direct, rtol=1e-12, atol=1e-12)


# ---------------------------------------------------------------- normalization


def test_normalize_examples():
    assert eval_phi(normalize(Power(3, d=2)), 1.0) == 1.0
    pl = normalize(PowerLog(1, -1.0, 2.0))
    assert pl.scale == pytest.approx(math.log(3.0))
    assert eval_phi(pl, 1.0) == pytest.approx(1.0, rel=1e-15)
    tab = normalize(Tabulated(tuple(7 * x for x in (1.0, 0.5, 0.3))))
    assert tab.samples == pytest.approx((1.0, 0.5, 0.3))


def test_normalize_keeps_rate():
    for phi, _ in symbolic_menu(1):
        assert normalize(phi).rate() == phi.rate()
        assert eval_phi(normalize(phi), 1.0) == pytest.approx(1.0, rel=1e-14)


# ---------------------------------------------------------------- G_p


@pytest.mark.parametrize("u, p", [(2, 2), (4, 2), (4, 1), (math.inf, 0.5)])
def test_power_in_gp_when_p_le_u(u, p):
    assert validate_gp(Power(u), p, 100).ok


def test_steep_power_fails_gp():
    # t**e with e > d/p
    rep = validate_gp(Power.from_exponent(0.75), 2.0, 20)
    assert rep.monotone_ok and not rep.gp_ok
    assert rep.first_violation_level == 1


def test_power_over_log_fails_monotonicity():
    # t**u / log(e + t) with small u decreases near t = 1
    rep = validate_gp(PowerLog(20, -1.0, math.e), 20, 20)
    assert not rep.monotone_ok


def test_gp_rejects_bad_p():
    with pytest.raises(ValueError):
        validate_gp(Power(2), 0.0, 10)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_menu_families_in_gp(d):
    for phi, p in symbolic_menu(d):
        if isinstance(phi, (PsiCritical, LogBlend)) and d != 1 and p > d:
            continue
        assert validate_gp(phi, p, 200).ok, phi


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.sampled_from([0.5, 1.0, 2.0, 3.0]), st.floats(1.0, 8.0), st.integers(0, 4))
def test_doubling_property(d, p, factor, which):
    phi = [Power(p * factor, d=d), PiecewisePower(p * factor, math.inf, d=d),
           InvLog(a=math.e * factor, d=d), PowerLog(p, -factor, 2.0 + factor, d=d), Power(math.inf, d=d)][which]
    if not validate_gp(phi, p, 64).ok:
        return
    x = dyadic_samples(normalize(phi), 64)
    assert np.all(x[1:] <= x[:-1] * (1 + 1e-12))
    assert np.all(x[:-1] <= 2 ** (d / p) * x[1:] * (1 + 1e-12))


# ---------------------------------------------------------------- intc


def test_intc_power_half_exponent():
    for u, d in ((2, 1), (4, 2), (1, 3)):
        rep = validate_intc(Power(u, d=d), d / (2 * u), 64)
        assert rep.ok and rep.constant == pytest.approx(1.0)


def test_intc_follows_definition_for_slowly_varying_weights():
    # t**eps / phi(t) increases in t when phi is constant or of logarithmic size,
    # so the almost-decreasing requirement cannot hold for any eps > 0
    assert validate_intc(Power(math.inf), 0.1, 64).ok is False
    assert validate_intc(InvLog(a=math.e), 0.1, 64).ok is False
    assert smallest_intc_epsilon(InvLog(a=math.e)) is None


def test_intc_smallest_epsilon_and_tabulated_note():
    assert smallest_intc_epsilon(Power(2)) == 1e-3
    tab = Tabulated(tuple(2.0 ** (-j / 2) for j in range(20)), RateTerm(0.5, 0))
    rep = validate_intc(tab, 0.25, 19)
    assert rep.ok and rep.note == "inconclusive beyond J"
    assert validate_intc(Tabulated((1.0, 0.5, 0.25)), 0.25, 2).ok is None


# ---------------------------------------------------------------- rates and samples


def test_rate_examples():
    assert rate_at_zero(Power(4, d=2)) == RateTerm(0.5, 0)
    assert rate_at_zero(InvLog(a=math.e)) == RateTerm(0, -1)
    assert rate_at_zero(PsiCritical(2, d=3)) == RateTerm(1.5, 1)
    assert rate_at_zero(LogBlend()) == RateTerm(1, 0)
    assert rate_at_zero(PowerLog(3, -1, 4, d=2)) == RateTerm(2 / 3, 0)
    assert rate_at_zero(PiecewisePower(2, 5)) == RateTerm(0.5, 0)


def test_tabulated_rate_is_asserted_not_exact():
    tab = Tabulated((1.0, 0.5), RateTerm(1, 0))
    assert tab.rate().confidence is Confidence.ASSERTED
    assert Tabulated((1.0, 0.5)).rate().low


@pytest.mark.parametrize("d", [1, 2])
def test_rate_matches_sampled_slope(d):
    j = np.arange(150, 201)
    for phi, _ in symbolic_menu(d):
        slope = np.polyfit(j, log2_dyadic(phi, j), 1)[0]
        assert abs(slope + phi.rate().beta) <= 0.02, phi


def test_dyadic_samples_examples():
    assert dyadic_samples(Power(1), 2) == pytest.approx([1, 0.5, 0.25])
    assert dyadic_samples(LogBlend(), 1) == pytest.approx([1, math.log(1.5) / math.log(2)])
    assert dyadic_samples(LogBlend(), 1)[1] == pytest.approx(0.584962, abs=1e-6)
    tab = Tabulated((1.0, 0.7, 0.2))
    assert list(dyadic_samples(tab, 2)) == [1.0, 0.7, 0.2]
    assert dyadic_samples(normalize(InvLog(a=10)), 0)[0] == 1.0


def test_product_weight_rate_and_values():
    prod = PhiProduct(((Power(2), 0.5), (PsiCritical(1), 0.5)))
    assert prod.rate() == RateTerm(0.75, 0.5)
    t = 2.0**-7
    assert eval_phi(prod, t) == pytest.approx(math.sqrt(eval_phi(Power(2), t) * eval_phi(PsiCritical(1), t)))


# ---------------------------------------------------------------- serialization


def test_json_round_trip():
    for phi, _ in symbolic_menu(2):
        back = phi_from_json(phi_to_json(phi))
        assert back == phi
    doc = {"family": "tabulated", "samples": [1, 0.5], "rate": {"beta": 1, "gamma": 0}}
    tab = phi_from_json(doc)
    assert tab.rate().confidence is Confidence.ASSERTED
    assert phi_from_json({"family": "power", "u": "inf"}).u == math.inf


def test_json_rejects_unknown_family_and_parameters():
    with pytest.raises(ValueError):
        phi_from_json({"family": "gaussian"})
    with pytest.raises(ValueError):
        phi_from_json({"family": "power", "v": 2})


def test_family_parameter_checks():
    for bad in (lambda: Power(0), lambda: InvLog(a=2.0), lambda: PowerLog(1, 0.5, 2), lambda: Tabulated((1.0, 0.0))):
        with pytest.raises(ValueError):
            bad()
