from __future__ import annotations

import itertools
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morreyemb.indices import Tri
from morreyemb.phi import InvLog, LogBlend, PiecewisePower, Power, PowerLog, PsiCritical, Tabulated
from morreyemb.rates import RateTerm
from morreyemb.verdict import (
    InvariantViolation,
    Scale,
    SpaceSpec,
    Verdict,
    decide,
    decide_b,
    decide_b_sup_target,
    decide_e,
    decide_morrey,
    decide_n,
    decide_n_classical,
    decide_special,
)

INF = math.inf
Y, N, U = Tri.YES, Tri.NO, Tri.UNKNOWN


def nsp(s, phi, p, q=INF, d=1):
    return SpaceSpec(Scale.N, s, p, q, phi, d)


def bsp(s, phi, p, q=INF, d=1):
    return SpaceSpec(Scale.B, s, p, q, phi, d)


def pair(v: Verdict):
    return v.continuous, v.compact


def tau_weight(p, tau, d=1):
    return Power.from_exponent(d * (1 / p - tau), d)


# ---------------------------------------------------------------- SpaceSpec and Verdict


def test_spacespec_validation():
    with pytest.raises(ValueError):
        nsp(0, Power(1), 2)  # t**1 is not in G_2
    with pytest.raises(ValueError):
        SpaceSpec(Scale.N, 0, 2, 2, None)
    with pytest.raises(ValueError):
        SpaceSpec(Scale.LR, r=0.5)
    with pytest.raises(ValueError):
        nsp(0, Power(2, d=2), 2, d=1)


def test_spacespec_json_round_trip():
    spec = nsp(0.5, PsiCritical(1, d=2), 1, 2, d=2)
    doc = json.loads(json.dumps(spec.to_json()))
    assert SpaceSpec.from_json(doc) == spec


def test_verdict_refuses_compact_without_continuity():
    with pytest.raises(InvariantViolation):
        Verdict(Tri.NO, Tri.YES)


# ---------------------------------------------------------------- N scale


def test_decide_n_classical_compact_example():
    v = decide_n(nsp(1, Power(2), 1), nsp(0, Power(4), 2))
    assert pair(v) == (Y, Y)
    assert "comp-class_new" in v.rules
    assert v.trace["xi_rate"].beta == pytest.approx(0.75)


def test_identity_is_continuous_not_compact():
    for phi, p in ((Power(2), 2), (InvLog(a=10), 2), (PsiCritical(1), 1)):
        for q in (0.5, 2, INF):
            assert pair(decide_n(nsp(0.3, phi, p, q), nsp(0.3, phi, p, q))) == (Y, N)


def test_invlog_pair_compact_below_source_smoothness():
    w = InvLog(a=10)
    assert pair(decide_n(nsp(0.5, w, 2, 1), nsp(0.25, w, 2, 2))) == (Y, Y)


def test_low_confidence_rates_give_unknown():
    tab = Tabulated(tuple(2.0 ** (-j / 2) for j in range(65)))
    assert pair(decide_n(nsp(1, tab, 2), nsp(0, tab, 2))) == (U, U)


# ---------------------------------------------------------------- classical oracle


def test_classical_equality_with_q_nesting():
    # u1/u2 >= rho, threshold 0, s1 = s2, q1 <= q2
    assert pair(decide_n_classical(0, 2, 2, 1, 0, 2, 2, 2, 1)) == (Y, N)


def test_classical_q_nesting_fails():
    assert decide_n_classical(0, 2, 2, 2, 0, 2, 2, 1, 1).continuous is N


def test_classical_second_case_equality_needs_q_nesting():
    # d = 2, p1 = p2 = 1, u1 = 1, u2 = 4: u1/u2 < rho and s1 - s2 = 2 (1/u1 - 1/u2)
    v = decide_n_classical(1.5, 1, 1, 2, 0, 4, 1, 1, 2)
    assert v.trace["case"] == "u1/u2<rho"
    assert v.continuous is N
    assert decide_n_classical(1.5, 1, 1, 1, 0, 4, 1, 2, 2).continuous is Y


def test_classical_rejects_bad_parameters():
    with pytest.raises(ValueError):
        decide_n_classical(0, 1, 2, 1, 0, 2, 2, 1, 1)


def test_decide_n_matches_classical_on_sample():
    vals = (0.5, 1.0, 2.0, 4.0)
    up = [(u, p) for u in vals for p in vals if p <= u]
    for (u1, p1), (u2, p2) in itertools.product(up, up):
        for q1, q2 in ((0.5, INF), (2, 1)):
            for s2 in (-1.0, -0.5, 0.0, 0.25, 1.0):
                a = decide_n(nsp(0, Power(u1, d=2), p1, q1, 2), nsp(s2, Power(u2, d=2), p2, q2, 2))
                b = decide_n_classical(0, u1, p1, q1, s2, u2, p2, q2, 2)
                assert pair(a) == pair(b)


def test_chains_never_contradict_direct_verdicts():
    vals = (1.0, 2.0, 4.0)
    specs = [nsp(s, Power(u), p, q) for u in vals for p in vals if p <= u for s in (-1, 0, 1) for q in (1, INF)]
    bad = 0
    for a, b, c in itertools.product(specs[::3], specs[1::3], specs[2::3]):
        if decide_n(a, b).continuous is Y and decide_n(b, c).continuous is Y:
            bad += decide_n(a, c).continuous is N
        if decide_n(a, b).compact is Y and decide_n(b, c).continuous is Y:
            bad += decide_n(a, c).compact is N
    assert bad == 0


menu_n = st.sampled_from([
    (Power(2), 2.0), (Power(4), 2.0), (Power(INF), 1.0), (InvLog(a=10), 2.0),
    (PsiCritical(1), 1.0), (LogBlend(), 1.0), (PowerLog(2, -1, 3), 2.0), (PiecewisePower(1, INF), 1.0),
])
qs = st.sampled_from([0.5, 1.0, 2.0, INF])


@settings(max_examples=150, deadline=None)
@given(menu_n, menu_n, st.floats(-2, 2), st.floats(-2, 2), st.floats(0.05, 2), qs, qs)
def test_continuity_monotone_in_target_smoothness(w1, w2, s1, s2, drop, q1, q2):
    src = nsp(s1, w1[0], w1[1], q1)
    v_hi = decide_n(src, nsp(s2, w2[0], w2[1], q2))
    v_lo = decide_n(src, nsp(s2 - drop, w2[0], w2[1], q2))
    if v_hi.continuous is Y:
        assert v_lo.continuous is Y
    if v_hi.compact is Y:
        assert v_lo.compact is Y
    for v in (v_hi, v_lo):
        assert v.compact is not Y or v.continuous is Y


# ---------------------------------------------------------------- b scale


def test_decide_b_tau_grid_both_rows():
    d = 1
    for p1, p2 in itertools.product((1.0, 2.0, 4.0), repeat=2):
        rho = min(1.0, p1 / p2)
        for t1, t2 in itertools.product((0.0, 0.1, 0.3), repeat=2):
            if t1 >= 1 / p1 or t2 >= 1 / p2:
                continue
            if p1 >= p2:
                crit = d * max(0.0, 1 / p1 - t1 - 1 / p2 + t2)
            elif t2 >= rho * t1:
                crit = d * (1 / p1 - t1 - 1 / p2 + t2)
            else:
                crit = d * (1 - rho) * (1 / p1 - t1)
            src = bsp(0.0, tau_weight(p1, t1), p1, 2)
            for off in (0.3, 0.05):
                inside = decide_b(src, bsp(-crit - off, tau_weight(p2, t2), p2, 2))
                outside = decide_b(src, bsp(-crit + off, tau_weight(p2, t2), p2, 2))
                assert inside.compact is Y, (p1, p2, t1, t2)
                assert outside.compact is N, (p1, p2, t1, t2)


def test_decide_b_equal_smoothness_never_compact():
    for w1, p1, w2, p2 in ((Power(2), 2, Power(2), 2), (PsiCritical(1), 1, Power(2), 2), (InvLog(a=10), 2, Power(2), 1)):
        v = decide_b(bsp(0.4, w1, p1, 1), bsp(0.4, w2, p2, 2))
        assert v.compact is N


def test_decide_b_p1_ge_p2_continuity_iff():
    src = bsp(0.5, Power(2), 2, 2)
    assert pair(decide_b(src, bsp(0.5, Power(2), 2, 1))) == (N, N)
    assert pair(decide_b(src, bsp(0.5, Power(2), 2, 2))) == (Y, N)
    assert pair(decide_b(src, bsp(0.6, Power(2), 2, 2))) == (N, N)


def test_decide_b_psi_source_power_target_compact():
    # the ratio Power(2) / Psi**(1/2) decays like j**(-1/2); compactness follows from s2 < sigma
    src = bsp(1.0, PsiCritical(1), 1, 2)
    sig = 1.0 - 0.5 * 1.0
    v = decide_b(src, bsp(sig - 0.1, Power(2), 2, 2))
    assert pair(v) == (Y, Y)
    assert "cor-5.1" in v.rules


def test_decide_b_sufficiency_gap_is_unknown():
    # p1 < p2 with q1 > rho q2: the sufficient conditions do not apply at s2 = sigma
    src = bsp(1.0, Power(1), 1, INF)
    v = decide_b(src, bsp(0.5, Power(2), 2, 2))
    assert v.continuous is U


# ---------------------------------------------------------------- sup-type target


def test_sup_target_psi_compact_at_equality():
    d, p, s1 = 1, 1.0, 1.0
    src = bsp(s1, PsiCritical(p), p, 2)
    assert pair(decide_b_sup_target(src, s1 - d / p)) == (Y, Y)
    assert pair(decide_b_sup_target(src, s1 - d / p + 0.01)) == (N, N)


def test_sup_target_power_classical():
    src = bsp(1.0, Power(2), 2, 2)
    assert pair(decide_b_sup_target(src, 0.5)) == (Y, N)
    assert pair(decide_b_sup_target(src, 0.4)) == (Y, Y)
    assert pair(decide_b_sup_target(src, 0.6)) == (N, N)


def test_sup_target_invlog():
    src = bsp(0.5, InvLog(a=10), 2, 2)
    assert pair(decide_b_sup_target(src, 0.4)) == (Y, Y)
    # 1/phi grows like j at the critical index, so even continuity fails there
    v = decide_b_sup_target(src, 0.5)
    assert pair(v) == (N, N)
    assert "single-cube-necessity" in v.rules


def test_sup_target_via_dispatcher():
    src = bsp(1.0, Power(2), 2, 2)
    tgt = SpaceSpec(Scale.CLASSICAL_BESOV, 0.4, INF, INF)
    assert pair(decide(src, tgt)) == (Y, Y)


# ---------------------------------------------------------------- E scale


def esp(s, phi, p, q, d=1):
    return SpaceSpec(Scale.E, s, p, q, phi, d)


def test_decide_e_examples():
    assert pair(decide_e(esp(1, Power(2), 1, 2), esp(0, Power(4), 2, 2))) == (Y, Y)
    assert pair(decide_e(esp(0, Power(2), 2, 2), esp(0.1, Power(2), 2, 2))) == (N, N)
    assert pair(decide_e(esp(0, Power(2), 2, 2), esp(0, Power(2), 2, 2))) == (U, U)


def test_decide_e_requires_intc_for_finite_q():
    with pytest.raises(ValueError):
        decide_e(esp(0, InvLog(a=10), 2, 2), esp(-1, InvLog(a=10), 2, 2))
    v = decide_e(esp(0, InvLog(a=10), 2, INF), esp(-1, InvLog(a=10), 2, INF))
    assert pair(v) == (Y, Y)


# ---------------------------------------------------------------- Morrey


def test_decide_morrey_examples():
    assert pair(decide_morrey(Power(2), 2, Power(2), 1.5)) == (Y, N)
    assert pair(decide_morrey(Power(4), 2, Power(2), 2)) == (Y, N)
    assert pair(decide_morrey(Power(2), 2, Power(4), 2)) == (N, N)
    assert pair(decide_morrey(Power(INF), 1, Power(2), 2)) == (Y, N)
    # p1 < p2 with p1 = 1: sufficiency fails and the necessity part needs p_i > 1
    assert pair(decide_morrey(Power(1), 1, Power(2), 2)) == (U, N)


def test_local_morrey_grid():
    for p1, p2 in itertools.product((1.5, 2.0, 3.0), repeat=2):
        for f1, f2 in itertools.product((0.25, 0.5, 0.75), repeat=2):
            s1, s2 = -f1 / p1, -f2 / p2
            v = decide_morrey(PiecewisePower(1 / -s1, INF), p1, PiecewisePower(1 / -s2, INF), p2)
            assert v.continuous is Tri.of(p1 >= p2 and s1 >= s2 - 1e-12)
            assert v.compact is N


# ---------------------------------------------------------------- mixed scales


def test_n_into_classical_besov():
    src = nsp(0.5, Power(4), 2, 1)
    assert pair(decide_special(src, SpaceSpec(Scale.CLASSICAL_BESOV, 0.5, 2, 2))) == (Y, N)
    assert pair(decide_special(src, SpaceSpec(Scale.CLASSICAL_BESOV, 0.4, 2, 2))) == (Y, Y)
    src = nsp(0.5, Power(4), 2, 2)
    assert pair(decide_special(src, SpaceSpec(Scale.CLASSICAL_BESOV, 0.5, 1, 1))) == (N, N)


def test_classical_besov_into_n():
    src = SpaceSpec(Scale.CLASSICAL_BESOV, 2, 1, 1)
    assert pair(decide_special(src, nsp(0.5, Power(2), 2, 1))) == (Y, Y)
    assert decide_special(src, nsp(1.0, Power(2), 2, 2)).continuous is Y
    sup_src = SpaceSpec(Scale.CLASSICAL_BESOV, 1, INF, 2)
    assert pair(decide_special(sup_src, nsp(1.0, Power(2), 2, 1))) == (N, N)


def test_n_into_lebesgue():
    v = decide_special(nsp(0, Power(2), 2, 2), SpaceSpec(Scale.LR, r=2))
    assert v.continuous is Y
    assert decide_special(nsp(0.3, Power(2), 2, INF), SpaceSpec(Scale.LR, r=2)).continuous is Y
    assert decide_special(nsp(-0.3, Power(2), 2, INF), SpaceSpec(Scale.LR, r=2)).continuous is N


def test_besov_type_into_bmo():
    v = decide(bsp(1.5, Power(1), 1, 2), SpaceSpec(Scale.BMO))
    assert pair(v) == (Y, Y)
    assert "rembmo" in v.rules
    back = decide(SpaceSpec(Scale.BMO), bsp(-1, Power(2), 2, 2))
    assert back.continuous is Y


def test_unsupported_combination():
    with pytest.raises(ValueError, match="unsupported"):
        decide(SpaceSpec(Scale.LR, r=2), nsp(0, Power(2), 2))


def test_verdict_json_is_plain():
    v = decide(nsp(1, Power(2), 1), nsp(0, Power(4), 2))
    doc = json.loads(json.dumps(v.to_json(), allow_nan=False))
    assert doc["compact"] == "yes" and doc["trace"]["qstar"] == "inf"
    assert RateTerm.from_json(doc["trace"]["xi_rate"]) == v.trace["xi_rate"]
