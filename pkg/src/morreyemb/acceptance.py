"""Acceptance checks, shared by the test suite and ``morreyemb --selftest``.

Each check returns a :class:`Result` with a one-line summary.  Oracles used
here are independent of the code paths they check: exact rational closed
forms, partial sums, and hand-derived index formulas.
"""

from __future__ import annotations

import contextlib
import io
import itertools
import json
import math
import os
import tempfile
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .indices import (
    Dominance,
    PairContext,
    Tri,
    dominance_check,
    ellq_membership,
    sigma,
    sigma_bar,
    sigma_bar_numeric,
    sigma_inf,
    sigma_inf_numeric,
    sigma_numeric,
)
from .phi import InvLog, LogBlend, PiecewisePower, Power, PowerLog, PsiCritical, validate_gp
from .rates import RateTerm
from .seqspace import NormParams, b_norm, n_norm_morrey, n_norm_star
from .verdict import Scale, SpaceSpec, decide, decide_morrey, decide_n, decide_n_classical
from .witness import (
    build_family_single_cube,
    gn_check,
    limsup_estimate,
    probe_compactness,
    random_seq,
    select_witness,
    xi_samples,
)

INF = math.inf


@dataclass(frozen=True)
class Result:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} [{self.number}] {self.name}: {self.detail}"


def _power_tau(p: float, tau: float, d: int) -> Power:
    """The weight ``t**(d(1/p - tau))``."""
    return Power.from_exponent(d * (1.0 / p - tau), d)


def menu_weights(p: float, d: int) -> list:
    """Symbolic weights lying in G_p, one or more per family."""
    out = [Power(p, d=d), Power(2 * p, d=d), Power(INF, d=d), PiecewisePower(p, INF, d=d),
           PowerLog(p, -1.0, 3.0, d=d), InvLog(a=max(math.e, math.exp(p / d) * 1.01), d=d)]
    if p <= d:
        out.append(PsiCritical(p, d=d))
    if p <= d:
        out.append(LogBlend(d=d))
    return [w for w in out if validate_gp(w, p, 64).ok]


# --------------------------------------------------------------------- 1


def check_classical_oracle() -> Result:
    t0 = time.perf_counter()
    vals = (0.5, 1.0, 2.0, 4.0)
    up = [(u, p) for u in vals for p in vals if p <= u]
    qs = (0.5, 1.0, 2.0, INF)
    s2s = [-2 + 0.25 * k for k in range(17)]
    n = bad = 0
    first = ""
    for d in (1, 2):
        for (u1, p1), (u2, p2) in itertools.product(up, up):
            for q1, q2 in itertools.product(qs, qs):
                for s1 in (-1.0, 0.0, 1.0):
                    src = SpaceSpec(Scale.N, s1, p1, q1, Power(u1, d=d), d)
                    for s2 in s2s:
                        tgt = SpaceSpec(Scale.N, s2, p2, q2, Power(u2, d=d), d)
                        a = decide_n(src, tgt)
                        b = decide_n_classical(s1, u1, p1, q1, s2, u2, p2, q2, d)
                        n += 1
                        if (a.continuous, a.compact) != (b.continuous, b.compact):
                            bad += 1
                            first = first or f"{(d, s1, u1, p1, q1, s2, u2, p2, q2)}"
    dt = time.perf_counter() - t0
    ok = bad == 0 and n >= 5000 and dt < 60
    return Result(1, "classical oracle agreement", ok,
                  f"{n} points, {bad} disagreements, {dt:.1f}s" + (f", first {first}" if first else ""))


# --------------------------------------------------------------------- 2


def _random_params(rng: np.random.Generator, d: int) -> NormParams:
    p = float(rng.choice([0.5, 1.0, 1.5, 2.0, 3.0]))
    q = float(rng.choice([0.5, 1.0, 2.0, INF]))
    ws = menu_weights(p, d)
    phi = ws[int(rng.integers(len(ws)))]
    return NormParams(float(rng.uniform(-1.5, 1.5)), p, q, phi)


def check_norm_equality(n_cases: int = 200) -> Result:
    rng = np.random.default_rng(20240501)
    worst_eq = worst_b = worst_inf = 0.0
    order_ok = True
    for i in range(n_cases):
        d = int(rng.integers(1, 3))
        J = int(rng.integers(0, 6 if d == 1 else 5))
        density = float(rng.choice([0.1, 0.3, 0.7, 1.0]))
        dist = "uniform01" if i % 2 else "dyadic-decaying"
        lam = random_seq(1000 + i, d, J, density, dist)
        prm = _random_params(rng, d)
        a, b = n_norm_star(lam, prm), n_norm_morrey(lam, prm)
        worst_eq = max(worst_eq, abs(a - b) / max(a, 1e-300))
        bn = b_norm(lam, prm)
        if bn > a * (1 + 1e-12):
            order_ok = False
            worst_b = max(worst_b, bn / a - 1)
        pinf = NormParams(prm.s, prm.p, INF, prm.phi)
        ai, bi = n_norm_star(lam, pinf), b_norm(lam, pinf)
        worst_inf = max(worst_inf, abs(ai - bi) / max(ai, 1e-300))
    ok = worst_eq <= 1e-12 and order_ok and worst_inf <= 1e-12
    return Result(2, "norm evaluator equality", ok,
                  f"{n_cases} sequences, max rel |n*-nM| {worst_eq:.2e}, b<=n* {order_ok}, "
                  f"max rel |b-n*| at q=inf {worst_inf:.2e}")


# --------------------------------------------------------------------- 3


def check_index_closed_forms() -> Result:
    bad = []
    checked = 0
    d = 1
    for s1 in (-1.0, 0.0, 1.0):
        for p1, p2 in itertools.product((1.0, 2.0, 4.0), repeat=2):
            for t1, t2 in itertools.product((0.0, 0.1, 0.3), repeat=2):
                if t1 >= 1 / p1 or t2 >= 1 / p2:
                    continue
                rho = min(1.0, p1 / p2)
                ctx = PairContext(p1, p2, _power_tau(p1, t1, d), _power_tau(p2, t2, d))
                sig = s1 if rho == 1 else s1 - d / p1 + d / p2 + d * t1 * (1 - rho)
                sinf = s1 - d / p1 + d * t1
                checked += 1
                if abs(sigma(s1, ctx.phi1, rho) - sig) > 1e-9:
                    bad.append(("sigma", s1, p1, p2, t1, t2))
                if abs(sigma_inf(s1, ctx.phi1) - sinf) > 1e-9:
                    bad.append(("sigma_inf", s1, p1, t1))
                e = 1 / p1 - t1 - 1 / p2 + t2
                geq = e >= -1e-12 if rho == 1 else t2 >= rho * t1 - 1e-12
                leq = e <= 1e-12 if rho == 1 else t2 <= rho * t1 + 1e-12
                kind = dominance_check(ctx).kind
                if kind.lower != geq or kind.upper != leq:
                    bad.append(("dominance", p1, p2, t1, t2, kind.value))
                if geq and abs(sigma_bar(s1, ctx) - (s1 - d * e)) > 1e-9:
                    bad.append(("sigma_bar", s1, p1, p2, t1, t2))
    # stated values for two non-power weights
    for p1, p2 in ((1.0, 2.0), (1.0, 4.0)):
        w = InvLog(a=math.e**1.5)
        if abs(sigma(0.5, w, p1 / p2) - 0.5) > 1e-9:
            bad.append(("sigma InvLog", p1, p2))
    for dd, p in ((1, 1.0), (2, 1.0), (2, 2.0), (3, 1.5)):
        if abs(sigma_inf(0.5, PsiCritical(p, d=dd)) - (0.5 - dd / p)) > 1e-9:
            bad.append(("sigma_inf Psi", dd, p))
    # numeric slope estimates at J = 200
    worst = 0.0
    for d in (1, 2):
        for p1 in (0.5, 1.0, 2.0):
            for w in menu_weights(p1, d):
                for rho in (1.0, 0.5, 0.25):
                    worst = max(worst, abs(sigma_numeric(0.0, w, rho, 200).mid - sigma(0.0, w, rho)))
                worst = max(worst, abs(sigma_inf_numeric(0.0, w, 200).mid - sigma_inf(0.0, w)))
                for w2 in menu_weights(2 * p1, d):
                    ctx = PairContext(p1, 2 * p1, w, w2)
                    if dominance_check(ctx).kind.lower:
                        worst = max(worst, abs(sigma_bar_numeric(0.0, ctx, 200).mid - sigma_bar(0.0, ctx)))
    ok = not bad and worst <= 0.05
    return Result(3, "index closed forms", ok,
                  f"{checked} classical pairs, {len(bad)} mismatches, max numeric deviation {worst:.4f}"
                  + (f", first {bad[0]}" if bad else ""))


# --------------------------------------------------------------------- 4


def check_index_bounds() -> Result:
    bad = []
    n = 0
    tol = 1e-12
    for d in (1, 2):
        for p1 in (0.5, 1.0, 2.0, 3.0):
            for w1 in menu_weights(p1, d):
                for p2 in (0.5, 1.0, 2.0, 4.0, 8.0):
                    rho = min(1.0, p1 / p2)
                    for s1 in (-1.0, 0.0, 1.0):
                        n += 1
                        sg, si = sigma(s1, w1, rho), sigma_inf(s1, w1)
                        if not (s1 - d / p1 * (1 - rho) - tol <= sg <= s1 + tol):
                            bad.append(("sigma", w1.family, p1, p2, s1))
                        if not (s1 - d / p1 - tol <= si <= s1 + tol):
                            bad.append(("sigma_inf", w1.family, p1, s1))
                        for w2 in menu_weights(p2, d):
                            ctx = PairContext(p1, p2, w1, w2)
                            if dominance_check(ctx).kind.lower:
                                sb = sigma_bar(s1, ctx)
                                if not (s1 - d / p1 - tol <= sb <= sg + tol):
                                    bad.append(("sigma_bar", w1.family, w2.family, p1, p2, s1))
    return Result(4, "index bounds", not bad,
                  f"{n} (weight, p2, s1) cases, {len(bad)} violations" + (f", first {bad[0]}" if bad else ""))


# --------------------------------------------------------------------- 5


def _n(s, phi, p, q, d=1) -> SpaceSpec:
    return SpaceSpec(Scale.N, s, p, q, phi, d)


def witness_tuples() -> tuple[list, list]:
    noncompact = [
        (_n(0, Power(2), 2, 1), _n(0, Power(2), 2, 2)),
        (_n(0, InvLog(a=10), 2, 2), _n(0, InvLog(a=10), 2, 2)),
        (_n(0, PsiCritical(1), 1, 1), _n(0, PsiCritical(1), 1, INF)),
        (_n(0, Power(4), 2, 2), _n(0, Power(2), 2, 2)),
        (_n(0.25, Power(2), 1, 1), _n(0, Power(4), 2, 1)),
        (_n(0.75, Power(1), 1, 2), _n(0, Power(4), 1, 2)),
        (_n(0.5, Power(2, d=2), 2, 2, 2), _n(0.5, Power(2, d=2), 1, INF, 2)),
        (_n(-1, LogBlend(), 1, 0.5), _n(-1, LogBlend(), 1, 1)),
        (_n(0, PiecewisePower(2, INF, d=2), 2, 2, 2), _n(0, PiecewisePower(2, INF, d=2), 2, 2, 2)),
        (_n(1, Power(INF), 2, 1), _n(1, Power(INF), 2, INF)),
    ]
    compact = [
        (_n(1, Power(2), 2, 2), _n(0, Power(2), 2, 2)),
        (_n(0, InvLog(a=10), 2, 2), _n(-0.5, InvLog(a=10), 2, 2)),
        (_n(0, PsiCritical(1), 1, INF), _n(-0.5, PsiCritical(1), 1, INF)),
        (_n(1, Power(2), 1, 1), _n(0, Power(4), 2, 1)),
        (_n(1.5, Power(1, d=2), 1, 2, 2), _n(0, Power(2, d=2), 2, INF, 2)),
        (_n(0, LogBlend(), 1, 1), _n(-0.5, LogBlend(), 1, 1)),
        (_n(0.5, Power(INF), 2, 2), _n(0, Power(INF), 2, 2)),
        (_n(0, PowerLog(1, -1, 3), 1, 2), _n(-0.5, Power(1), 1, 2)),
        (_n(2, Power(1), 1, INF), _n(0, Power(1), 1, INF)),
        (_n(0, PiecewisePower(2, INF), 2, 1), _n(-0.75, PiecewisePower(4, INF), 4, 1)),
    ]
    return noncompact, compact


def check_witness_separation() -> Result:
    J, K = 40, 6
    noncompact, compact = witness_tuples()
    bad = []
    for src, tgt in noncompact:
        v = decide(src, tgt)
        if v.compact is not Tri.NO or v.continuous is not Tri.YES:
            bad.append(("verdict", src.phi.family, v.compact.value))
            continue
        fam = select_witness(src, tgt, J, K)
        rep = probe_compactness(fam, src, tgt)
        beta = limsup_estimate(xi_samples(src, tgt, J))
        if not (rep.max_source_norm <= 2 and rep.min_pairwise_target_gap >= 0.25 * beta):
            bad.append(("noncompact", src.phi.family, rep.max_source_norm, rep.min_pairwise_target_gap, beta))
    for src, tgt in compact:
        v = decide(src, tgt)
        if v.compact is not Tri.YES:
            bad.append(("verdict", src.phi.family, v.compact.value))
            continue
        levels = [4 * k for k in range(1, K + 1)]
        rep = probe_compactness(build_family_single_cube(src, levels, J=J), src, tgt)
        gaps = rep.target_norms
        xi = xi_samples(src, tgt, J)
        if not (gaps[0] >= 10 * gaps[-1] and all(g <= 2 * xi[j] for g, j in zip(gaps, levels))):
            bad.append(("compact", src.phi.family, gaps[0], gaps[-1]))
    return Result(5, "witness separation", not bad,
                  f"{len(noncompact)} non-compact and {len(compact)} compact tuples, {len(bad)} failures"
                  + (f", first {bad[0]}" if bad else ""))


# --------------------------------------------------------------------- 6


def check_gagliardo_nirenberg(n_cases: int = 500) -> Result:
    rng = np.random.default_rng(7)
    worst_cube = worst_global = 0.0
    for i in range(n_cases):
        d = int(rng.integers(1, 3))
        J = int(rng.integers(0, 5 if d == 1 else 4))
        lam = random_seq(5000 + i, d, J, float(rng.choice([0.2, 0.5, 1.0])),
                         "uniform01" if i % 3 else "dyadic-decaying")
        theta = float(rng.uniform(0.05, 0.95))
        s1 = float(rng.uniform(-1, 2))
        s2 = s1 - float(rng.uniform(0.1, 2))
        p1 = float(rng.choice([0.5, 1.0, 2.0, 3.0]))
        ws1 = menu_weights(p1, d)
        pr1 = NormParams(s1, p1, float(rng.choice([0.5, 1.0, 2.0, INF])), ws1[int(rng.integers(len(ws1)))])
        if i % 2:
            pr2 = NormParams(s2, INF, float(rng.choice([0.5, 1.0, 2.0, INF])), Power(INF, d=d))
        else:
            p2 = float(rng.choice([0.5, 1.0, 2.0, 4.0]))
            ws2 = menu_weights(p2, d)
            pr2 = NormParams(s2, p2, float(rng.choice([0.5, 1.0, 2.0, INF])), ws2[int(rng.integers(len(ws2)))])
        rep = gn_check(lam, pr1, pr2, theta)
        worst_cube = max(worst_cube, rep.max_cube_ratio)
        worst_global = max(worst_global, rep.ratio)
    # the per-cube ratio equals 1 on single-entry cubes; allow only rounding above it
    ok = worst_cube <= 1 + 1e-12 and worst_global <= 1 + 1e-9
    return Result(6, "Gagliardo-Nirenberg", ok,
                  f"{n_cases} instances, max per-cube ratio {worst_cube:.15f}, max global ratio {worst_global:.15f}")


# --------------------------------------------------------------------- 7


def check_morrey() -> Result:
    rng = np.random.default_rng(11)
    bad = []
    count = 0
    while count < 100:
        d = int(rng.integers(1, 3))
        p1, p2 = (float(x) for x in rng.choice([0.5, 1.0, 1.5, 2.0, 3.0], 2))
        w1s, w2s = menu_weights(p1, d), menu_weights(p2, d)
        v = decide_morrey(w1s[int(rng.integers(len(w1s)))], p1, w2s[int(rng.integers(len(w2s)))], p2)
        count += 1
        if v.compact is not Tri.NO:
            bad.append(("compact", p1, p2))
    local = 0
    for d in (1, 2):
        for p1, p2 in itertools.product((1.5, 2.0, 3.0), repeat=2):
            for f1, f2 in itertools.product((0.25, 0.5, 0.75), repeat=2):
                sig1, sig2 = -f1 * d / p1, -f2 * d / p2
                w1 = PiecewisePower(d / -sig1, INF, d=d)
                w2 = PiecewisePower(d / -sig2, INF, d=d)
                v = decide_morrey(w1, p1, w2, p2)
                expect = p1 >= p2 and sig1 >= sig2 - 1e-12
                local += 1
                if v.continuous is not Tri.of(expect) or v.compact is not Tri.NO:
                    bad.append(("local", d, p1, p2, sig1, sig2, v.continuous.value))
    return Result(7, "Morrey rules", not bad,
                  f"{count} random cases and {local} local-Morrey cases, {len(bad)} failures"
                  + (f", first {bad[0]}" if bad else ""))


# --------------------------------------------------------------------- 8


def partial_sum_oracle(beta: float, gamma: float, q: float, n_terms: int = 10**6) -> bool:
    """Membership of ``2**(-beta j) j**gamma`` in ``l_q`` judged from ``n_terms`` terms.

    Finite ``q``: the log-log slope of the partial sums over the last decade
    must be small.  ``q = inf``: the tail must not exceed the early maximum.
    """
    j = np.arange(1, n_terms + 1, dtype=float)
    lg = -beta * j + gamma * np.log2(j)
    if q == INF:
        return bool(lg[n_terms // 2 :].max() <= lg[: n_terms // 2].max() + 1e-9)
    lt = q * lg
    if lt.max() > 900:
        return False
    s = np.cumsum(np.exp2(lt))
    a, b = s[n_terms // 10 - 1], s[-1]
    slope = math.log(b / a) / math.log(10.0)
    return slope < 0.05


def membership_grid() -> list[tuple[float, float, float]]:
    grid = [(0.0, g, q) for g in (-2.0, -1.0, -0.5, 0.0, 1.0) for q in (0.5, 1.0, 2.0, INF)]
    grid += [(b, g, q) for b in (-0.25, 0.25) for g in (-1.0, 1.0) for q in (1.0, INF)]
    grid += [(0.25, 2.0, 0.5), (-0.25, -2.0, 2.0)]
    return grid


def check_membership_oracle() -> Result:
    bad = []
    grid = membership_grid()
    for beta, gamma, q in grid:
        got = ellq_membership(RateTerm(beta, gamma), q).lq
        want = Tri.of(partial_sum_oracle(beta, gamma, q))
        if got is not want:
            bad.append((beta, gamma, q, got.value, want.value))
    return Result(8, "l_q membership oracle", not bad,
                  f"{len(grid)} cases, {len(bad)} disagreements" + (f", first {bad[0]}" if bad else ""))


# --------------------------------------------------------------------- 9


def _transitions(rows: list[tuple[str, str]]) -> int:
    return sum(1 for a, b in zip(rows, rows[1:]) if a != b)


def check_cli() -> Result:
    from .cli import main

    cfgs = []
    classical = {
        "task": "sweep",
        "source": {"scale": "N", "s": 1, "p": 1, "q": "inf", "d": 1, "phi": {"family": "power", "u": 2}},
        "target": {"scale": "N", "s": 0, "p": 2, "q": "inf", "d": 1, "phi": {"family": "power", "u": 4}},
        "sweep": {"param": "target.s", "start": -2, "stop": 2, "step": 0.1},
    }
    cfgs.append(classical)
    for fam, p in (("inv_log", 2), ("psi_critical", 1)):
        phi = {"family": fam, "a": 10} if fam == "inv_log" else {"family": fam, "p": p}
        for scale in ("N", "B"):
            cfgs.append({
                "task": "sweep",
                "source": {"scale": scale, "s": 0.5, "p": p, "q": 2, "phi": phi},
                "target": {"scale": scale, "s": 0, "p": p, "q": 2, "phi": phi},
                "sweep": {"param": "target.s", "start": -2, "stop": 2, "step": 0.125},
            })
    verdict_cfg = dict(classical, task="verdict")
    problems = []
    max_trans = 0
    with tempfile.TemporaryDirectory() as tmp:
        cpath = os.path.join(tmp, "v.json")
        with open(cpath, "w") as fh:
            json.dump(verdict_cfg, fh)
        outs = []
        for k in range(2):
            o = os.path.join(tmp, f"v{k}.json")
            if main(["--config", cpath, "--out", o]) != 0:
                problems.append("verdict exit status")
            outs.append(open(o, "rb").read())
        if outs[0] != outs[1]:
            problems.append("verdict reports differ")
        if b'"compact": "yes"' not in outs[0] or b"comp-class_new" not in outs[0]:
            problems.append("classical verdict content")
        for i, cfg in enumerate(cfgs):
            cpath = os.path.join(tmp, f"s{i}.json")
            with open(cpath, "w") as fh:
                json.dump(cfg, fh)
            texts = []
            for k, jobs in enumerate((1, 2)):
                o = os.path.join(tmp, f"s{i}_{k}.csv")
                if main(["--config", cpath, "--out", o, "--format", "csv", "--jobs", str(jobs)]) != 0:
                    problems.append(f"sweep {i} exit status")
                texts.append(open(o, "rb").read())
            if texts[0] != texts[1]:
                problems.append(f"sweep {i} not byte-identical")
            rows = [tuple(line.split(",")[1:3]) for line in texts[0].decode().splitlines()[1:]]
            max_trans = max(max_trans, _transitions(rows))
        bad_path = os.path.join(tmp, "bad.json")
        with open(bad_path, "w") as fh:
            fh.write("{not json")
        out_bad = os.path.join(tmp, "never.json")
        with contextlib.redirect_stderr(io.StringIO()):
            status = main(["--config", bad_path, "--out", out_bad])
        if status != 2 or os.path.exists(out_bad):
            problems.append("malformed config handling")
    if max_trans > 2:
        problems.append(f"{max_trans} transitions in a sweep")
    return Result(9, "CLI determinism and sweep structure", not problems,
                  f"{len(cfgs)} sweeps, max transitions {max_trans}" + (f", problems {problems}" if problems else ""))


CHECKS = (
    check_classical_oracle,
    check_norm_equality,
    check_index_closed_forms,
    check_index_bounds,
    check_witness_separation,
    check_gagliardo_nirenberg,
    check_morrey,
    check_membership_oracle,
    check_cli,
)


def run_all() -> list[Result]:
    return [check() for check in CHECKS]
