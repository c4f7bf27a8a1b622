"""Embedding decisions between smoothness spaces of Morrey type on bounded domains.

Every decision is tri-state.  ``unknown`` is returned wherever the available
sufficient and necessary conditions leave a gap, and it is never collapsed into
``no``.  Each verdict lists the rules it used and a trace of the quantities
behind them.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .indices import (
    PairContext,
    Tri,
    alpha_rate,
    dominance_check,
    ellq_membership,
    qstar,
    sigma,
    sigma_inf,
)
from .phi import (
    PhiSpec,
    Power,
    Tabulated,
    limit_at_zero_positive,
    normalize,
    phi_from_json,
    phi_to_json,
    smallest_intc_epsilon,
    validate_gp,
)
from .rates import RateTerm, sign0


class InvariantViolation(AssertionError):
    """A verdict broke one of the engine's own consistency rules."""


class Scale(str, enum.Enum):
    N = "N"
    B = "B"
    E = "E"
    M = "M"
    CLASSICAL_BESOV = "ClassicalBesov"
    LR = "Lr"
    BMO = "bmo"


_WEIGHTED = (Scale.N, Scale.B, Scale.E, Scale.M)


@functools.lru_cache(maxsize=4096)
def _gp_ok(phi: PhiSpec, p: float) -> bool:
    J = min(64, phi.J) if isinstance(phi, Tabulated) else 64
    return validate_gp(phi, p, J).ok


@dataclass(frozen=True)
class SpaceSpec:
    """A function or sequence space on a bounded domain.

    ``p`` may be ``inf`` only for classical Besov spaces; ``r`` is the Lebesgue
    exponent of an ``Lr`` space.
    """

    scale: Scale
    s: float = 0.0
    p: float = 2.0
    q: float = math.inf
    phi: PhiSpec | None = None
    d: int = 1
    r: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "scale", Scale(self.scale))
        sc = self.scale
        if sc in _WEIGHTED:
            if self.phi is None:
                raise ValueError(f"{sc.value} spaces need a weight phi")
            if self.phi.d != self.d:
                raise ValueError("weight dimension differs from the space dimension")
            if not (0 < self.p < math.inf):
                raise ValueError(f"{sc.value} spaces need 0 < p < inf")
            if not self.phi.normalized:
                object.__setattr__(self, "phi", normalize(self.phi))
            if not _gp_ok(self.phi, self.p):
                raise ValueError(f"weight {self.phi.family} is not in G_p for p={self.p}")
        elif sc is Scale.CLASSICAL_BESOV:
            if not self.p > 0:
                raise ValueError("classical Besov spaces need p > 0")
        elif sc is Scale.LR:
            if self.r is None or self.r < 1:
                raise ValueError("Lr spaces need r >= 1")
        if sc is not Scale.M and not self.q > 0:
            raise ValueError("q must be positive or inf")

    def with_s(self, s: float) -> SpaceSpec:
        return replace(self, s=s)

    def to_json(self) -> dict:
        doc = {"scale": self.scale.value, "s": self.s, "p": _enc(self.p), "q": _enc(self.q), "d": self.d}
        if self.phi is not None:
            doc["phi"] = phi_to_json(self.phi)
        if self.r is not None:
            doc["r"] = _enc(self.r)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> SpaceSpec:
        d = int(doc.get("d", 1))
        phi = phi_from_json(doc["phi"], d) if doc.get("phi") is not None else None
        return cls(
            Scale(doc["scale"]),
            s=float(doc.get("s", 0.0)),
            p=_num(doc.get("p", 2.0)),
            q=_num(doc.get("q", "inf")),
            phi=phi,
            d=d,
            r=_num(doc["r"]) if doc.get("r") is not None else None,
        )


def _num(x) -> float:
    if isinstance(x, str) and x.lower() in ("inf", "infinity"):
        return math.inf
    return float(x)


def _enc(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


@dataclass(frozen=True)
class Verdict:
    continuous: Tri
    compact: Tri
    rules: tuple[str, ...] = ()
    trace: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "continuous", Tri(self.continuous))
        object.__setattr__(self, "compact", Tri(self.compact))
        if self.compact is Tri.YES and self.continuous is not Tri.YES:
            raise InvariantViolation("compact embedding reported without continuity")

    def to_json(self) -> dict:
        return {
            "continuous": self.continuous.value,
            "compact": self.compact.value,
            "rules": list(self.rules),
            "trace": _jsonable(self.trace),
        }


def _jsonable(x):
    if isinstance(x, RateTerm):
        return x.to_json()
    if isinstance(x, enum.Enum):
        return x.value
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float):
        return _enc(x)
    return x


_UNKNOWN = Tri.UNKNOWN
_YES = Tri.YES
_NO = Tri.NO


def _require(spec: SpaceSpec, *scales: Scale) -> None:
    if spec.scale not in scales:
        raise ValueError(f"expected scale in {[s.value for s in scales]}, got {spec.scale.value}")


def _pair(src: SpaceSpec, tgt: SpaceSpec) -> PairContext:
    if src.d != tgt.d:
        raise ValueError("source and target live in different dimensions")
    return PairContext(src.p, tgt.p, src.phi, tgt.phi, src.q, tgt.q)


def _xi_rate(src: SpaceSpec, tgt: SpaceSpec, ctx: PairContext) -> RateTerm:
    """Rate of ``2**(j(s2-s1)) alpha_j phi1(2**-j)**(rho-1)``."""
    return RateTerm.geometric(tgt.s - src.s) * alpha_rate(ctx) * src.phi.rate() ** (ctx.rho - 1.0)


def _low(*phis: PhiSpec) -> bool:
    return any(phi.rate().low for phi in phis)


# --------------------------------------------------------------------- N scale


def decide_n(src: SpaceSpec, tgt: SpaceSpec) -> Verdict:
    """Besov-Morrey to Besov-Morrey, continuity and compactness."""
    _require(src, Scale.N)
    _require(tgt, Scale.N)
    ctx = _pair(src, tgt)
    xi = _xi_rate(src, tgt, ctx)
    qs = ctx.qstar
    trace = {
        "rho": ctx.rho,
        "qstar": qs,
        "alpha_rate": alpha_rate(ctx),
        "xi_rate": xi,
        "sigma": sigma(src.s, src.phi, ctx.rho),
        "sigma_inf": sigma_inf(src.s, src.phi),
    }
    rules = ["th-cont", "th:comp", "th-cont-BM"]
    if isinstance(src.phi, Power) and isinstance(tgt.phi, Power):
        rules.append("comp-class_new")
    if xi.low:
        return Verdict(_UNKNOWN, _UNKNOWN, tuple(rules), trace)
    cont = ellq_membership(xi, qs).lq
    comp = cont if src.q > tgt.q else ellq_membership(xi, math.inf).c0
    if sign0(src.s - tgt.s) == 0 and comp is _YES:
        raise InvariantViolation("equal smoothness reported compact")
    return Verdict(cont, comp, tuple(rules), trace)


def decide_n_classical(s1, u1, p1, q1, s2, u2, p2, q2, d) -> Verdict:
    """Closed-form decision for ``phi_i(t) = t**(d/u_i)`` in exact rational arithmetic."""
    for p, u in ((p1, u1), (p2, u2)):
        if not (0 < p <= u < math.inf):
            raise ValueError("need 0 < p_i <= u_i < inf")
    F = Fraction
    rho = min(F(1), F(p1) / F(p2))
    if F(u1) / F(u2) >= rho:
        thr = F(p1) / F(u1) * max(F(0), 1 / F(p1) - 1 / F(p2))
        case = "u1/u2>=rho"
    else:
        thr = 1 / F(u1) - 1 / F(u2)
        case = "u1/u2<rho"
    diff = (F(s1) - F(s2)) / d
    strict = diff > thr
    cont = strict or (diff == thr and q1 <= q2)
    return Verdict(
        Tri.of(cont), Tri.of(strict), ("comp-class_new",), {"case": case, "threshold": float(thr)}
    )


# --------------------------------------------------------------------- b scale


def _q_le(q1: float, q2: float, rho: float) -> bool:
    """``q1 <= rho * q2`` with infinite exponents."""
    return q2 == math.inf or (q1 != math.inf and q1 <= rho * q2)


def decide_b(src: SpaceSpec, tgt: SpaceSpec) -> Verdict:
    """Besov-type to Besov-type.

    For ``p1 >= p2`` continuity is an exact characterization; for ``p1 < p2``
    only sufficient and necessary conditions are available and the gap is
    reported as unknown.
    """
    _require(src, Scale.B)
    _require(tgt, Scale.B)
    ctx = _pair(src, tgt)
    s1, s2, rho = src.s, tgt.s, ctx.rho
    r1, r2 = src.phi.rate(), tgt.phi.rate()
    rules: list[str] = []
    trace: dict = {"rho": rho, "qstar": ctx.qstar}
    if _low(src.phi, tgt.phi):
        return Verdict(_UNKNOWN, _UNKNOWN, ("low-confidence-rate",), trace)

    dom = dominance_check(ctx)
    sig = sigma(s1, src.phi, rho)
    sbar = sig + dom.ratio_rate.beta if dom.kind.lower else None
    trace.update(dominance=dom.kind, ratio_rate=dom.ratio_rate, sigma=sig, sigma_bar=sbar,
                 sigma_inf=sigma_inf(s1, src.phi))

    single_cube = RateTerm.geometric(s2 - s1) * r2 / r1
    nec_ratio = single_cube.bounded()
    ds = sign0(s1 - s2)
    suff_compact = (dom.kind.upper and sign0(sig - s2) > 0) or (
        sbar is not None and sign0(sbar - s2) > 0
    )

    if src.p >= tgt.p:
        rules.append("P-Bp-cont")
        cont = nec_ratio and (ds > 0 or (ds == 0 and src.q <= tgt.q))
        if not cont:
            return Verdict(_NO, _NO, tuple(rules), trace)
        if ds == 0:
            return Verdict(_YES, _NO, tuple(rules + ["equal-smoothness"]), trace)
        if suff_compact:
            return Verdict(_YES, _YES, tuple(rules + ["cor-5.1"]), trace)
        if ellq_membership(single_cube, math.inf).c0 is _NO:
            return Verdict(_YES, _NO, tuple(rules + ["single-cube-separation"]), trace)
        return Verdict(_YES, _UNKNOWN, tuple(rules), trace)

    nec_growth = (RateTerm.geometric(s2 - s1) * r1 ** (rho - 1.0)).bounded()
    if not (nec_ratio and nec_growth):
        return Verdict(_NO, _NO, ("necessary-conditions",), trace)
    if suff_compact:
        return Verdict(_YES, _YES, ("Lemma-LS_1+2", "cor-5.1"), trace)
    if ellq_membership(single_cube, math.inf).c0 is _NO:
        comp = _NO
        rules.append("single-cube-separation")
    elif ds == 0:
        comp = _NO
        rules.append("equal-smoothness")
    else:
        comp = _UNKNOWN

    lim1 = (RateTerm.geometric(sig - s1) * r1 ** (rho - 1.0)).bounded()
    q_ok = _q_le(src.q, tgt.q, rho)
    trace.update(emb_lim1=lim1, q1_le_rho_q2=q_ok)
    if dom.kind.upper and sign0(s2 - sig) <= 0 and lim1 and q_ok:
        return Verdict(_YES, comp, tuple(rules + ["P-bp-cont2"]), trace)
    if sbar is not None:
        lim21 = (RateTerm.geometric(sbar - sig) * dom.ratio_rate).bounded()
        trace["emb_lim21"] = lim21
        if sign0(s2 - sbar) <= 0 and lim1 and lim21 and q_ok:
            return Verdict(_YES, comp, tuple(rules + ["P-bp-cont3"]), trace)
    return Verdict(_UNKNOWN, comp, tuple(rules + ["sufficiency-gap"]), trace)


def decide_b_sup_target(src: SpaceSpec, s2: float) -> Verdict:
    """Besov-type source into the sup-type target with smoothness ``s2``.

    The embedding is continuous exactly when ``2**(j(s2-s1)) / phi(2**-j)`` is
    bounded and compact exactly when it tends to zero; single-cube sequences of
    unit source norm realise both directions.
    """
    _require(src, Scale.B)
    r = src.phi.rate()
    sinf = sigma_inf(src.s, src.phi)
    trace: dict = {"sigma_inf": sinf}
    if r.low:
        trace["note"] = "condition at the critical index not decidable from a low-confidence rate"
        return Verdict(_UNKNOWN, _UNKNOWN, ("Pinfinity",), trace)
    eta = RateTerm.geometric(s2 - src.s) * r**-1.0
    liminf = (RateTerm.geometric(sinf - src.s) * r**-1.0).bounded()
    trace.update(eta_rate=eta, liminf_condition=liminf)
    rules = ["Pinfinity", "pinfinity", "comp-nec"]
    if not liminf:
        rules.append("single-cube-necessity")
    m = ellq_membership(eta, math.inf)
    return Verdict(m.lq, m.c0 if m.lq is _YES else _NO, tuple(rules), trace)


# --------------------------------------------------------------------- E scale


def decide_e(src: SpaceSpec, tgt: SpaceSpec) -> Verdict:
    """Triebel-Lizorkin-Morrey to Triebel-Lizorkin-Morrey (shared with the F scale)."""
    _require(src, Scale.E)
    _require(tgt, Scale.E)
    for side in (src, tgt):
        if side.q < math.inf and smallest_intc_epsilon(side.phi) is None:
            raise ValueError(f"weight {side.phi.family} fails the integrability condition needed for q < inf")
    ctx = _pair(src, tgt)
    xi = _xi_rate(src, tgt, ctx)
    r = min(tgt.p, tgt.q)
    trace = {"rho": ctx.rho, "xi_rate": xi, "summability": r}
    if xi.low:
        return Verdict(_UNKNOWN, _UNKNOWN, ("comp-GTLM",), trace)
    if ellq_membership(xi, r).lq is _YES:
        return Verdict(_YES, _YES, ("comp-GTLM",), trace)
    if ellq_membership(xi, math.inf).lq is _NO:
        return Verdict(_NO, _NO, ("Rmk5.8",), trace)
    return Verdict(_UNKNOWN, _UNKNOWN, ("comp-GTLM", "Rmk5.8"), trace)


# --------------------------------------------------------------------- Morrey


def decide_morrey(phi1: PhiSpec, p1: float, phi2: PhiSpec, p2: float) -> Verdict:
    """Generalized Morrey space into generalized Morrey space; never compact."""
    phi1, phi2 = normalize(phi1), normalize(phi2)
    if not (_gp_ok(phi1, p1) and _gp_ok(phi2, p2)):
        raise ValueError("weights must lie in G_p for their exponents")
    lim1 = limit_at_zero_positive(phi1)
    ratio = phi2.rate() / phi1.rate()
    trace = {"limit_phi1_positive": lim1, "ratio_rate": ratio}
    if lim1:
        return Verdict(_YES, _NO, ("rem-hoelder-MO", "M-M(iii)"), trace)
    if lim1 is None or ratio.low:
        return Verdict(_UNKNOWN, _NO, ("M-M(iii)",), trace)
    dominated = ratio.bounded()
    trace["phi1_dominates_phi2"] = dominated
    if p2 <= p1 and dominated:
        return Verdict(_YES, _NO, ("M-M(i)", "M-M(iii)"), trace)
    if p1 > 1 and p2 > 1:
        return Verdict(_NO, _NO, ("M-M(ii)", "M-M(iii)"), trace)
    return Verdict(_UNKNOWN, _NO, ("M-M(iii)",), trace)


# --------------------------------------------------------------------- mixed scales

def _bmo_as_b(d: int) -> SpaceSpec:
    return SpaceSpec(Scale.B, s=0.0, p=2.0, q=2.0, phi=Power(math.inf, d=d), d=d)


def decide_special(src: SpaceSpec, tgt: SpaceSpec) -> Verdict:
    """Embeddings that cross scales."""
    pair = (src.scale, tgt.scale)
    if pair == (Scale.N, Scale.CLASSICAL_BESOV):
        rho = 0.0 if tgt.p == math.inf else min(1.0, src.p / tgt.p)
        seq = RateTerm.geometric(tgt.s - src.s) * src.phi.rate() ** (rho - 1.0)
        qs = qstar(src.q, tgt.q)
        trace = {"rho": rho, "qstar": qs, "sequence_rate": seq}
        if seq.low:
            return Verdict(_UNKNOWN, _UNKNOWN, ("cor-N-in-B",), trace)
        cont = ellq_membership(seq, qs).lq
        comp = cont if src.q > tgt.q else ellq_membership(seq, math.inf).c0
        return Verdict(cont, comp, ("cor-N-in-B",), trace)

    if pair == (Scale.CLASSICAL_BESOV, Scale.N):
        gap = src.s - (0.0 if src.p == math.inf else src.d / src.p) - tgt.s
        g = sign0(gap)
        cont = g > 0 or (g == 0 and src.q <= tgt.q)
        trace = {"smoothness_gap": gap}
        if src.p == math.inf:
            # sup-type source: the sufficient condition is also necessary
            return Verdict(Tri.of(cont), Tri.of(g > 0), ("cor-B-in-N", "cor2b"), trace)
        if cont:
            return Verdict(_YES, Tri.YES if g > 0 else _UNKNOWN, ("cor-B-in-N",), trace)
        return Verdict(_UNKNOWN, _UNKNOWN, ("cor-B-in-N",), trace)

    if pair == (Scale.N, Scale.LR):
        r, q = tgt.r, src.q
        rho = min(1.0, src.p / r)
        t1 = qstar(q, min(r, 2.0))
        t2 = math.inf if r == 1 else qstar(q, max(r, 2.0))
        seq = RateTerm.geometric(-src.s) * src.phi.rate() ** (rho - 1.0)
        trace = {"rho": rho, "t1": t1, "t2": t2, "sequence_rate": seq}
        if seq.low:
            return Verdict(_UNKNOWN, _UNKNOWN, ("cor-Lr",), trace)
        if ellq_membership(seq, t1).lq is _YES:
            return Verdict(_YES, _UNKNOWN, ("cor-Lr",), trace)
        if ellq_membership(seq, t2).lq is _NO:
            return Verdict(_NO, _NO, ("cor-Lr",), trace)
        return Verdict(_UNKNOWN, _UNKNOWN, ("cor-Lr",), trace)

    if pair == (Scale.B, Scale.BMO):
        v = decide_b(src, _bmo_as_b(src.d))
        return replace(v, rules=v.rules + ("rembmo",))
    if pair == (Scale.BMO, Scale.B):
        v = decide_b(_bmo_as_b(tgt.d), tgt)
        return replace(v, rules=v.rules + ("rembmo",))
    raise ValueError(f"unsupported scale combination {src.scale.value} -> {tgt.scale.value}")


def decide(src: SpaceSpec, tgt: SpaceSpec) -> Verdict:
    """Dispatch on the pair of scales."""
    pair = (src.scale, tgt.scale)
    if pair == (Scale.N, Scale.N):
        return decide_n(src, tgt)
    if pair == (Scale.B, Scale.B):
        return decide_b(src, tgt)
    if pair == (Scale.E, Scale.E):
        return decide_e(src, tgt)
    if pair == (Scale.M, Scale.M):
        return decide_morrey(src.phi, src.p, tgt.phi, tgt.p)
    if pair == (Scale.B, Scale.CLASSICAL_BESOV) and tgt.p == math.inf and tgt.q == math.inf:
        return decide_b_sup_target(src, tgt.s)
    return decide_special(src, tgt)
