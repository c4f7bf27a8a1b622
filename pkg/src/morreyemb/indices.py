"""Weight-ratio sequences, critical smoothness indices and l_q membership.

Every quantity is computed in two ways: exactly from the rate annotations of
the weights, and numerically from dyadic samples (the numeric form returns an
interval, never a point verdict).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .phi import PhiSpec, Tabulated, log2_dyadic, normalize
from .rates import RateTerm, sign0


class Tri(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    @classmethod
    def of(cls, flag: bool | None) -> Tri:
        return cls.UNKNOWN if flag is None else (cls.YES if flag else cls.NO)


@dataclass(frozen=True)
class Membership:
    """Membership of a rate sequence in ``l_q`` and, separately, in ``c_0``."""

    lq: Tri
    c0: Tri


def ellq_membership(rate: RateTerm, q: float) -> Membership:
    """Decide whether ``2**(-beta j) j**gamma`` lies in ``l_q`` and in ``c_0``.

    At ``beta = 0`` the boundary ``gamma = -1/q`` diverges like the harmonic series.
    """
    if rate.low:
        return Membership(Tri.UNKNOWN, Tri.UNKNOWN)
    b, g = sign0(rate.beta), rate.gamma
    if b > 0:
        return Membership(Tri.YES, Tri.YES)
    if b < 0:
        return Membership(Tri.NO, Tri.NO)
    c0 = sign0(g) < 0
    if q == math.inf:
        lq = sign0(g) <= 0
    else:
        lq = sign0(g + 1.0 / q) < 0
    return Membership(Tri.of(lq), Tri.of(c0))


def qstar(q1: float, q2: float) -> float:
    """Exponent with ``1/q* = (1/q2 - 1/q1)_+``."""
    inv = 1.0 / q2 - 1.0 / q1
    return math.inf if inv <= 0 else 1.0 / inv


@dataclass(frozen=True)
class PairContext:
    """Source and target integrability data for a pair of weights."""

    p1: float
    p2: float
    phi1: PhiSpec
    phi2: PhiSpec
    q1: float = math.inf
    q2: float = math.inf

    def __post_init__(self) -> None:
        if not (self.p1 > 0 and self.p2 > 0):
            raise ValueError("p1, p2 must be positive")
        if self.phi1.d != self.phi2.d:
            raise ValueError("weights live in different dimensions")
        for name in ("phi1", "phi2"):
            phi = getattr(self, name)
            if not phi.normalized:
                object.__setattr__(self, name, normalize(phi))

    @property
    def d(self) -> int:
        return self.phi1.d

    @property
    def rho(self) -> float:
        return min(1.0, self.p1 / self.p2)

    @property
    def qstar(self) -> float:
        return qstar(self.q1, self.q2)

    def ratio_rate(self) -> RateTerm:
        """Rate of ``phi2 / phi1**rho``."""
        return self.phi2.rate() * self.phi1.rate() ** -self.rho

    def log2_ratio(self, J: int) -> np.ndarray:
        j = np.arange(J + 1)
        return log2_dyadic(self.phi2, j) - self.rho * log2_dyadic(self.phi1, j)


def alpha_seq(ctx: PairContext, J: int) -> np.ndarray:
    """``alpha_j = max_{nu <= j} phi2(2**-nu) / phi1(2**-nu)**rho`` for ``j = 0..J``."""
    if J < 0:
        raise ValueError("J must be non-negative")
    return np.exp2(np.maximum.accumulate(ctx.log2_ratio(J)))


def alpha_rate(ctx: PairContext) -> RateTerm:
    """Rate of the prefix supremum of the weight ratio."""
    return ctx.ratio_rate().prefix_sup()


# --------------------------------------------------------------------- indices


def sigma(s1: float, phi1: PhiSpec, rho: float) -> float:
    """``sigma(s1) = s1 - (1 - rho) beta_1``."""
    return s1 - (1.0 - rho) * phi1.rate().beta


def sigma_inf(s1: float, phi1: PhiSpec) -> float:
    """``sigma_inf(s1) = s1 - beta_1``."""
    return s1 - phi1.rate().beta


class Dominance(str, enum.Enum):
    LEQ = "leq"
    GEQ = "geq"
    BOTH = "both"
    NEITHER = "neither"

    @property
    def upper(self) -> bool:
        return self in (Dominance.LEQ, Dominance.BOTH)

    @property
    def lower(self) -> bool:
        return self in (Dominance.GEQ, Dominance.BOTH)


@dataclass(frozen=True)
class DominanceReport:
    """Classification of ``phi2 / phi1**rho`` with the sample bounds on ``0..J``."""

    kind: Dominance
    upper_constant: float
    lower_constant: float
    ratio_rate: RateTerm


def dominance_check(ctx: PairContext, J: int = 64) -> DominanceReport:
    """Is ``phi2 <= C phi1**rho`` (leq), ``phi2 >= c phi1**rho`` (geq), both or neither?"""
    if J < 2:
        raise ValueError("J must be at least 2")
    lr = ctx.log2_ratio(J)
    upper, lower = float(np.exp2(lr.max())), float(np.exp2(lr.min()))
    rate = ctx.ratio_rate()
    if rate.low:
        tail = np.diff(lr[len(lr) // 2 :])
        up = bool(np.all(tail <= 1e-12))
        down = bool(np.all(tail >= -1e-12))
        kind = {(True, True): Dominance.BOTH, (True, False): Dominance.LEQ,
                (False, True): Dominance.GEQ}.get((up, down), Dominance.NEITHER)
    else:
        up, down = rate.bounded(), rate.bounded_below()
        kind = Dominance.BOTH if up and down else (Dominance.LEQ if up else Dominance.GEQ)
    return DominanceReport(kind, upper, lower, rate)


def sigma_bar(s1: float, ctx: PairContext) -> float:
    """``sigma(s1)`` shifted by the decay rate of ``phi2 / phi1**rho``.

    Only defined when the ratio is bounded below (geq dominance).
    """
    kind = dominance_check(ctx).kind
    if not kind.lower:
        raise ValueError(f"sigma_bar needs phi2 >= c phi1**rho, ratio is {kind.value}")
    return sigma(s1, ctx.phi1, ctx.rho) + ctx.ratio_rate().beta


# --------------------------------------------------------------------- numeric mode


@dataclass(frozen=True)
class Interval:
    lo: float
    mid: float
    hi: float

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def straddles(self, x: float) -> bool:
        return self.lo < x < self.hi


def _fit_slope(j: np.ndarray, y: np.ndarray) -> float:
    return float(np.polyfit(j.astype(float), y, 1)[0])


def slope_interval(phi: PhiSpec, J: int = 200) -> Interval:
    """Estimate ``beta`` from the slope of ``log2 phi(2**-j)`` over ``j in [J/2, J]``.

    The interval spans the least-squares slopes of the two halves of that window
    and of the whole window, which brackets the drift caused by log factors.
    """
    if isinstance(phi, Tabulated):
        J = min(J, phi.J)
    if J < 8:
        raise ValueError("need at least 8 levels for a slope estimate")
    j = np.arange(J // 2, J + 1)
    y = log2_dyadic(phi, j)
    half = len(j) // 2
    fits = [_fit_slope(j, y), _fit_slope(j[:half + 1], y[:half + 1]), _fit_slope(j[half:], y[half:])]
    betas = [-f for f in fits]
    return Interval(min(betas), betas[0], max(betas))


def sigma_numeric(s1: float, phi1: PhiSpec, rho: float, J: int = 200) -> Interval:
    b = slope_interval(phi1, J)
    k = 1.0 - rho
    return Interval(s1 - k * b.hi, s1 - k * b.mid, s1 - k * b.lo)


def sigma_inf_numeric(s1: float, phi1: PhiSpec, J: int = 200) -> Interval:
    b = slope_interval(phi1, J)
    return Interval(s1 - b.hi, s1 - b.mid, s1 - b.lo)


def sigma_bar_numeric(s1: float, ctx: PairContext, J: int = 200) -> Interval:
    """Numeric ``sigma_bar`` from the slope of the sampled log-ratio."""
    base = sigma_numeric(s1, ctx.phi1, ctx.rho, J)
    j = np.arange(J // 2, J + 1)
    y = ctx.log2_ratio(J)[J // 2 :]
    half = len(j) // 2
    fits = [_fit_slope(j, y), _fit_slope(j[:half + 1], y[:half + 1]), _fit_slope(j[half:], y[half:])]
    betas = [-f for f in fits]
    return Interval(base.lo + min(betas), base.mid + betas[0], base.hi + max(betas))
