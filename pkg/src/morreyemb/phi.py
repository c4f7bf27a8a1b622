"""Weight functions of the class G_p.

Each weight is a frozen dataclass from a closed menu of symbolic families,
plus a tabulated escape hatch that carries dyadic samples and a user-asserted
:class:`~morreyemb.rates.RateTerm`.  Evaluation works in ``log2`` space at
dyadic points so that level ``J = 200`` and beyond never underflows.

A weight is *normalized* when ``phi(1) = 1``; every consumer in the package
normalizes first.
"""

from __future__ import annotations

import math
from dataclasses import KW_ONLY, dataclass, field, replace

import numpy as np

from .rates import Confidence, RateTerm

_LN2 = math.log(2.0)
_LOG2E = math.log2(math.e)
_REL_TOL = 1e-12


@dataclass(frozen=True)
class PhiSpec:
    """Base class: a positive weight ``phi`` on ``(0, oo)`` in dimension ``d``."""

    _: KW_ONLY
    d: int = 1
    scale: float = 1.0
    normalized: bool = False

    family = "abstract"

    def __post_init__(self) -> None:
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.d}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError("scale must be positive and finite")

    # Subclasses provide the unscaled weight.
    def _raw(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _log2_raw_dyadic(self, j: np.ndarray) -> np.ndarray:
        return np.log2(self._raw(np.exp2(-j.astype(float))))

    def rate(self) -> RateTerm:
        raise NotImplementedError

    def params(self) -> dict:
        raise NotImplementedError

    def __call__(self, t):
        return eval_phi(self, t)


@dataclass(frozen=True)
class Power(PhiSpec):
    """``phi(t) = t**(d/u)``; ``u = inf`` gives the constant weight."""

    u: float
    family = "power"

    def __post_init__(self) -> None:
        super().__post_init__()
        if not self.u > 0:
            raise ValueError("Power needs u > 0")

    @classmethod
    def from_exponent(cls, e: float, d: int = 1) -> Power:
        """The weight ``t**e`` written as ``t**(d/u)``."""
        if e < 0:
            raise ValueError("exponent must be non-negative")
        return cls(math.inf if e == 0 else d / e, d=d)

    @property
    def exponent(self) -> float:
        return self.d / self.u

    def _raw(self, t):
        return t**self.exponent

    def _log2_raw_dyadic(self, j):
        return -self.exponent * j

    def rate(self):
        return RateTerm(self.exponent, 0.0)

    def params(self):
        return {"u": self.u}


@dataclass(frozen=True)
class PiecewisePower(PhiSpec):
    """``t**(d/u)`` on ``(0, 1]`` and ``t**(d/v)`` beyond; either may be infinite."""

    u: float
    v: float
    family = "piecewise_power"

    def __post_init__(self) -> None:
        super().__post_init__()
        if not (self.u > 0 and self.v > 0):
            raise ValueError("PiecewisePower needs u, v > 0")

    def _raw(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t <= 1.0, t ** (self.d / self.u), t ** (self.d / self.v))

    def _log2_raw_dyadic(self, j):
        return np.where(j >= 0, -(self.d / self.u) * j, -(self.d / self.v) * j)

    def rate(self):
        return RateTerm(self.d / self.u, 0.0)

    def params(self):
        return {"u": self.u, "v": self.v}


@dataclass(frozen=True)
class PowerLog(PhiSpec):
    """``t**(d/p) * log(L + t)**a`` with ``a <= 0`` and ``L > 1``."""

    p: float
    a: float
    L: float
    family = "power_log"

    def __post_init__(self) -> None:
        super().__post_init__()
        if not self.p > 0:
            raise ValueError("PowerLog needs p > 0")
        if self.a > 0:
            raise ValueError("PowerLog needs a <= 0")
        if not self.L > 1:
            raise ValueError("PowerLog needs L > 1 so that log(L + t) > 0")

    def _raw(self, t):
        return t ** (self.d / self.p) * np.log(self.L + t) ** self.a

    def _log2_raw_dyadic(self, j):
        t = np.exp2(-j.astype(float))
        return -(self.d / self.p) * j + self.a * np.log2(np.log(self.L + t))

    def rate(self):
        return RateTerm(self.d / self.p, 0.0)

    def params(self):
        return {"p": self.p, "a": self.a, "L": self.L}


@dataclass(frozen=True)
class LogBlend(PhiSpec):
    """``log(1 + t) / log 2`` below 1 and ``t`` from 1 on."""

    family = "log_blend"

    def _raw(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t < 1.0, np.log1p(np.minimum(t, 1.0)) / _LN2, t)

    def _log2_raw_dyadic(self, j):
        t = np.exp2(-j.astype(float))
        small = np.log2(np.log1p(np.minimum(t, 1.0)) / _LN2)
        return np.where(j > 0, small, -j.astype(float))

    def rate(self):
        return RateTerm(1.0, 0.0)

    def params(self):
        return {}


@dataclass(frozen=True)
class InvLog(PhiSpec):
    """``ln a / ln(1/t)`` below ``1/a`` and 1 above; lies in G_r with ``r = d ln a``."""

    a: float = math.e
    family = "inv_log"

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.a < math.e:
            raise ValueError("InvLog needs a >= e")

    @property
    def r(self) -> float:
        return self.d * math.log(self.a)

    def _raw(self, t):
        t = np.asarray(t, dtype=float)
        small = t < 1.0 / self.a
        safe = np.where(small, t, 0.5)
        return np.where(small, math.log(self.a) / -np.log(safe), 1.0)

    def _log2_raw_dyadic(self, j):
        jf = j.astype(float)
        small = jf * _LN2 > math.log(self.a)
        safe = np.where(small, jf, 1.0)
        return np.where(small, math.log2(math.log(self.a)) - np.log2(safe * _LN2), 0.0)

    def rate(self):
        return RateTerm(0.0, -1.0)

    def params(self):
        return {"a": self.a}


@dataclass(frozen=True)
class PsiCritical(PhiSpec):
    """``(e t)**(d/p) * ln(1/t)`` below ``1/e`` and 1 above; needs ``p <= d``."""

    p: float
    family = "psi_critical"

    def __post_init__(self) -> None:
        super().__post_init__()
        if not self.p > 0:
            raise ValueError("PsiCritical needs p > 0")

    def _raw(self, t):
        t = np.asarray(t, dtype=float)
        small = t < 1.0 / math.e
        safe = np.where(small, t, 0.25)
        return np.where(small, (math.e * safe) ** (self.d / self.p) * -np.log(safe), 1.0)

    def _log2_raw_dyadic(self, j):
        jf = j.astype(float)
        small = jf * _LN2 > 1.0
        safe = np.where(small, jf, 2.0)
        val = (self.d / self.p) * (_LOG2E - safe) + np.log2(safe * _LN2)
        return np.where(small, val, 0.0)

    def rate(self):
        return RateTerm(self.d / self.p, 1.0)

    def params(self):
        return {"p": self.p}


@dataclass(frozen=True)
class Tabulated(PhiSpec):
    """Dyadic samples ``phi(2**-j)`` for ``j = 0..J`` with an asserted rate."""

    samples: tuple[float, ...]
    asserted_rate: RateTerm = field(default_factory=lambda: RateTerm(0.0, 0.0, Confidence.LOW))
    family = "tabulated"

    def __post_init__(self) -> None:
        super().__post_init__()
        object.__setattr__(self, "samples", tuple(float(x) for x in self.samples))
        if not self.samples:
            raise ValueError("Tabulated needs at least one sample")
        if any(not (x > 0 and math.isfinite(x)) for x in self.samples):
            raise ValueError("Tabulated samples must be positive and finite")
        if self.asserted_rate.confidence is Confidence.EXACT:
            object.__setattr__(
                self, "asserted_rate", replace(self.asserted_rate, confidence=Confidence.ASSERTED)
            )

    @property
    def J(self) -> int:
        return len(self.samples) - 1

    def _levels_of(self, t: np.ndarray) -> np.ndarray:
        j = -np.log2(t)
        jr = np.rint(j)
        if np.any(np.abs(j - jr) > 1e-9) or np.any(jr < 0) or np.any(jr > self.J):
            raise ValueError(f"tabulated weight is only defined at 2**-j, 0 <= j <= {self.J}")
        return jr.astype(int)

    def _raw(self, t):
        t = np.asarray(t, dtype=float)
        return np.asarray(self.samples)[self._levels_of(t)]

    def _log2_raw_dyadic(self, j):
        if np.any(j < 0) or np.any(j > self.J):
            raise ValueError(f"tabulated weight is only defined for levels 0..{self.J}")
        return np.log2(np.asarray(self.samples))[j]

    def rate(self):
        return self.asserted_rate

    def params(self):
        return {"samples": list(self.samples), "rate": self.asserted_rate.to_json()}


@dataclass(frozen=True)
class PhiProduct(PhiSpec):
    """``prod_i phi_i**e_i``; used for interpolated weights such as ``phi1**(1-theta) phi2**theta``."""

    factors: tuple[tuple[PhiSpec, float], ...]
    family = "product"

    def __post_init__(self) -> None:
        super().__post_init__()
        if not self.factors:
            raise ValueError("PhiProduct needs at least one factor")
        if any(f.d != self.d for f, _ in self.factors):
            raise ValueError("all factors must share the dimension")

    def _raw(self, t):
        out = np.ones_like(np.asarray(t, dtype=float))
        for f, e in self.factors:
            out = out * eval_phi(f, t) ** e
        return out

    def _log2_raw_dyadic(self, j):
        out = np.zeros(j.shape)
        for f, e in self.factors:
            out = out + e * log2_dyadic(f, j)
        return out

    def rate(self):
        r = RateTerm(0.0, 0.0)
        for f, e in self.factors:
            r = r * f.rate() ** e
        return r

    def params(self):
        return {"factors": [{"phi": phi_to_json(f), "exponent": e} for f, e in self.factors]}


# --------------------------------------------------------------------- evaluation


def eval_phi(phi: PhiSpec, t):
    """Evaluate ``phi`` at ``t > 0`` (scalar or array), including the normalization scale."""
    arr = np.asarray(t, dtype=float)
    if np.any(~(arr > 0)):
        raise ValueError("phi is only defined for t > 0")
    out = phi.scale * phi._raw(arr)
    return float(out) if np.ndim(out) == 0 else out


def log2_dyadic(phi: PhiSpec, j) -> np.ndarray:
    """``log2 phi(2**-j)`` computed without forming tiny intermediate values."""
    jj = np.asarray(j, dtype=int)
    return np.asarray(phi._log2_raw_dyadic(jj), dtype=float) + math.log2(phi.scale)


def dyadic_samples(phi: PhiSpec, J: int) -> np.ndarray:
    """``phi(2**-j)`` for ``j = 0..J``."""
    if J < 0:
        raise ValueError("J must be non-negative")
    if isinstance(phi, Tabulated):
        if J > phi.J:
            raise ValueError(f"tabulated weight only has levels 0..{phi.J}")
        return np.asarray(phi.samples[: J + 1]) * phi.scale
    return np.exp2(log2_dyadic(phi, np.arange(J + 1)))


def normalize(phi: PhiSpec) -> PhiSpec:
    """Rescale so that ``phi(1) = 1``; the rate annotation is unchanged."""
    if isinstance(phi, Tabulated):
        s0 = phi.samples[0] * phi.scale
        return replace(
            phi, samples=tuple(x * phi.scale / s0 for x in phi.samples), scale=1.0, normalized=True
        )
    at_one = float(phi._raw(np.asarray(1.0)))
    if not (at_one > 0 and math.isfinite(at_one)):
        raise ValueError("phi(1) must be finite and positive")
    return replace(phi, scale=1.0 / at_one, normalized=True)


def rate_at_zero(phi: PhiSpec) -> RateTerm:
    """Closed-form asymptotic class of ``phi(2**-j)``."""
    return phi.rate()


def limit_at_zero_positive(phi: PhiSpec) -> bool | None:
    """Whether ``lim_{t->0} phi(t) > 0``; ``None`` when only a low-confidence rate is known."""
    r = phi.rate()
    if r.low:
        return None
    return r.bounded_below()


# --------------------------------------------------------------------- validation


@dataclass(frozen=True)
class GpReport:
    """Outcome of the dyadic G_p test."""

    monotone_ok: bool
    gp_ok: bool
    first_violation_level: int | None

    @property
    def ok(self) -> bool:
        return self.monotone_ok and self.gp_ok

    def __bool__(self) -> bool:
        return self.ok


def _first_increase(x: np.ndarray) -> int | None:
    """First ``j`` with ``x[j+1] > x[j]`` beyond rounding, else ``None``."""
    diff = x[1:] - x[:-1]
    bad = np.nonzero(diff > _REL_TOL * np.maximum(1.0, np.abs(x[:-1])))[0]
    return int(bad[0]) if bad.size else None


def validate_gp(phi: PhiSpec, p: float, J: int) -> GpReport:
    """Check monotonicity and the G_p condition at the dyadic points ``2**-j``, ``j <= J``."""
    if not p > 0:
        raise ValueError("p must be positive")
    if J < 2:
        raise ValueError("J must be at least 2")
    lg = log2_dyadic(phi, np.arange(J + 1))
    mono = _first_increase(lg)
    gp = _first_increase(-(lg + np.arange(J + 1) * phi.d / p))
    levels = [v + 1 for v in (mono, gp) if v is not None]
    return GpReport(mono is None, gp is None, min(levels) if levels else None)


@dataclass(frozen=True)
class IntcReport:
    """Outcome of the dyadic test for ``t**eps / phi(t) <= C r**eps / phi(r)``, ``t >= r``.

    ``ok`` is decided by the rate annotation; ``constant`` is the smallest ``C``
    that works on levels ``0..J``.  ``ok`` is ``None`` for low-confidence rates.
    """

    ok: bool | None
    constant: float
    note: str = ""

    def __bool__(self) -> bool:
        return bool(self.ok)


def validate_intc(phi: PhiSpec, epsilon: float, J: int) -> IntcReport:
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    j = np.arange(J + 1)
    lg = -epsilon * j - log2_dyadic(phi, j)
    excess = np.maximum.accumulate(lg) - lg
    constant = float(np.exp2(excess.max()))
    rate = RateTerm(epsilon, 0.0) * phi.rate() ** -1.0
    note = "inconclusive beyond J" if isinstance(phi, Tabulated) else ""
    if rate.low:
        return IntcReport(None, constant, note)
    return IntcReport(rate.bounded_below(), constant, note)


def smallest_intc_epsilon(
    phi: PhiSpec, J: int = 64, grid: tuple[float, ...] = (1e-3, 1e-2, 0.05, 0.1, 0.25, 0.5, 1.0)
) -> float | None:
    """Smallest ``eps`` of ``grid`` for which :func:`validate_intc` passes."""
    for eps in sorted(grid):
        if validate_intc(phi, eps, J).ok:
            return eps
    return None


# --------------------------------------------------------------------- serialization

_FAMILIES: dict[str, type[PhiSpec]] = {
    cls.family: cls for cls in (Power, PiecewisePower, PowerLog, LogBlend, InvLog, PsiCritical, Tabulated)
}


def _num(x) -> float:
    if isinstance(x, str) and x.lower() in ("inf", "infinity"):
        return math.inf
    return float(x)


def _enc(x: float):
    return "inf" if x == math.inf else x


def phi_to_json(phi: PhiSpec) -> dict:
    doc = {"family": phi.family, "d": phi.d}
    doc.update({k: _enc(v) if isinstance(v, float) else v for k, v in phi.params().items()})
    return doc


def phi_from_json(doc: dict, d: int | None = None) -> PhiSpec:
    """Build a weight from its JSON form; ``d`` is used when the document omits it."""
    doc = dict(doc)
    name = doc.pop("family", None)
    if name not in _FAMILIES:
        raise ValueError(f"unknown weight family {name!r}")
    dim = int(doc.pop("d", d if d is not None else 1))
    if name == "tabulated":
        rate = RateTerm.from_json(doc.pop("rate")) if "rate" in doc else RateTerm(0, 0, Confidence.LOW)
        return Tabulated(tuple(doc.pop("samples")), rate, d=dim)
    kwargs = {k: _num(v) for k, v in doc.items()}
    try:
        return _FAMILIES[name](**kwargs, d=dim)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {name}: {exc}") from None
