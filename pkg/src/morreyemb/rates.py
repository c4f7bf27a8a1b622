"""Log-power rate algebra for dyadic sequences.

A :class:`RateTerm` ``(beta, gamma)`` stands for any positive sequence that is
two-sided comparable to ``2**(-beta*j) * j**gamma`` as ``j -> oo``.  Products,
real powers and prefix suprema of such sequences stay inside the class, which
is what lets every tail decision in this package be made exactly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

# Rates built from decimal parameters carry float residue; anything closer to
# zero than this is treated as an exact zero.
ZERO_TOL = 1e-12


class Confidence(str, enum.Enum):
    """How much a rate annotation can be trusted."""

    EXACT = "exact"
    ASSERTED = "asserted"
    LOW = "low"


def sign0(x: float, tol: float = ZERO_TOL) -> int:
    """Return -1, 0 or 1 with a dead zone of width ``tol`` around zero."""
    if x > tol:
        return 1
    if x < -tol:
        return -1
    return 0


def _weakest(a: Confidence, b: Confidence) -> Confidence:
    order = [Confidence.EXACT, Confidence.ASSERTED, Confidence.LOW]
    return order[max(order.index(a), order.index(b))]


@dataclass(frozen=True)
class RateTerm:
    """Asymptotic class ``2**(-beta j) j**gamma`` of a positive sequence."""

    beta: float
    gamma: float = 0.0
    confidence: Confidence = Confidence.EXACT

    def __post_init__(self) -> None:
        if not (math.isfinite(self.beta) and math.isfinite(self.gamma)):
            raise ValueError("rate components must be finite")
        object.__setattr__(self, "confidence", Confidence(self.confidence))

    @classmethod
    def geometric(cls, c: float) -> RateTerm:
        """Rate of the sequence ``2**(c j)``."""
        return cls(-c, 0.0)

    @property
    def low(self) -> bool:
        return self.confidence is Confidence.LOW

    def __mul__(self, other: RateTerm) -> RateTerm:
        return RateTerm(
            self.beta + other.beta,
            self.gamma + other.gamma,
            _weakest(self.confidence, other.confidence),
        )

    def __pow__(self, r: float) -> RateTerm:
        return RateTerm(r * self.beta, r * self.gamma, self.confidence)

    def __truediv__(self, other: RateTerm) -> RateTerm:
        return self * other**-1.0

    def prefix_sup(self) -> RateTerm:
        """Rate of ``max_{nu <= j} x_nu``.

        Growing sequences keep their rate; bounded ones have a prefix supremum
        that settles at a positive constant.
        """
        b = sign0(self.beta)
        if b < 0 or (b == 0 and sign0(self.gamma) > 0):
            return self
        return RateTerm(0.0, 0.0, self.confidence)

    def bounded(self) -> bool:
        """Whether the sequence is bounded (ignores confidence)."""
        b = sign0(self.beta)
        return b > 0 or (b == 0 and sign0(self.gamma) <= 0)

    def bounded_below(self) -> bool:
        """Whether the sequence stays away from zero (ignores confidence)."""
        b = sign0(self.beta)
        return b < 0 or (b == 0 and sign0(self.gamma) >= 0)

    def to_json(self) -> dict:
        return {"beta": self.beta, "gamma": self.gamma, "confidence": self.confidence.value}

    @classmethod
    def from_json(cls, doc: dict) -> RateTerm:
        return cls(
            float(doc["beta"]),
            float(doc.get("gamma", 0.0)),
            Confidence(doc.get("confidence", "asserted")),
        )


ONE = RateTerm(0.0, 0.0)
