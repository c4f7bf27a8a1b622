"""Dyadic coefficient sequences on the unit cube and their quasi-norms.

Storage is level-wise: each level keeps an integer array of cube positions and
a float array of non-negative magnitudes.  Positions inside the unit cube at
level ``j`` satisfy ``0 <= m_i < 2**j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .phi import PhiSpec, Tabulated, log2_dyadic, normalize

Index = tuple[int, tuple[int, ...]]


@dataclass(frozen=True)
class DyadicIndex:
    """The cube ``Q_{j,m} = 2**-j ([0,1)^d + m)`` inside the unit cube."""

    j: int
    m: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.j < 0:
            raise ValueError("level must be non-negative")
        if any(not 0 <= mi < 2**self.j for mi in self.m):
            raise ValueError(f"cube {self.m} at level {self.j} leaves the unit cube")

    def parent(self, nu: int) -> DyadicIndex:
        """The ancestor at level ``nu <= j``."""
        shift = self.j - nu
        return DyadicIndex(nu, tuple(mi >> shift for mi in self.m))


@dataclass(frozen=True)
class Level:
    """All stored cubes of one level: positions ``(n, d)`` and magnitudes ``(n,)``."""

    pos: np.ndarray
    val: np.ndarray


@dataclass(frozen=True, eq=False)
class DyadicSeq:
    """A non-negative sequence indexed by dyadic cubes of the unit cube, truncated at ``J``."""

    d: int
    J: int
    levels: Mapping[int, Level] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.d < 1 or self.J < 0:
            raise ValueError("need d >= 1 and J >= 0")
        clean = {}
        for j, lev in self.levels.items():
            pos = np.asarray(lev.pos, dtype=np.int64).reshape(-1, self.d)
            val = np.asarray(lev.val, dtype=float).reshape(-1)
            if not 0 <= j <= self.J:
                raise ValueError(f"level {j} outside 0..{self.J}")
            if pos.shape[0] != val.shape[0]:
                raise ValueError("positions and values disagree in length")
            if np.any(pos < 0) or np.any(pos >= 2**j):
                raise ValueError(f"a cube at level {j} leaves the unit cube")
            if np.any(val < 0) or not np.all(np.isfinite(val)):
                raise ValueError("magnitudes must be finite and non-negative")
            keep = val > 0
            if keep.any():
                clean[int(j)] = Level(pos[keep], val[keep])
        object.__setattr__(self, "levels", dict(sorted(clean.items())))

    @classmethod
    def from_entries(cls, d: int, J: int, entries: Mapping[Index, float] | Iterable[tuple[Index, float]]) -> DyadicSeq:
        items = entries.items() if isinstance(entries, Mapping) else entries
        acc: dict[tuple[int, tuple[int, ...]], float] = {}
        for (j, m), v in items:
            m = (m,) if isinstance(m, int) else tuple(m)
            if len(m) != d:
                raise ValueError(f"position {m} does not have dimension {d}")
            acc[(int(j), m)] = abs(float(v))
        by_level: dict[int, tuple[list, list]] = {}
        for (j, m), v in sorted(acc.items()):
            by_level.setdefault(j, ([], []))
            by_level[j][0].append(m)
            by_level[j][1].append(v)
        return cls(d, J, {j: Level(np.array(p), np.array(v)) for j, (p, v) in by_level.items()})

    @classmethod
    def zero(cls, d: int, J: int) -> DyadicSeq:
        return cls(d, J, {})

    def entries(self) -> dict[Index, float]:
        out = {}
        for j, lev in self.levels.items():
            for m, v in zip(lev.pos, lev.val):
                out[(j, tuple(int(x) for x in m))] = float(v)
        return out

    def scaled(self, c: float) -> DyadicSeq:
        return DyadicSeq(self.d, self.J, {j: Level(l.pos, abs(c) * l.val) for j, l in self.levels.items()})

    def abs_diff(self, other: DyadicSeq) -> DyadicSeq:
        """Entrywise ``|self - other|`` (magnitudes are treated as signed-equal coefficients)."""
        if other.d != self.d:
            raise ValueError("dimension mismatch")
        a, b = self.entries(), other.entries()
        keys = set(a) | set(b)
        return DyadicSeq.from_entries(
            self.d, max(self.J, other.J), {k: abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys}
        )

    @property
    def nnz(self) -> int:
        return sum(len(l.val) for l in self.levels.values())

    def level_max(self, j: int) -> float:
        lev = self.levels.get(j)
        return float(lev.val.max()) if lev is not None else 0.0

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "J": self.J,
            "entries": [{"j": j, "m": list(m), "v": v} for (j, m), v in sorted(self.entries().items())],
        }

    @classmethod
    def from_json(cls, doc: dict) -> DyadicSeq:
        d, J = int(doc["d"]), int(doc["J"])
        return cls.from_entries(d, J, [((int(e["j"]), tuple(e["m"])), float(e["v"])) for e in doc.get("entries", [])])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DyadicSeq) and (self.d, self.J, self.entries()) == (other.d, other.J, other.entries())


@dataclass(frozen=True)
class NormParams:
    """Smoothness ``s``, integrability ``p``, summability ``q`` (may be ``inf``) and weight ``phi``."""

    s: float
    p: float
    q: float
    phi: PhiSpec

    def __post_init__(self) -> None:
        if not self.p > 0:
            raise ValueError("p must be positive")
        if not self.q > 0:
            raise ValueError("q must be positive or inf")
        if not self.phi.normalized:
            object.__setattr__(self, "phi", normalize(self.phi))


# --------------------------------------------------------------------- helpers


def ell_q(values, q: float) -> float:
    """``(sum |v|**q)**(1/q)``, or ``max |v|`` when ``q = inf``."""
    v = np.abs(np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float))
    if v.size == 0:
        return 0.0
    if q == math.inf:
        return float(v.max())
    if not q > 0:
        raise ValueError("q must be positive or inf")
    top = v.max()
    if top == 0:
        return 0.0
    # factor out the maximum so that large q does not overflow
    return float(top * math.fsum((v / top) ** q) ** (1.0 / q))


def _phi_at_levels(phi: PhiSpec, levels) -> np.ndarray:
    return np.exp2(log2_dyadic(phi, np.asarray(levels)))


def _linear_keys(pos: np.ndarray, level: int) -> np.ndarray:
    """Encode positions at ``level`` as single integers (row-major)."""
    side = 1 << level
    key = np.zeros(pos.shape[0], dtype=np.int64)
    for i in range(pos.shape[1]):
        key = key * side + pos[:, i]
    return key


def _grouped_sums(keys: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sums of ``values`` grouped by ``keys`` with compensated summation per group."""
    order = np.argsort(keys, kind="stable")
    ks, vs = keys[order], values[order]
    uniq, starts = np.unique(ks, return_index=True)
    bounds = list(starts[1:]) + [len(ks)]
    sums = np.fromiter(
        (math.fsum(vs[a:b]) for a, b in zip(starts, bounds)), dtype=float, count=len(uniq)
    )
    return uniq, sums


def _parent_sums(lev: Level, j: int, nu: int, p: float) -> tuple[np.ndarray, np.ndarray]:
    """``sum_{Q_{j,m} in Q_{nu,k}} lambda**p`` for every occupied ``k``."""
    return _grouped_sums(_linear_keys(lev.pos >> (j - nu), nu), lev.val**p)


def _check(lam: DyadicSeq, params: NormParams) -> None:
    if lam.d != params.phi.d:
        raise ValueError("sequence and weight dimensions differ")


# --------------------------------------------------------------------- norms


def _n_level_values(lam: DyadicSeq, params: NormParams) -> np.ndarray:
    """For each ``j``: ``sup_{nu <= j, k} phi(2**-nu) 2**((nu-j)d/p) (sum lambda**p)**(1/p)``."""
    d, p = lam.d, params.p
    phis = _phi_at_levels(params.phi, range(lam.J + 1))
    out = np.zeros(lam.J + 1)
    for j, lev in lam.levels.items():
        best = 0.0
        for nu in range(j + 1):
            _, sums = _parent_sums(lev, j, nu, p)
            best = max(best, phis[nu] * 2.0 ** ((nu - j) * d / p) * float(sums.max()) ** (1.0 / p))
        out[j] = best
    return out


def n_norm_star(lam: DyadicSeq, params: NormParams) -> float:
    """Besov-Morrey sequence quasi-norm with the sup restricted to cubes inside the unit cube."""
    _check(lam, params)
    a = _n_level_values(lam, params)
    return ell_q(np.exp2(np.arange(lam.J + 1) * params.s) * a, params.q)


def n_norm_morrey(lam: DyadicSeq, params: NormParams, nu_min: int = -5) -> float:
    """Same quasi-norm, evaluated as the dyadic Morrey norm of each level's step function.

    The supremum runs over all dyadic cubes ``P`` of side ``2**-nu`` with
    ``nu_min <= nu <= J``; cubes larger than the unit cube and cubes smaller than
    the level's cubes are included.
    """
    _check(lam, params)
    d, p, phi = lam.d, params.p, params.phi
    lo = nu_min if not isinstance(phi, Tabulated) else 0
    nus = np.arange(lo, lam.J + 1)
    phis = dict(zip(nus.tolist(), np.exp2(log2_dyadic(phi, nus)).tolist()))
    a = np.zeros(lam.J + 1)
    for j, lev in lam.levels.items():
        best = 0.0
        vp = lev.val**p
        total = math.fsum(vp)
        for nu in nus.tolist():
            if nu < 0:
                # the only cube meeting the support is the one containing the unit cube
                integral = total * 2.0 ** (-j * d)
            elif nu <= j:
                _, sums = _parent_sums(lev, j, nu, p)
                integral = float(sums.max()) * 2.0 ** (-j * d)
            else:
                integral = float(vp.max()) * 2.0 ** (-nu * d)
            best = max(best, phis[nu] * (2.0 ** (nu * d) * integral) ** (1.0 / p))
        a[j] = best
    return ell_q(np.exp2(np.arange(lam.J + 1) * params.s) * a, params.q)


def b_cube_values(lam: DyadicSeq, params: NormParams) -> dict[tuple[int, int], float]:
    """Inner quantity of the Besov-type norm for every cube ``P`` that meets the support.

    Keys are ``(nu, linear position)``; the value is
    ``phi(2**-nu) |P|**(-1/p) (sum_{j >= nu} 2**(j(s-d/p)q) (sum_{Q_{j,m} in P} lambda**p)**(q/p))**(1/q)``.
    """
    _check(lam, params)
    d, s, p, q = lam.d, params.s, params.p, params.q
    phis = _phi_at_levels(params.phi, range(lam.J + 1))
    out: dict[tuple[int, int], float] = {}
    for nu in range(lam.J + 1):
        terms: dict[int, list[float]] = {}
        for j, lev in lam.levels.items():
            if j < nu:
                continue
            keys, sums = _parent_sums(lev, j, nu, p)
            w = 2.0 ** (j * (s - d / p))
            for k, v in zip(keys.tolist(), sums.tolist()):
                terms.setdefault(k, []).append(w * v ** (1.0 / p))
        for k, vals in terms.items():
            out[(nu, k)] = phis[nu] * 2.0 ** (nu * d / p) * ell_q(np.asarray(vals), q)
    return out


def b_norm(lam: DyadicSeq, params: NormParams) -> float:
    """Besov-type sequence quasi-norm: supremum over cubes ``P`` of the windowed ``l_q(l_p)`` sum."""
    vals = b_cube_values(lam, params)
    return float(max(vals.values(), default=0.0))


def besov_sup_norm(lam: DyadicSeq, s: float, q: float) -> float:
    """``l_q`` over levels of ``2**(js) max_m lambda_{j,m}``."""
    maxes = np.array([lam.level_max(j) for j in range(lam.J + 1)])
    return ell_q(np.exp2(np.arange(lam.J + 1) * s) * maxes, q)
