"""Extremal sequence families, numerical non-compactness probes and the interpolation check.

The families are the ones used in the necessity arguments: one cube per level
normalized in the source or in the target, a filled subcube, and the single
cubes used against sup-type targets.  A probe reports the largest source norm
and the smallest pairwise target distance; a bounded family whose members stay
uniformly apart in the target is numerical evidence against compactness.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .indices import PairContext, alpha_seq
from .phi import PhiProduct, Power, log2_dyadic, normalize
from .rates import sign0
from .seqspace import (
    DyadicSeq,
    Level,
    NormParams,
    b_cube_values,
    b_norm,
    besov_sup_norm,
    _linear_keys,
    ell_q,
    n_norm_star,
)
from .verdict import Scale, SpaceSpec

MAX_FILL_CELLS = 10**7


class Scaling(str, enum.Enum):
    SOURCE = "source_normalized"
    TARGET = "target_normalized"


class WitnessUnavailable(ValueError):
    """No construction is implemented for this parameter regime."""


@dataclass(frozen=True)
class WitnessFamily:
    members: tuple[DyadicSeq, ...]
    construction_id: str
    levels: tuple[int, ...]
    scaling: str = ""
    params: dict = field(default_factory=dict, compare=False, hash=False)

    def scaled(self, c: float) -> WitnessFamily:
        return WitnessFamily(
            tuple(m.scaled(c) for m in self.members), self.construction_id, self.levels,
            self.scaling, dict(self.params, factor=c),
        )


@dataclass(frozen=True)
class ProbeReport:
    max_source_norm: float
    min_pairwise_target_gap: float | None
    J: int
    K: int
    source_norms: tuple[float, ...] = ()
    target_norms: tuple[float, ...] = ()
    construction_id: str = ""
    note: str = ""

    def to_json(self) -> dict:
        return {
            "construction": self.construction_id,
            "J": self.J,
            "K": self.K,
            "max_source_norm": self.max_source_norm,
            "min_pairwise_target_gap": self.min_pairwise_target_gap,
            "source_norms": list(self.source_norms),
            "target_norms": list(self.target_norms),
            "note": self.note,
        }

    def csv_rows(self) -> list[tuple[int, float, float]]:
        """``(k, source_norm, gap)``; the gap of member ``k`` is its own target norm."""
        return [(k + 1, s, t) for k, (s, t) in enumerate(zip(self.source_norms, self.target_norms))]


# --------------------------------------------------------------------- norms by scale


def space_norm(lam: DyadicSeq, spec: SpaceSpec) -> float:
    """Sequence-space norm matching ``spec``."""
    sc = spec.scale
    if sc is Scale.N:
        return n_norm_star(lam, NormParams(spec.s, spec.p, spec.q, spec.phi))
    if sc is Scale.B:
        return b_norm(lam, NormParams(spec.s, spec.p, spec.q, spec.phi))
    if sc is Scale.CLASSICAL_BESOV:
        if spec.p == math.inf:
            return besov_sup_norm(lam, spec.s, spec.q)
        return n_norm_star(lam, NormParams(spec.s, spec.p, spec.q, Power(spec.p, d=spec.d)))
    raise ValueError(f"no sequence norm for scale {sc.value}")


def _single(d: int, J: int, j: int, value: float) -> DyadicSeq:
    return DyadicSeq(d, J, {j: Level(np.zeros((1, d), dtype=np.int64), np.array([value]))})


def _check_levels(levels) -> tuple[int, ...]:
    lv = tuple(int(j) for j in levels)
    if any(b <= a for a, b in zip(lv, lv[1:])) or (lv and lv[0] < 0):
        raise ValueError("levels must be strictly increasing and non-negative")
    return lv


# --------------------------------------------------------------------- families


def build_family_single_cube(
    src: SpaceSpec,
    levels,
    scaling: Scaling | str = Scaling.SOURCE,
    tgt: SpaceSpec | None = None,
    J: int | None = None,
) -> WitnessFamily:
    """One cube per member at ``(j_k, 0)`` with magnitude ``2**(-j_k s) / phi(2**-j_k)``.

    ``(s, phi)`` come from the source, or from ``tgt`` for the target-normalized variant.
    """
    scaling = Scaling(scaling)
    lv = _check_levels(levels)
    ref = src if scaling is Scaling.SOURCE else tgt
    if ref is None:
        raise ValueError("target-normalized family needs the target space")
    J = max(lv, default=0) if J is None else J
    lphi = log2_dyadic(ref.phi, np.asarray(lv)) if lv else np.zeros(0)
    members = tuple(
        _single(src.d, J, j, float(np.exp2(-j * ref.s - lp))) for j, lp in zip(lv, lphi)
    )
    return WitnessFamily(members, "single_cube", lv, scaling.value)


def build_family_filling(src: SpaceSpec, j0: int, levels, s2: float | None = None, J: int | None = None) -> WitnessFamily:
    """Member ``k`` is ``2**(-j_k s2) / phi1(2**-j0)`` on every level-``j_k`` cube inside ``Q_{j0,0}``.

    ``s2`` defaults to the source smoothness; the construction is used when both agree.
    """
    lv = _check_levels(levels)
    if any(j <= j0 for j in lv):
        raise ValueError("all levels must exceed j0")
    d = src.d
    for j in lv:
        if 2 ** ((j - j0) * d) > MAX_FILL_CELLS:
            raise ValueError(f"filling level {j} would need more than {MAX_FILL_CELLS} cells")
    s2 = src.s if s2 is None else s2
    J = max(lv, default=0) if J is None else J
    inv_phi = float(np.exp2(-log2_dyadic(src.phi, np.array(j0))))
    members = []
    for j in lv:
        side = 2 ** (j - j0)
        grid = np.stack(np.meshgrid(*[np.arange(side)] * d, indexing="ij"), -1).reshape(-1, d)
        val = np.full(grid.shape[0], 2.0 ** (-j * s2) * inv_phi)
        members.append(DyadicSeq(d, J, {j: Level(grid.astype(np.int64), val)}))
    return WitnessFamily(tuple(members), "filling", lv, "source_normalized", {"j0": j0})


def build_family_binf(src: SpaceSpec, levels, J: int | None = None) -> WitnessFamily:
    """Single cubes with unit Besov-type norm in the source."""
    if src.scale is not Scale.B:
        raise ValueError("binf family needs a Besov-type source")
    fam = build_family_single_cube(src, levels, Scaling.SOURCE, J=J)
    return WitnessFamily(fam.members, "binf", fam.levels, fam.scaling)


# --------------------------------------------------------------------- probing


def probe_compactness(family: WitnessFamily, src: SpaceSpec, tgt: SpaceSpec) -> ProbeReport:
    """Source norms of the members and target distances between them."""
    K = len(family.members)
    J = max((m.J for m in family.members), default=0)
    if K == 0:
        return ProbeReport(0.0, None, J, 0, construction_id=family.construction_id, note="empty family")
    src_n = tuple(space_norm(m, src) for m in family.members)
    tgt_n = tuple(space_norm(m, tgt) for m in family.members)
    if K < 2:
        return ProbeReport(max(src_n), None, J, K, src_n, tgt_n, family.construction_id, "need K>=2")
    gaps = [
        space_norm(a.abs_diff(b), tgt) for a, b in itertools.combinations(family.members, 2)
    ]
    note = "separation threshold 0.25 times the estimated lim sup is a convention of this package"
    return ProbeReport(max(src_n), min(gaps), J, K, src_n, tgt_n, family.construction_id, note)


def xi_samples(src: SpaceSpec, tgt: SpaceSpec, J: int) -> np.ndarray:
    """``2**(j(s2-s1)) alpha_j phi1(2**-j)**(rho-1)`` for ``j = 0..J``."""
    ctx = PairContext(src.p, tgt.p, src.phi, tgt.phi, src.q, tgt.q)
    j = np.arange(J + 1)
    lg = j * (tgt.s - src.s) + np.log2(alpha_seq(ctx, J)) + (ctx.rho - 1.0) * log2_dyadic(src.phi, j)
    return np.exp2(lg)


def limsup_estimate(xi: np.ndarray) -> float:
    """Largest value over the second half of the samples."""
    return float(xi[len(xi) // 2 :].max())


def select_witness(src: SpaceSpec, tgt: SpaceSpec, J: int = 40, K: int = 6) -> WitnessFamily:
    """Pick the construction that the necessity argument uses for this pair of N spaces."""
    ctx = PairContext(src.p, tgt.p, src.phi, tgt.phi, src.q, tgt.q)
    ratio = ctx.ratio_rate()
    levels = [4 * k for k in range(1, K + 1)]
    if max(levels) > J:
        raise ValueError("default levels 4k exceed the truncation")
    b, g = sign0(ratio.beta), sign0(ratio.gamma)
    if b < 0 or (b == 0 and g > 0):
        # the prefix supremum diverges and is attained along the levels
        return build_family_single_cube(src, levels, Scaling.TARGET, tgt, J)
    if tgt.phi.rate().bounded_below():
        return build_family_single_cube(src, levels, Scaling.SOURCE, tgt, J)
    if b == 0 and g == 0:
        return build_family_single_cube(src, levels, Scaling.TARGET, tgt, J)
    if ctx.rho < 1.0:
        raise WitnessUnavailable("attained supremum with p1 < p2: construction not reproduced")
    j0 = int(np.argmax(ctx.log2_ratio(J)))
    return build_family_filling(src, j0, [j0 + k for k in range(1, K + 1)], s2=tgt.s, J=J)


# --------------------------------------------------------------------- interpolation


@dataclass(frozen=True)
class GNReport:
    interpolated: float
    bound: float
    ratio: float
    max_cube_ratio: float


def _sup_cube_values(lam: DyadicSeq, s: float, q: float) -> dict[tuple[int, int], float]:
    """Inner quantity of the sup-type norm ``b^s_{inf,q}`` for every cube meeting the support."""
    out: dict[tuple[int, int], float] = {}
    for nu in range(lam.J + 1):
        terms: dict[int, list[float]] = {}
        for j, lev in lam.levels.items():
            if j < nu:
                continue
            keys = _linear_keys(lev.pos >> (j - nu), nu)
            order = np.argsort(keys, kind="stable")
            uk, starts = np.unique(keys[order], return_index=True)
            mx = np.maximum.reduceat(lev.val[order], starts)
            for k, v in zip(uk.tolist(), mx.tolist()):
                terms.setdefault(k, []).append(2.0 ** (j * s) * v)
        for k, vals in terms.items():
            out[(nu, k)] = ell_q(np.asarray(vals), q)
    return out


def _inv(x: float) -> float:
    return 0.0 if x == math.inf else 1.0 / x


def gn_check(lam: DyadicSeq, params1: NormParams, params2: NormParams, theta: float) -> GNReport:
    """Compare the interpolated Besov-type norm with the product of the endpoint norms.

    ``params2.p = inf`` selects the sup-type endpoint, where ``params2.phi`` is ignored.
    The per-cube ratio is the quantity bounded by two applications of Hoelder's inequality.
    """
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    if sign0(params1.s - params2.s) <= 0:
        raise ValueError("interpolation needs s2 < s1")
    s = (1 - theta) * params1.s + theta * params2.s
    q_inv = (1 - theta) * _inv(params1.q) + theta * _inv(params2.q)
    q = math.inf if q_inv == 0 else 1.0 / q_inv
    sup_end = params2.p == math.inf
    if sup_end:
        p = params1.p / (1 - theta)
        phi = PhiProduct(((params1.phi, 1 - theta),), d=params1.phi.d)
    else:
        p = 1.0 / ((1 - theta) / params1.p + theta / params2.p)
        phi = PhiProduct(((params1.phi, 1 - theta), (params2.phi, theta)), d=params1.phi.d)
    mid = NormParams(s, p, q, normalize(phi))
    c = b_cube_values(lam, mid)
    c1 = b_cube_values(lam, params1)
    c2 = _sup_cube_values(lam, params2.s, params2.q) if sup_end else b_cube_values(lam, params2)
    worst = 0.0
    for key, v in c.items():
        prod = c1.get(key, 0.0) ** (1 - theta) * c2.get(key, 0.0) ** theta
        if v > 0:
            worst = max(worst, v / prod if prod > 0 else math.inf)
    n = max(c.values(), default=0.0)
    n1 = max(c1.values(), default=0.0)
    n2 = max(c2.values(), default=0.0)
    bound = n1 ** (1 - theta) * n2**theta
    ratio = n / bound if bound > 0 else (0.0 if n == 0 else math.inf)
    return GNReport(float(n), float(bound), float(ratio), float(worst))


# --------------------------------------------------------------------- random sequences


def random_seq(seed: int, d: int, J: int, density: float, distribution: str = "uniform01") -> DyadicSeq:
    """Random sparse sequence; each cube is kept with probability ``density``."""
    if not 0 < density <= 1:
        raise ValueError("density must lie in (0, 1]")
    if distribution not in ("uniform01", "dyadic-decaying"):
        raise ValueError(f"unknown distribution {distribution!r}")
    rng = np.random.default_rng(seed)
    levels = {}
    for j in range(J + 1):
        n = 2 ** (j * d)
        keep = np.nonzero(rng.random(n) < density)[0]
        # 1 - U lies in (0, 1], so every kept entry is nonzero
        val = 1.0 - rng.random(keep.size)
        if distribution == "dyadic-decaying":
            val = val * 2.0**-j
        pos = np.stack(np.unravel_index(keep, (2**j,) * d), -1) if keep.size else np.zeros((0, d), dtype=np.int64)
        levels[j] = Level(pos, val)
    return DyadicSeq(d, J, levels)
