"""Brute-force reference evaluators used by the tests.

These loop over every dyadic cube explicitly and share no code with the
package's vectorized evaluators apart from weight evaluation at ``2**-nu``.
"""

from __future__ import annotations

import itertools
import math


def phi_at(phi, nu: int) -> float:
    return float(phi(2.0 ** (-nu)))


def _lq(values, q):
    values = list(values)
    if not values:
        return 0.0
    if q == math.inf:
        return max(values)
    return sum(v**q for v in values) ** (1.0 / q)


def _inside(m, j, k, nu):
    """Is ``Q_{j,m}`` contained in ``Q_{nu,k}`` (``nu <= j``)?"""
    return all(mi >> (j - nu) == ki for mi, ki in zip(m, k))


def _cubes(nu, d):
    return itertools.product(range(2**nu), repeat=d)


def n_star(entries: dict, d: int, J: int, s: float, p: float, q: float, phi) -> float:
    levels = []
    for j in range(J + 1):
        best = 0.0
        for nu in range(j + 1):
            for k in _cubes(nu, d):
                tot = sum(v**p for (jj, m), v in entries.items() if jj == j and _inside(m, j, k, nu))
                best = max(best, phi_at(phi, nu) * 2.0 ** ((nu - j) * d / p) * tot ** (1.0 / p))
        levels.append(2.0 ** (j * s) * best)
    return _lq(levels, q)


def b_type(entries: dict, d: int, J: int, s: float, p: float, q: float, phi) -> float:
    best = 0.0
    for nu in range(J + 1):
        for k in _cubes(nu, d):
            terms = []
            for j in range(nu, J + 1):
                tot = sum(v**p for (jj, m), v in entries.items() if jj == j and _inside(m, j, k, nu))
                terms.append(2.0 ** (j * (s - d / p)) * tot ** (1.0 / p))
            best = max(best, phi_at(phi, nu) * 2.0 ** (nu * d / p) * _lq(terms, q))
    return best


def besov_sup(entries: dict, J: int, s: float, q: float) -> float:
    maxes = [max([v for (jj, _), v in entries.items() if jj == j], default=0.0) for j in range(J + 1)]
    return _lq([2.0 ** (j * s) * m for j, m in enumerate(maxes)], q)
