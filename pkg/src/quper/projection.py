"""Projections from doubly-stochastic matrices onto permutations.

Permutations act in row convention here: the matrix of p has a 1 at
(i, p(i)), so projecting d means maximizing sum_i d[i, p(i)].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .dsm import Dsm
from .gf2 import Permutation

RANDOM_ORDER_TRIALS = 50


@dataclass(frozen=True)
class ProjectionResult:
    candidates: frozenset[Permutation]
    source: str


def project_hungarian(d: Dsm) -> Permutation:
    """Exact maximizer of sum_i d[i, p(i)], i.e. the closest permutation."""
    rows, cols = linear_sum_assignment(d.entries, maximize=True)
    return Permutation(tuple(int(c) for c in cols[np.argsort(rows)]))


def _base_vector(n: int) -> np.ndarray:
    # Powers of two keep every coefficient at least twice any smaller one;
    # representable in double precision up to n = 1024.
    if n <= 1024:
        return np.ldexp(1.0, np.arange(n))
    return np.arange(n, dtype=float)


def _order(v: np.ndarray) -> np.ndarray:
    # Stable order by (value, index): deterministic under ties.
    return np.argsort(v, kind="stable")


def project_random_order(
    d: Dsm, seed, trials: int = RANDOM_ORDER_TRIALS
) -> set[Permutation]:
    """Order-tracking projection: permute v, read how d.v reorders it.

    The returned p satisfies: the k-th smallest component of d.v sits at the
    row mapped to the position of the k-th smallest component of v.
    """
    n = d.n
    base = _base_vector(n)
    out: set[Permutation] = set()
    for t in range(trials):
        rng = np.random.default_rng(_substream(seed, t))
        v = base[rng.permutation(n)]
        u = d.entries @ v
        ov = _order(v)
        ou = _order(u)
        pmap = [0] * n
        for k in range(n):
            pmap[int(ou[k])] = int(ov[k])
        out.add(Permutation(tuple(pmap)))
    return out


def _substream(seed, t: int) -> list[int]:
    if isinstance(seed, (list, tuple)):
        return [*seed, t]
    return [int(seed), t]


def best_projection(d: Dsm, cost, seed, trials: int = RANDOM_ORDER_TRIALS):
    """Argmin of cost over the Hungarian and random-order candidates."""
    best_p = project_hungarian(d)
    best_v = float(cost(best_p))
    for p in sorted(project_random_order(d, seed, trials), key=lambda p: p.map):
        v = float(cost(p))
        if v < best_v:
            best_p, best_v = p, v
    return best_p, best_v
