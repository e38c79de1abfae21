"""Shared test utilities: instance generators and independent oracles."""

from fractions import Fraction
from math import ceil, lcm

import numpy as np

from sepfair.valuations import (ONE, ZERO, PiecewiseConstantValuation,
                                Topology, pieces_separated)

THIRDS = PiecewiseConstantValuation(
    ("0", "1/3", "2/3", "1"), ("6/5", "0", "9/5"))
UNIFORM = PiecewiseConstantValuation.uniform()
UNIFORM_PIE = PiecewiseConstantValuation.uniform(Topology.PIE)


def random_valuation(rng, topology=Topology.CAKE, max_segments=4,
                     zero_prob=0.25, denom=12):
    """Random normalized step density with rational data; some segments may
    be worthless (zero density) to exercise degenerate paths."""
    d = rng.randint(1, max_segments)
    cuts = sorted(rng.sample(range(1, 4 * denom), d - 1)) if d > 1 else []
    bps = [ZERO] + [Fraction(c, 4 * denom) for c in cuts] + [ONE]
    weights = []
    for _ in range(d):
        if rng.random() < zero_prob:
            weights.append(ZERO)
        else:
            weights.append(Fraction(rng.randint(1, denom), denom))
    if all(w == 0 for w in weights):
        weights[rng.randrange(d)] = Fraction(1)
    return PiecewiseConstantValuation.normalized(bps, weights, topology)


def random_separation(rng, upper, denom=40):
    """Random rational s in (0, upper)."""
    hi = max(int(upper * denom) - 1, 1)
    num = rng.randint(1, hi)
    s = Fraction(num, denom)
    if s >= upper:
        s = upper * Fraction(rng.randint(1, 9), 10)
    return s


def max_density(v):
    return max(v.densities)


def verify_partition(v, partition, threshold, exact=False):
    """Every piece worth at least the threshold and separation valid."""
    assert pieces_separated(partition.pieces, partition.s, v.topology,
                            exact=exact)
    for piece in partition.pieces:
        assert v.value(piece) >= threshold


def verify_allocation(alloc, vs, thresholds=None):
    ordered = [piece for _, piece in sorted(
        alloc.assignment.items(), key=lambda kv: kv[1].left)]
    assert pieces_separated(ordered, alloc.s, alloc.topology)
    if thresholds is not None:
        for i, v in enumerate(vs):
            assert v.value(alloc.assignment[i]) >= thresholds[i]


def pie_grid_oracle(v, k, s, grid=2000):
    """Underestimating 1-out-of-k share on a pie: best min-value over
    partitions whose endpoints lie on the 1/grid lattice with separators of
    at least ceil(s*grid) lattice steps.

    Always at most the true share (any accepted threshold comes with a
    valid partition); within 2*max_density/grid + s-rounding of it (shrink
    a true optimal partition's endpoints onto the lattice).
    """
    s = Fraction(s)
    su = ceil(s * grid)
    prefix = [ZERO]
    pos = ZERO
    step = Fraction(1, grid)
    acc = ZERO
    for i in range(grid):
        acc += v.value_between(pos, pos + step)
        prefix.append(acc)
        pos += step
    den = lcm(*(p.denominator for p in prefix))
    P = [int(p * den) for p in prefix]
    # doubled prefix for wrap-around walks
    P2 = np.array(P + [P[grid] + x for x in P[1:]], dtype=np.int64)
    top = 2 * grid
    big = top + su + 1   # unreachable sentinel
    starts = np.arange(grid, dtype=np.int64)

    def feasible(t_int):
        # next-piece-start map: first lattice point whose prefix gain from z
        # reaches t, plus one separator of su lattice steps
        h = np.searchsorted(P2, P2 + t_int, side="left") + su
        h = np.minimum(h, big)
        ext = np.full(big + 1, big, dtype=np.int64)
        ext[:top + 1] = h[:top + 1]
        pos = starts.copy()
        for _ in range(k):
            pos = ext[np.minimum(pos, big)]
        return bool(np.any(pos <= starts + grid))

    lo, hi = 0, den // k + 1   # the share never exceeds 1/k
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return Fraction(lo, den)


def sliding_window_min(v, s):
    from sepfair.valuations import minimum_window_value
    return minimum_window_value(v, s)
