"""Exact best-guaranteed-share computation for explicit valuations.

For a piecewise-constant valuation given explicitly, the best min-value
over partitions into n pieces separated by exactly s is the optimum of a
small linear program once we know, for every piece endpoint, which density
segment it lands in.  ``select_interval_list`` finds one valid assignment
of endpoints to segments by scanning candidate segments left to right,
comparing prefix-LP optima against what the remaining suffix can still
guarantee.  ``brute_mms_interval_enum`` is the independent oracle: it
enumerates *every* monotone assignment and takes the maximum, so the two
paths check each other.

All arithmetic is exact; every LP solution is verified against its
constraints with zero residual before being trusted.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import List, Optional, Sequence, Tuple

from . import simplex
from .cake import (Allocation, Partition, _check_params, _trivial_partition,
                   mms_fair_allocation)
from .errors import InputError, InternalError, ProtocolError
from .rationals import frac
from .sessions import QuerySession
from .valuations import (ONE, ZERO, Interval, PiecewiseConstantValuation,
                         Topology, cut_leftmost)


@dataclass(frozen=True)
class IntervalList:
    """Segment indices (ell(q), r(q)), 1-based, for the q-th piece's left
    and right endpoints; must be weakly increasing overall."""

    entries: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        flat = [i for pair in self.entries for i in pair]
        if any(a > b for a, b in zip(flat, flat[1:])):
            raise InputError(f"interval list not monotone: {self.entries}")
        if flat and flat[0] < 1:
            raise InputError("segment indices are 1-based")


@dataclass(frozen=True)
class LPInstance:
    """max c over cut points x_0..x_k with x_0 = -s, x_k = t, endpoint
    membership given by ``intervals``, and every piece worth at least c."""

    valuation: PiecewiseConstantValuation
    s: Fraction
    t: Fraction
    intervals: IntervalList


@dataclass(frozen=True)
class LPSolution:
    status: str                      # "optimal" | "infeasible"
    objective: Optional[Fraction]
    cut_points: Optional[Tuple[Fraction, ...]]   # x_0 .. x_k


def _piece_value_expr(v: PiecewiseConstantValuation, ell: int, r: int):
    """Linearization of value(y, y') for y in segment ell, y' in segment r:
    returns (coef_y, coef_y', const) with ell <= r (also valid for ell == r).
    """
    p, g = v.breakpoints, v.densities
    w = v._prefix
    const = p[ell] * g[ell - 1] + (w[r - 1] - w[ell]) - p[r - 1] * g[r - 1]
    return -g[ell - 1], g[r - 1], const


def _build_rows(lp: LPInstance):
    """Assemble max-c rows over variables (x_1 .. x_{k-1}, c).

    Returns (objective, a_ub, b_ub) or None when a constant constraint is
    already violated (constant endpoints 0 and t are checked here).
    """
    v, s, t = lp.valuation, lp.s, lp.t
    entries = lp.intervals.entries
    k = len(entries)
    p = v.breakpoints
    d = len(v.densities)
    if any(r > d for pair in entries for r in pair):
        raise InputError("segment index beyond the last segment")
    nx = k - 1
    c_col = nx
    a_ub: List[List[Fraction]] = []
    b_ub: List[Fraction] = []

    def row(coeffs: dict, bound: Fraction):
        r = [ZERO] * (nx + 1)
        for col, a in coeffs.items():
            r[col] += a
        a_ub.append(r)
        b_ub.append(bound)

    def affine_left(q):
        """Left endpoint of piece q as ({col: coef}, const)."""
        if q == 1:
            return {}, ZERO
        return {q - 2: ONE}, s

    def affine_right(q):
        if q == k:
            return {}, t
        return {q - 1: ONE}, ZERO

    feasible = True

    def bounds(expr, lo, hi):
        nonlocal feasible
        coeffs, const = expr
        if not coeffs:
            if not (lo <= const <= hi):
                feasible = False
            return
        row({c: -a for c, a in coeffs.items()}, const - lo)   # expr >= lo
        row(dict(coeffs), hi - const)                         # expr <= hi

    for q, (ell, r) in enumerate(entries, start=1):
        left, right = affine_left(q), affine_right(q)
        bounds(left, p[ell - 1], p[ell])
        bounds(right, p[r - 1], p[r])
        # ordering: left <= right
        coeffs = {c: a for c, a in left[0].items()}
        for c, a in right[0].items():
            coeffs[c] = coeffs.get(c, ZERO) - a
        const = left[1] - right[1]
        if coeffs:
            row(coeffs, -const)
        elif const > 0:
            feasible = False
        # piece value >= c
        cy, cy2, vconst = _piece_value_expr(v, ell, r)
        coeffs = {c_col: ONE}
        vtotal = vconst
        for c, a in left[0].items():
            coeffs[c] = coeffs.get(c, ZERO) - cy * a
        vtotal += cy * left[1]
        for c, a in right[0].items():
            coeffs[c] = coeffs.get(c, ZERO) - cy2 * a
        vtotal += cy2 * right[1]
        row(coeffs, vtotal)

    if not feasible:
        return None
    objective = [ZERO] * nx + [ONE]
    return objective, a_ub, b_ub


def solve_lp_exact(lp: LPInstance) -> LPSolution:
    """Solve the piece-placement program exactly and verify the solution.

    The optimum, when feasible, is returned together with the full cut
    vector x_0 .. x_k; every constraint is re-checked with zero residual.
    """
    built = _build_rows(lp)
    if built is None:
        return LPSolution(simplex.INFEASIBLE, None, None)
    objective, a_ub, b_ub = built
    res = simplex.solve_lp(objective, a_ub, b_ub)
    if res.status == simplex.INFEASIBLE:
        return LPSolution(simplex.INFEASIBLE, None, None)
    if res.status != simplex.OPTIMAL:
        raise InternalError(f"piece-placement LP reported {res.status}")
    k = len(lp.intervals.entries)
    xs = res.x[:-1]
    cuts = (-lp.s, *xs, lp.t)
    c = res.objective
    p = lp.valuation.breakpoints
    for q, (ell, r) in enumerate(lp.intervals.entries, start=1):
        y, y2 = cuts[q - 1] + lp.s, cuts[q]
        if not (p[ell - 1] <= y <= p[ell] and p[r - 1] <= y2 <= p[r]
                and y <= y2):
            raise InternalError("LP solution violates a placement constraint")
        if lp.valuation.value_between(y, y2) < c:
            raise InternalError("LP solution violates a value constraint")
    return LPSolution(simplex.OPTIMAL, c, cuts)


# -- explicit greedy decisions (restricted to a subinterval) -------------------


def explicit_decide_atleast(v: PiecewiseConstantValuation, parts: int,
                            s: Fraction, r: Fraction, lo: Fraction,
                            hi: Fraction) -> bool:
    """Can [lo, hi] be split into ``parts`` s-separated pieces worth >= r
    each?  Same greedy as the session-based decision, on the explicit
    valuation; degenerate (zero-length) pieces are allowed."""
    if parts <= 0:
        raise InputError("parts must be positive")
    if hi - lo < (parts - 1) * s:
        return False
    if r <= 0:
        return True
    pos = lo
    for _ in range(parts - 1):
        if pos > hi:
            return False
        y = cut_leftmost(v, pos, r, end=hi)
        if y is None:
            return False
        pos = y + s
    if pos > hi:
        return False
    return v.value_between(pos, hi) >= r


def explicit_decide_greater(v: PiecewiseConstantValuation, parts: int,
                            s: Fraction, r: Fraction, lo: Fraction,
                            hi: Fraction,
                            total: Optional[Fraction] = None) -> bool:
    """Can [lo, hi] be split into ``parts`` s-separated pieces worth > r
    each?  Builds pieces of value exactly r from the right (as leftmost
    cuts on prefix targets) and asks whether positive value is left over."""
    if parts <= 0:
        raise InputError("parts must be positive")
    if hi - lo < (parts - 1) * s:
        return False
    if r < 0:
        return True
    if total is None:
        total = v.value_between(lo, hi)
    target = total - r
    if target < 0:
        return False
    x = cut_leftmost(v, lo, target, end=hi)
    if x is None:
        raise InternalError("prefix cut below total value must exist")
    for _ in range(parts - 1):
        if x - s < lo:
            return False
        target = v.value_between(lo, x - s) - r
        if target < 0:
            return False
        x = cut_leftmost(v, lo, target, end=hi)
    return target > 0


# -- interval selection (left-to-right endpoint placement) ---------------------


def _first_failing(candidates: Sequence[int], pred, binary: bool) -> Optional[int]:
    """Smallest candidate where ``pred`` is False.

    The predicates used here are monotone (True on a prefix of the
    candidate list), which makes binary search valid; the linear scan is
    the default at desk scale.
    """
    if not binary:
        for j in candidates:
            if not pred(j):
                return j
        return None
    lo, hi = 0, len(candidates)   # invariant: first failure index in [lo, hi]
    while lo < hi:
        mid = (lo + hi) // 2
        if pred(candidates[mid]):
            lo = mid + 1
        else:
            hi = mid
    return candidates[lo] if lo < len(candidates) else None


def select_interval_list(v: PiecewiseConstantValuation, n: int, s,
                         *, binary_search: bool = False,
                         stats: Optional[dict] = None) -> IntervalList:
    """Find segment assignments consistent with some optimal partition.

    Scans left to right: picks the segment of the first piece's right
    endpoint by comparing the prefix worth against what the suffix can
    still guarantee, then alternates prefix-LP optima against suffix
    guarantees for each later endpoint.  Requires a strictly positive
    optimum (checked by the caller).
    """
    s = _check_params(n, s)
    if v.topology is not Topology.CAKE:
        raise InputError("interval selection runs on cakes")
    p = v.breakpoints
    d = len(v.densities)
    if stats is not None:
        stats.setdefault("lp_calls", 0)
        stats.setdefault("greedy_calls", 0)

    def bump(key):
        if stats is not None:
            stats[key] += 1

    def suffix_atleast(parts, value, start):
        bump("greedy_calls")
        if start > 1:
            return False
        return explicit_decide_atleast(v, parts, s, value, start, ONE)

    def lp_opt(entries, t):
        bump("lp_calls")
        sol = solve_lp_exact(LPInstance(v, s, t, IntervalList(tuple(entries))))
        return sol.objective if sol.status == simplex.OPTIMAL else None

    # First piece: it starts at 0 (segment 1); its right endpoint lands in
    # the first segment whose prefix outweighs what the other n-1 pieces
    # can still secure beyond it.
    r1 = _first_failing(
        list(range(0, d + 1)),
        lambda j: suffix_atleast(n - 1, v._prefix[j], p[j] + s),
        binary_search)
    if r1 is None or r1 == 0:
        raise InternalError("no valid segment for the first right endpoint")
    entries: List[Tuple[int, int]] = [(1, r1)]

    for k in range(2, n + 1):
        prev_r = entries[-1][1]
        lo_pt, hi_pt = p[prev_r - 1] + s, p[prev_r] + s
        lcands = [j for j in range(1, d + 1)
                  if p[j - 1] <= hi_pt and p[j] >= lo_pt]

        def ell_pred(j):
            # The last prefix piece may stretch right up to p_j - s, but
            # never beyond its assigned segment.
            copt = lp_opt(entries, min(p[j] - s, p[prev_r]))
            if copt is None:
                return True
            return suffix_atleast(n - k + 1, copt, p[j])

        ell = _first_failing(lcands, ell_pred, binary_search)
        if ell is None:
            raise InternalError(f"no left-endpoint segment found at piece {k}")

        if k == n:
            # The last piece ends at the cake's right end.
            entries.append((ell, d))
            break

        rcands = list(range(ell, d + 1))

        def r_pred(j):
            copt = lp_opt(entries + [(ell, j)], p[j])
            if copt is None:
                return True
            return suffix_atleast(n - k, copt, p[j] + s)

        rk = _first_failing(rcands, r_pred, binary_search)
        if rk is None:
            raise InternalError(f"no right-endpoint segment found at piece {k}")
        entries.append((ell, rk))

    return IntervalList(tuple(entries))


def exact_mms(v: PiecewiseConstantValuation, n: int, s,
              *, binary_search: bool = False,
              stats: Optional[dict] = None) -> Tuple[Fraction, Partition]:
    """Exact best guaranteed share over n pieces separated by s, with an
    optimal partition achieving it (the optimum is attained, not just
    approached)."""
    if v.topology is not Topology.CAKE:
        raise InputError("exact_mms runs on cakes")
    if n == 1:
        s = frac(s)
        if not (ZERO < s < ONE):
            raise InputError(f"separation {s} outside (0, 1)")
        return ONE, Partition(s, (Interval(ZERO, ONE),))
    s = _check_params(n, s)
    if not explicit_decide_greater(v, n, s, ZERO, ZERO, ONE, total=ONE):
        return ZERO, _trivial_partition(n, s, ONE)
    entries = select_interval_list(v, n, s, binary_search=binary_search,
                                   stats=stats)
    sol = solve_lp_exact(LPInstance(v, s, ONE, entries))
    if sol.status != simplex.OPTIMAL:
        raise InternalError("selected interval list gave an infeasible LP")
    cuts = sol.cut_points
    pieces = tuple(Interval(cuts[q - 1] + s, cuts[q])
                   for q in range(1, n + 1))
    for piece in pieces:
        if v.value(piece) < sol.objective:
            raise InternalError("optimal partition fails its own guarantee")
    # Self-certification: the greedy at-least/strictly-greater decisions are
    # correct on their own, and together they pin the exact value.
    if not explicit_decide_atleast(v, n, s, sol.objective, ZERO, ONE):
        raise InternalError("computed share is above the true optimum")
    if explicit_decide_greater(v, n, s, sol.objective, ZERO, ONE, total=ONE):
        raise InternalError("computed share is below the true optimum")
    return sol.objective, Partition(s, pieces)


# -- independent oracle ---------------------------------------------------------


def _forward_feasible(entries, p, s, t) -> bool:
    """Cheap necessary condition: propagate the feasible range of each cut
    point left to right; an empty range proves the LP infeasible."""
    lo = hi = -s
    k = len(entries)
    for q, (ell, r) in enumerate(entries, start=1):
        lo = max(lo, p[ell - 1] - s)
        hi = min(hi, p[ell] - s)
        if lo > hi:
            return False
        lo2 = max(p[r - 1], lo + s)
        hi2 = p[r]
        if q == k:
            lo2, hi2 = max(lo2, t), min(hi2, t)
        if lo2 > hi2:
            return False
        lo, hi = lo2, hi2
    return True


def brute_mms_interval_enum(v: PiecewiseConstantValuation, n: int, s,
                            max_lists: int = 200_000) -> Fraction:
    """Exhaustive oracle: solve the piece-placement LP for every monotone
    segment assignment and return the maximum.

    Exponential in n, intended for small instances only (guarded by
    ``max_lists``); used to validate :func:`exact_mms`.
    """
    if v.topology is not Topology.CAKE:
        raise InputError("the enumeration oracle runs on cakes")
    if n == 1:
        return ONE
    s = _check_params(n, s)
    d = len(v.densities)
    free = 2 * n - 2
    count = 1
    for i in range(free):
        count = count * (d + i) // (i + 1)
    if count > max_lists:
        raise InputError(f"instance too large: {count} assignments")
    best = ZERO
    for mid in combinations_with_replacement(range(1, d + 1), free):
        seq = (1,) + mid + (d,)
        if seq[0] > seq[1]:
            continue
        if seq[-2] > seq[-1]:
            continue
        entries = tuple((seq[2 * q], seq[2 * q + 1]) for q in range(n))
        if not _forward_feasible(entries, v.breakpoints, s, ONE):
            continue
        sol = solve_lp_exact(LPInstance(v, s, ONE, IntervalList(entries)))
        if sol.status == simplex.OPTIMAL and sol.objective > best:
            best = sol.objective
    return best


def exact_mms_allocation(vs: Sequence[PiecewiseConstantValuation],
                         s) -> Allocation:
    """Serve every agent at least her exact guaranteed share.

    Computes each agent's exact share, then runs the moving-knife protocol
    with those shares as thresholds; the outcome is verified against the
    explicit valuations before being returned.
    """
    if any(v.topology is not Topology.CAKE for v in vs):
        raise InputError("exact allocation runs on cakes")
    n = len(vs)
    s = _check_params(n, s)
    shares = [exact_mms(v, n, s)[0] for v in vs]
    sessions = [QuerySession(v) for v in vs]
    alloc = mms_fair_allocation(sessions, s, shares)
    for i, v in enumerate(vs):
        if v.value(alloc.assignment[i]) < shares[i]:
            raise ProtocolError(
                f"agent {i} received less than her exact share", agent=i)
    return alloc


# -- exact pie benchmark ---------------------------------------------------------


def pie_exact_mms(v: PiecewiseConstantValuation, k: int, s,
                  max_lists_per_rotation: int = 100_000) -> Fraction:
    """Exact 1-out-of-k guaranteed share on a pie, explicit valuations only.

    A pie partition into k pieces with k exact-s separators is determined
    by the first piece's start z and the k cut points; unrolling the
    circle at z makes every piece value linear once each endpoint's
    density segment is fixed, so we maximize over the segment containing z
    and all monotone segment assignments on the unrolled axis.  This is an
    enumeration-grade benchmark, not a protocol.
    """
    if v.topology is not Topology.PIE:
        raise InputError("pie_exact_mms runs on pies")
    s = frac(s)
    if k < 1 or not (ZERO < s):
        raise InputError("need k >= 1 and s > 0")
    if k * s > 1:
        raise InputError(f"{k} separators of length {s} do not fit")
    if k * s == 1:
        return ZERO
    if k == 1:
        from .valuations import minimum_window_value
        return ONE - minimum_window_value(v, s)

    p, g = v.breakpoints, v.densities
    d = len(g)
    best = ZERO
    free = 2 * k - 1
    for t in range(1, d + 1):
        # Unrolled axis [p_{t-1}, 1 + p_t]: original segments from t on,
        # wrapped around, with segment t appearing at both ends.
        bps = [p[t - 1]] + [p[j] for j in range(t, d + 1)] \
            + [ONE + p[j] for j in range(1, t + 1)]
        dens = [g[(t - 1 + j) % d] for j in range(d + 1)]
        nseg = len(dens)
        prefix = [ZERO]
        for (a, b), gg in zip(zip(bps, bps[1:]), dens):
            prefix.append(prefix[-1] + gg * (b - a))

        count = 1
        for i in range(free):
            count = count * (nseg + i) // (i + 1)
        if count > max_lists_per_rotation:
            raise InputError("pie benchmark instance too large")

        for mid in combinations_with_replacement(range(1, nseg + 1), free):
            seq = (1,) + mid   # slots of (z, x_1, x_1+s ... fold into pairs)
            pairs = tuple((seq[2 * q], seq[2 * q + 1]) for q in range(k))
            if not _pie_forward_feasible(k, s, bps, pairs):
                continue
            res = _solve_pie_rotation_lp(k, s, bps, dens, prefix, pairs)
            if res is not None and res > best:
                best = res
    return best


def _pie_forward_feasible(k, s, bps, pairs) -> bool:
    """Necessary condition for one unrolled slot assignment, ignoring the
    correlation between z and the wrap endpoint (sound to skip on False)."""
    zlo, zhi = bps[0], bps[1]
    lo, hi = zlo, zhi
    for q, (a_slot, b_slot) in enumerate(pairs, start=1):
        gap = ZERO if q == 1 else s
        lo = max(lo + gap, bps[a_slot - 1])
        hi = min(hi + gap, bps[a_slot])
        if lo > hi:
            return False
        lo2 = max(lo, bps[b_slot - 1])
        hi2 = bps[b_slot]
        if q == k:
            lo2 = max(lo2, zlo + ONE - s)
            hi2 = min(hi2, zhi + ONE - s)
        if lo2 > hi2:
            return False
        lo, hi = lo2, hi2
    return True


def _solve_pie_rotation_lp(k, s, bps, dens, prefix, pairs):
    """max c for pieces [z, x_1], [x_1+s, x_2], .., [x_{k-1}+s, z+1-s] with
    endpoint slots fixed on the unrolled axis; variables (z, x_1..x_{k-1}, c).
    Returns the optimum or None when infeasible."""
    nx = k          # z plus x_1..x_{k-1}
    c_col = nx
    a_ub: List[List[Fraction]] = []
    b_ub: List[Fraction] = []
    feasible = True

    def row(coeffs: dict, bound: Fraction):
        r = [ZERO] * (nx + 1)
        for col, a in coeffs.items():
            r[col] += a
        a_ub.append(r)
        b_ub.append(bound)

    def bounds(expr, lo, hi):
        nonlocal feasible
        coeffs, const = expr
        if not coeffs:
            if not (lo <= const <= hi):
                feasible = False
            return
        row({c: -a for c, a in coeffs.items()}, const - lo)
        row(dict(coeffs), hi - const)

    def left_expr(q):
        if q == 1:
            return {0: ONE}, ZERO              # z
        return {q - 1: ONE}, s                 # x_{q-1} + s

    def right_expr(q):
        if q == k:
            return {0: ONE}, ONE - s           # z + 1 - s
        return {q: ONE}, ZERO                  # x_q

    for q, (a_slot, b_slot) in enumerate(pairs, start=1):
        left, right = left_expr(q), right_expr(q)
        bounds(left, bps[a_slot - 1], bps[a_slot])
        bounds(right, bps[b_slot - 1], bps[b_slot])
        coeffs = dict(left[0])
        for c, a in right[0].items():
            coeffs[c] = coeffs.get(c, ZERO) - a
        row(coeffs, right[1] - left[1])        # left <= right
        gl, gr = dens[a_slot - 1], dens[b_slot - 1]
        vconst = bps[a_slot] * gl + (prefix[b_slot - 1] - prefix[a_slot]) \
            - bps[b_slot - 1] * gr
        coeffs = {c_col: ONE}
        vtotal = vconst
        for c, a in left[0].items():
            coeffs[c] = coeffs.get(c, ZERO) + gl * a
        vtotal += -gl * left[1]
        for c, a in right[0].items():
            coeffs[c] = coeffs.get(c, ZERO) - gr * a
        vtotal += gr * right[1]
        row(coeffs, vtotal)

    if not feasible:
        return None
    objective = [ZERO] * nx + [ONE]
    res = simplex.solve_lp(objective, a_ub, b_ub)
    if res.status != simplex.OPTIMAL:
        return None
    return res.objective
