"""Pie protocols: ordinal shares, threshold decisions, approximation.

On a circle, n pieces need n separators and there is no natural starting
point, so the cardinal guarantee available on a cake is out of reach; the
protocols here either target ordinal benchmarks (1-out-of-(n+1) and its
pluralistic generalization) or decide/approximate shares for a single
agent.  As on the cake, agents are reached only through sessions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Dict, List, Optional, Sequence, Tuple

from .cake import (Allocation, approx_mms, mms_fair_allocation,
                   ordinal_allocation_2n_minus_1)
from .errors import InputError, InternalError, ProtocolError
from .rationals import frac
from .sessions import SubcakeSession
from .valuations import ONE, ZERO, Interval, Topology


@dataclass(frozen=True)
class PiePartition:
    """Pieces listed clockwise; k pieces come with k separators, each of
    length at least s (the gap after the last piece wraps to the first)."""

    s: Fraction
    pieces: Tuple[Interval, ...]


def pie_allocation_ordinal(sessions: Sequence, s, ells: Sequence[int],
                           thresholds: Sequence) -> Allocation:
    """Moving-knife around the circle on caller-supplied thresholds.

    Sound whenever thresholds[i] is at most agent i's ell_i-out-of-
    (ell_i*n+1) guaranteed share.  Every round each remaining agent marks
    the first point clockwise worth her threshold; the nearest mark wins.
    The last agent also receives a piece worth exactly her threshold, not
    the remainder: the slack left behind is what guarantees the wrap-around
    separator.  Uses n(n+1)/2 cut queries.
    """
    n = len(sessions)
    if not (len(ells) == len(thresholds) == n):
        raise InputError("need one ell and one threshold per agent")
    s = frac(s)
    ells = [int(e) for e in ells]
    if any(e < 1 for e in ells):
        raise InputError("ells must be positive integers")
    if all(e == 1 for e in ells) and not (ZERO < s < Fraction(1, n + 1)):
        raise InputError(f"separation {s} outside (0, 1/{n + 1})")
    if not (ZERO < s < ONE):
        raise InputError("separation must be in (0, 1)")
    thresholds = [frac(t) for t in thresholds]
    if any(not (ZERO <= t <= ONE) for t in thresholds):
        raise InputError("thresholds must lie in [0, 1]")

    remaining = list(range(n))
    assignment: Dict[int, Interval] = {}
    start = ZERO
    used = ZERO                      # total arc consumed, pieces + separators
    order: List[int] = []
    while remaining:
        best = None
        for i in remaining:
            y = sessions[i].cut(start, thresholds[i])
            if y is None:
                raise ProtocolError(f"agent {i} cannot mark her threshold",
                                    agent=i)
            arc = (y - start) % ONE
            if best is None or arc < best[0]:
                best = (arc, i, y)
        arc, winner, y = best
        assignment[winner] = Interval(start, y)
        order.append(winner)
        remaining.remove(winner)
        used += arc + s
        start = (y + s) % ONE
    if used > ONE:
        raise ProtocolError(
            f"pieces and separators wrap past the start; agent {order[-1]} "
            f"was served last", agent=order[-1])
    return Allocation(s, assignment, Topology.PIE)


def pie_decide_equals_one_over_k(sess, k: int,
                                 s) -> Tuple[bool, Optional[PiePartition]]:
    """Does some partition into k separated pieces give 1/k everywhere?

    That ceiling is reachable exactly when k value-free gaps of length s
    exist between pieces.  Scan ceil(2/s) equal arcs for a value-free one;
    from the end of its zero-run, lay a separator and jump by value 1/k,
    k times, and accept if every separator evaluated to zero.  Uses at
    most 6k/s queries.
    """
    k = int(k)
    s = frac(s)
    if k < 2 or not (ZERO < s < Fraction(1, k)):
        raise InputError("need k >= 2 and 0 < s < 1/k")
    m = ceil(Fraction(2) / s)
    share = Fraction(1, k)
    for idx in range(m):
        x = Fraction(idx, m)
        if sess.eval(x, Fraction(idx + 1, m)) != 0:
            continue
        z = sess.cut(x, ONE)     # start of the zero-run that ends at x
        if z is None:
            raise InternalError("full-value cut must exist on a pie")
        cuts = [z]
        works = True
        for _ in range(k):
            if sess.eval(cuts[-1], (cuts[-1] + s) % ONE) != 0:
                works = False
                break
            nxt = sess.cut((cuts[-1] + s) % ONE, share)
            if nxt is None:
                raise InternalError("share cut must exist on a pie")
            cuts.append(nxt)
        if not works:
            continue
        pieces = tuple(Interval((cuts[j] + s) % ONE, cuts[j + 1])
                       for j in range(k))
        # Geometry check (no queries): pieces plus separators must fit
        # around the circle at most once.
        used = sum(((c2 - c1) % ONE for c1, c2 in zip(cuts, cuts[1:])),
                   ZERO)
        if used <= ONE:
            return True, PiePartition(s, pieces)
    return False, None


def pie_decide_positive(sess, k: int, s) -> bool:
    """Is any strictly positive share guaranteed over k separated pieces?

    Needs s <= 1/(2k): split the circle into 2k equal arcs; if all carry
    value, alternating arcs serve as separators.  Otherwise remove one
    value-free arc and ask the cake strictly-greater decision with target
    zero on the rest.  O(k) queries.
    """
    k = int(k)
    s = frac(s)
    if k < 2:
        raise InputError("need k >= 2")
    if not (ZERO < s <= Fraction(1, 2 * k)):
        raise InputError(f"separation {s} must be in (0, 1/{2 * k}]")
    zero_arc = None
    for idx in range(2 * k):
        a, b = Fraction(idx, 2 * k), Fraction(idx + 1, 2 * k)
        if sess.eval(a, b % ONE) == 0:
            zero_arc = (a, b % ONE)
            break
    if zero_arc is None:
        return True
    a, b = zero_arc
    # The rest of the circle holds all the value, so its total is known.
    sub = SubcakeSession(sess, offset=b, length=ONE - Fraction(1, 2 * k),
                         known_total=ONE)
    from .cake import _greater
    return _greater(sub, k, s, ZERO)


def pie_approx_mms(sess, k: int, s, eps) -> Tuple[Fraction, PiePartition]:
    """Bracket the 1-out-of-k share within eps using O(1/eps) queries.

    Marks points clockwise from 0 every eps/2 of value (0 itself is a
    mark), then searches mark pairs greedily: each candidate piece is
    completed clockwise with the nearest separator of length >= s ending
    at a mark and further pieces of no smaller value.  The best candidate
    value r satisfies share - eps <= r <= share because shrinking an
    optimal partition's pieces to marks loses at most eps/2 per endpoint.
    """
    k = int(k)
    s = frac(s)
    eps = frac(eps)
    if k < 2 or not (ZERO < s < Fraction(1, k)):
        raise InputError("need k >= 2 and 0 < s < 1/k")
    if not (ZERO < eps < ONE):
        raise InputError("eps must be in (0, 1)")
    step = eps / 2
    marks = [ZERO]
    while True:
        y = sess.cut(marks[-1], step)
        if y is None or y <= marks[-1]:
            break                   # wrapped past the start
        marks.append(y)
    mcount = len(marks)
    values = [t * step for t in range(mcount)]   # prefix value at each mark

    def val(i, j):                  # clockwise value, mark i -> mark j
        if i == j:
            return ZERO
        if i < j:
            return values[j] - values[i]
        return ONE - (values[i] - values[j])

    best: Optional[Tuple[Fraction, PiePartition]] = None
    for i in range(mcount):
        upos, ucum = _unrolled_marks(marks, values, i)
        for j in range(mcount):
            target = val(i, j)
            if best is not None and target <= best[0]:
                continue
            pieces = _greedy_from_marks(marks[i], upos, ucum, s, k,
                                        (j - i) % mcount)
            if pieces is not None:
                best = (target, PiePartition(s, pieces))
    if best is None:
        # No mark-aligned partition at all: any piece worth more than
        # eps/2 contains a mark, so the true share is at most eps and
        # r = 0 with an arbitrary valid partition meets the bracket.
        piece_len = (ONE - k * s) / k
        pieces = []
        pos = ZERO
        for _ in range(k):
            pieces.append(Interval(pos % ONE, (pos + piece_len) % ONE))
            pos += piece_len + s
        return ZERO, PiePartition(s, tuple(pieces))
    return best


def _unrolled_marks(marks, values, i):
    """Mark positions and cumulative values unrolled clockwise from mark i
    (index t is the t-th mark after i; index m closes the full circle)."""
    m = len(marks)
    upos = [ZERO] * (m + 1)
    ucum = [ZERO] * (m + 1)
    for t in range(1, m + 1):
        idx = (i + t) % m
        if t == m:
            upos[t], ucum[t] = ONE, ONE
        else:
            upos[t] = (marks[idx] - marks[i]) % ONE
            ucum[t] = values[idx] - values[i] if idx > i \
                else ONE - (values[i] - values[idx])
    return upos, ucum


def _greedy_from_marks(start, upos, ucum, s, k, jj):
    """Complete a k-piece partition whose first piece spans unrolled marks
    0..jj; all endpoints stay on marks.  None when the k separators cannot
    all be placed before wrapping back into the first piece."""
    from bisect import bisect_left

    m = len(upos) - 1
    target = ucum[jj]
    pieces = [(ZERO, upos[jj])]
    at = jj
    for _ in range(k - 1):
        t = bisect_left(upos, upos[at] + s)      # first mark >= s away
        if t > m:
            return None
        piece_end = bisect_left(ucum, ucum[t] + target)
        if target == 0:
            piece_end = t
        if piece_end > m:
            return None
        pieces.append((upos[t], upos[piece_end]))
        at = piece_end
    if upos[at] + s > ONE:
        return None                  # wrap-around separator does not fit
    return tuple(Interval((start + a) % ONE, (start + b) % ONE)
                 for a, b in pieces)


def pie_via_cake_allocation(sessions: Sequence, s, mode: str = "approx",
                            eps=None) -> Allocation:
    """Open the circle at 0, sacrifice [0, s], and run a cake protocol.

    Removing one arc destroys at most one piece of any circular partition,
    so the opened cake still supports the n-piece guarantee whenever the
    circle supported n+1.  ``mode="approx"`` gives every agent her
    1-out-of-(n+1) share minus eps; ``mode="ordinal2n"`` gives the
    1-out-of-2n share with no eps.
    """
    n = len(sessions)
    s = frac(s)
    if not (ZERO < s < Fraction(1, n + 1)):
        raise InputError(f"separation {s} outside (0, 1/{n + 1})")
    subs = [SubcakeSession(sess, offset=s, length=ONE - s)
            for sess in sessions]
    if mode == "approx":
        if eps is None:
            raise InputError("approx mode needs eps")
        thresholds = [approx_mms(sub, n, s, frac(eps))[0] for sub in subs]
        cake_alloc = mms_fair_allocation(subs, s, thresholds)
    elif mode == "ordinal2n":
        cake_alloc = ordinal_allocation_2n_minus_1(subs, s)
    else:
        raise InputError(f"unknown mode {mode!r}")
    assignment = {
        i: Interval((s + piece.left) % ONE, (s + piece.right) % ONE)
        for i, piece in cake_alloc.assignment.items()
    }
    return Allocation(s, assignment, Topology.PIE)
