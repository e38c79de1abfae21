"""Query sessions: the only channel between protocols and valuations.

A :class:`QuerySession` hides a valuation behind the two standard queries,
``eval(x, y)`` and ``cut(x, alpha)``, counting every answered query and
recording a transcript.  Protocol code in :mod:`sepfair.cake` and
:mod:`sepfair.pie` never touches a valuation directly; anything with the
same ``eval``/``cut``/``domain_end`` surface (mocks, adversaries) can be
substituted.

Derived sessions share their parent's counter and transcript:

* ``flipped()`` answers over the reflected cake (one derived query costs
  one parent query);
* :class:`SubcakeSession` exposes a sub-arc of a pie as a cake with
  coordinates starting at 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from .errors import InputError
from .rationals import fmt, frac
from .valuations import (ONE, ZERO, PiecewiseConstantValuation, Topology,
                         cut_leftmost, flip)


@dataclass(frozen=True)
class QueryRecord:
    kind: str                      # "eval" or "cut"
    args: tuple                    # (x, y) or (x, alpha)
    answer: Optional[Fraction]
    flipped: bool = False          # answered on the reflected cake

    def to_json(self, index: int) -> dict:
        args = [fmt(a) for a in self.args]
        out = {"index": index, "kind": self.kind, "args": args,
               "answer": None if self.answer is None else fmt(self.answer)}
        if self.flipped:
            out["flipped"] = True
        return out


class _SharedState:
    __slots__ = ("records",)

    def __init__(self):
        self.records: List[QueryRecord] = []


class QuerySession:
    """Two-query (eval/cut) oracle over one hidden valuation."""

    def __init__(self, valuation: PiecewiseConstantValuation,
                 _state: Optional[_SharedState] = None, _flipped: bool = False):
        self._valuation = valuation
        self._state = _state if _state is not None else _SharedState()
        self._flipped = _flipped

    # protocols may rely on these three attributes only
    @property
    def topology(self) -> Topology:
        return self._valuation.topology

    @property
    def domain_end(self) -> Fraction:
        return ONE

    @property
    def known_total(self) -> Optional[Fraction]:
        # Valuations are normalized, so the whole domain is worth exactly 1.
        return ONE

    @property
    def query_count(self) -> int:
        return len(self._state.records)

    @property
    def transcript(self) -> List[QueryRecord]:
        return list(self._state.records)

    def _record(self, kind, args, answer, flipped=False):
        self._state.records.append(QueryRecord(kind, args, answer, flipped))

    def _check_point(self, x: Fraction) -> Fraction:
        if self.topology is Topology.CAKE:
            if not (ZERO <= x <= ONE):
                raise InputError(f"coordinate {x} outside the cake")
            return x
        if not (ZERO <= x <= ONE):
            raise InputError(f"coordinate {x} outside the pie")
        return x % ONE

    def eval(self, x, y) -> Fraction:
        """Value of the piece from x to y; counts as one query.

        On a pie the piece is the clockwise arc from x to y (it may wrap
        through 0).  Invalid coordinates raise without being counted.
        """
        xr, yr = frac(x), frac(y)
        x, y = self._check_point(xr), self._check_point(yr)
        if self.topology is Topology.CAKE and x > y:
            raise InputError(f"eval needs x <= y on a cake, got {x} > {y}")
        if self.topology is Topology.PIE and x == y and xr != yr:
            answer = ONE           # clockwise all the way around
        else:
            answer = self._valuation.value_between(x, y)
        self._record("eval", (x, y), answer, self._flipped)
        return answer

    def cut(self, x, alpha) -> Optional[Fraction]:
        """Leftmost y (first clockwise on a pie) with value [x, y] = alpha.

        Counts as one query even when no such point exists (answer None).
        """
        x, alpha = self._check_point(frac(x)), frac(alpha)
        if not (ZERO <= alpha <= ONE):
            raise InputError(f"cut target {alpha} outside [0, 1]")
        answer = cut_leftmost(self._valuation, x, alpha)
        self._record("cut", (x, alpha), answer, self._flipped)
        return answer

    def flipped(self) -> "QuerySession":
        """Session over the reflected cake, sharing this session's counter.

        A derived eval(x, y) answers v(1-y, 1-x); a derived cut asks for
        a leftmost point on the reflected cake, which corresponds to a
        rightmost cut in original coordinates.  It still costs one query
        here, by the identity v(x, 1) = 1 - v(0, x).
        """
        if self.topology is not Topology.CAKE:
            raise InputError("only a cake session can be flipped")
        return QuerySession(flip(self._valuation), self._state,
                            not self._flipped)

    # -- transcript utilities ---------------------------------------------

    def export_transcript(self, fp) -> None:
        """Write the transcript as JSON lines to a file object."""
        for i, rec in enumerate(self._state.records):
            fp.write(json.dumps(rec.to_json(i)) + "\n")

    def replay_consistent(self,
                          valuation: PiecewiseConstantValuation) -> bool:
        """Replay every recorded query against ``valuation`` and compare."""
        for rec in self._state.records:
            v = flip(valuation) if rec.flipped else valuation
            if replay_answer(v, rec) != rec.answer:
                return False
        return True


def replay_answer(valuation: PiecewiseConstantValuation, rec: QueryRecord):
    """Recompute one transcript record's answer against a valuation."""
    if rec.kind == "eval":
        x, y = rec.args
        if valuation.topology is Topology.PIE and x == y \
                and rec.answer == ONE:
            return ONE             # full-circle eval, stored as (x, x)
        return valuation.value_between(x, y)
    return cut_leftmost(valuation, *rec.args)


def flipped_session(sess: QuerySession) -> QuerySession:
    return sess.flipped()


class SubcakeSession:
    """A clockwise arc of a pie, re-exposed as a cake starting at 0.

    Coordinates x in [0, length] map to pie points (offset + x) mod 1.  A
    cut whose answer would leave the arc is reported as None (the query is
    still counted by the parent).
    """

    def __init__(self, parent, offset, length,
                 known_total: Optional[Fraction] = None):
        if parent.topology is not Topology.PIE:
            raise InputError("SubcakeSession wraps a pie session")
        self._parent = parent
        self.offset = frac(offset) % ONE
        self._length = frac(length)
        self._known_total = known_total
        if not (ZERO < self._length <= ONE):
            raise InputError("subcake length must be in (0, 1]")

    @property
    def topology(self) -> Topology:
        return Topology.CAKE

    @property
    def domain_end(self) -> Fraction:
        return self._length

    @property
    def known_total(self) -> Optional[Fraction]:
        return self._known_total

    @property
    def query_count(self) -> int:
        return self._parent.query_count

    def _to_pie(self, x: Fraction) -> Fraction:
        if not (ZERO <= x <= self._length):
            raise InputError(f"coordinate {x} outside the subcake")
        return (self.offset + x) % ONE

    def eval(self, x, y) -> Fraction:
        x, y = frac(x), frac(y)
        if x > y:
            raise InputError(f"eval needs x <= y, got {x} > {y}")
        return self._parent.eval(self._to_pie(x), self._to_pie(y))

    def cut(self, x, alpha) -> Optional[Fraction]:
        x = frac(x)
        anchor = self._to_pie(x)
        answer = self._parent.cut(anchor, alpha)
        if answer is None:
            return None
        arc = (answer - anchor) % ONE
        if arc > self._length - x:
            return None            # the cut left the arc: not enough value
        return x + arc
