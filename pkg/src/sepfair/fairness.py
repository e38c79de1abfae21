"""Envy-free and equitable allocations under exact separation, plus checks.

Both solvers here work on explicit valuations (not query sessions): no
finite query protocol can produce exact envy-free or equitable outcomes in
this setting, so these are eps-approximation algorithms over the explicit
representation.

The search space is the family of exactly-s-separated partitions, i.e. the
simplex of piece lengths summing to (domain length) - (n-1)s:

* ``equitable_bisection`` drives a common per-piece target value by
  bisection; the residual handed to the last agent is monotone in the
  target.  Zero-density segments can make that residual jump past zero, in
  which case an exact piecewise-linear solve over segment assignments
  finishes the job (the target value found by the bisection is then hit
  exactly).
* ``envy_free_sperner`` triangulates the length simplex, owners rotate
  round-robin over grid parity, each vertex gets labeled with its owner's
  favorite piece, and a fully-labeled cell is refined by halving until the
  measured envy at its barycenter is within eps.  A full relabeled scan at
  a coarse resolution always finds a fully-labeled cell; refinement is
  local, escalating to a finer global scan and finally to an exact
  assignment-enumeration solve in the (rare) degenerate cases.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, permutations, product
from typing import Optional, Sequence, Tuple

from . import simplex
from .cake import Allocation
from .errors import InputError, InternalError
from .exact_mms import exact_mms, pie_exact_mms
from .rationals import frac
from .valuations import (ONE, ZERO, Interval, PiecewiseConstantValuation,
                         Topology, cut_leftmost, pieces_separated)

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class SimplexPoint:
    """Lengths of the n pieces of an exactly separated partition; they are
    nonnegative and sum to (domain length) - (n-1)s."""

    lengths: Tuple[Fraction, ...]

    def to_pieces(self, s: Fraction, lo: Fraction) -> Tuple[Interval, ...]:
        pieces = []
        pos = lo
        for b in self.lengths:
            pieces.append(Interval(pos, pos + b))
            pos += b + s
        return tuple(pieces)


@dataclass(frozen=True)
class FairnessReport:
    envy_max: Fraction
    equitability_gap: Fraction
    separation_ok: bool
    mms_dominance: Tuple[bool, ...]

    def to_json(self) -> dict:
        from .rationals import fmt
        return {
            "envy_max": fmt(self.envy_max),
            "equitability_gap": fmt(self.equitability_gap),
            "separation_ok": self.separation_ok,
            "mms_dominance": list(self.mms_dominance),
        }


def _domain_and_width(vs, s, domain, n):
    lo, hi = frac(domain[0]), frac(domain[1])
    width = hi - lo - (n - 1) * s
    if width < 0:
        raise InputError("domain too short for n separated pieces")
    return lo, hi, width


# -- equitable -------------------------------------------------------------------


def equitable_bisection(vs: Sequence[PiecewiseConstantValuation], s,
                        order: Optional[Sequence[int]] = None,
                        eps=Fraction(1, 10**9),
                        domain=(ZERO, ONE)) -> Allocation:
    """Exactly separated allocation, agents placed left to right in the
    given order, all own-piece values within eps of one another.

    For a target c, each agent in order takes the leftmost prefix worth c
    followed by an exact-s gap; the value left to the last agent minus c is
    nonincreasing in c, so c is found by bisection.  When the residual
    jumps over zero (possible only across value-free segments), the exact
    segment-assignment solver pins the allocation at the limiting target.
    """
    n = len(vs)
    s, eps = frac(s), frac(eps)
    if eps <= 0:
        raise InputError("eps must be positive")
    if order is None:
        order = list(range(n))
    if sorted(order) != list(range(n)):
        raise InputError(f"not a permutation of the agents: {order}")
    lo_dom, hi_dom, _ = _domain_and_width(vs, s, domain, n)
    if n == 1:
        return Allocation(s, {0: Interval(lo_dom, hi_dom)},
                          vs[0].topology)

    def attempt(c):
        """Greedy at target c; returns (residual, pieces) or (None, None)."""
        pos = lo_dom
        pieces = []
        for agent in order[:-1]:
            if pos > hi_dom:
                return None, None
            y = cut_leftmost(vs[agent], pos, c, end=hi_dom)
            if y is None:
                return None, None
            pieces.append(Interval(pos, y))
            pos = y + s
        if pos > hi_dom:
            return None, None
        pieces.append(Interval(pos, hi_dom))
        w = vs[order[-1]].value_between(pos, hi_dom)
        return w - c, pieces

    lo, hi = ZERO, ONE
    res_lo, pieces_lo = attempt(lo)
    if res_lo is None:
        raise InternalError("target zero must always be feasible")
    trace = [(lo, res_lo)]
    floor = eps / Fraction(2 ** 40)
    while res_lo > eps and hi - lo > floor:
        mid = (lo + hi) * HALF
        res_mid, pieces_mid = attempt(mid)
        trace.append((mid, res_mid))
        if res_mid is not None and res_mid >= 0:
            lo, res_lo, pieces_lo = mid, res_mid, pieces_mid
        else:
            hi = mid
    _assert_monotone_residual(trace)
    if res_lo <= eps:
        assignment = {agent: pieces_lo[j] for j, agent in enumerate(order)}
        return Allocation(s, assignment, vs[0].topology)
    # Residual jumped past zero at the limiting target: solve exactly.
    pieces = _equitable_exact(vs, s, order, lo_dom, hi_dom)
    assignment = {agent: pieces[j] for j, agent in enumerate(order)}
    return Allocation(s, assignment, vs[0].topology)


def _assert_monotone_residual(trace) -> None:
    """The last agent's leftover is nonincreasing in the target value; a
    failed greedy (None) ranks below every finite residual."""
    seen = [(c, Fraction(-2) if r is None else r) for c, r in trace]
    seen.sort(key=lambda cr: cr[0])
    for (c1, r1), (c2, r2) in zip(seen, seen[1:]):
        if c1 < c2 and r1 < r2:
            raise InternalError(
                f"residual increased with the target: {c1}->{r1}, {c2}->{r2}")


def _merged_slots(vs, lo, hi):
    """Merged breakpoints of all agents restricted to [lo, hi], plus the
    per-agent density of each merged slot and prefix values at slot edges."""
    pts = {lo, hi}
    for v in vs:
        for p in v.breakpoints:
            if lo < p < hi:
                pts.add(p)
    edges = sorted(pts)
    dens = []
    prefix = []
    for v in vs:
        dens.append([v.density_at(a, +1) for a in edges[:-1]])
        prefix.append([v.value_between(lo, e) for e in edges])
    return edges, dens, prefix


def _piece_rows(edges, dens_a, prefix_a, left_expr, right_expr, a_slot,
                b_slot, nvars):
    """Rows for 'value of [left, right] for one agent' with endpoints in
    fixed slots: returns (coeffs, const) of the value as an affine form."""
    gl, gr = dens_a[a_slot - 1], dens_a[b_slot - 1]
    const = (edges[a_slot] * gl
             + (prefix_a[b_slot - 1] - prefix_a[a_slot])
             - edges[b_slot - 1] * gr)
    coeffs = [ZERO] * nvars
    lcoeffs, lconst = left_expr
    rcoeffs, rconst = right_expr
    for c, a in lcoeffs.items():
        coeffs[c] -= gl * a
    const -= gl * lconst
    for c, a in rcoeffs.items():
        coeffs[c] += gr * a
    const += gr * rconst
    return coeffs, const


def _position_exprs(n, s, lo, hi):
    """Affine forms of all piece endpoints over variables x_1..x_{n-1}:
    piece q runs from expr 2q-2 to expr 2q-1 in the flattened list."""
    exprs = []
    for q in range(1, n + 1):
        left = ({}, lo) if q == 1 else ({q - 2: ONE}, s)
        right = ({}, hi) if q == n else ({q - 1: ONE}, ZERO)
        exprs.append((left, right))
    return exprs


def _slot_assignments(nslots, count):
    return combinations_with_replacement(range(1, nslots + 1), count)


def _equitable_exact(vs, s, order, lo, hi) -> Tuple[Interval, ...]:
    """Exact equitable pieces for a fixed order: enumerate the segment
    slot of every interior endpoint, then each candidate is one small
    feasibility LP with equality constraints 'every piece is worth c'."""
    n = len(vs)
    edges, dens, prefix = _merged_slots(vs, lo, hi)
    nslots = len(edges) - 1
    exprs = _position_exprs(n, s, lo, hi)
    nvars = n            # x_1 .. x_{n-1}, c
    c_col = n - 1
    for slots in _slot_assignments(nslots, 2 * (n - 1)):
        a_ub, b_ub, a_eq, b_eq = [], [], [], []
        ok = True

        def bound(expr, slot):
            nonlocal ok
            coeffs, const = expr
            lo_b, hi_b = edges[slot - 1], edges[slot]
            if not coeffs:
                if not (lo_b <= const <= hi_b):
                    ok = False
                return
            row = [ZERO] * nvars
            for c, a in coeffs.items():
                row[c] = -a
            a_ub.append(row)
            b_ub.append(const - lo_b)
            row = [ZERO] * nvars
            for c, a in coeffs.items():
                row[c] = a
            a_ub.append(row)
            b_ub.append(hi_b - const)

        # slot of each variable position; piece q spans positions
        # 2q-3 (its left, for q >= 2) and 2q-2 (its right, for q <= n-1)
        pos_slot = {}
        for idx, slot in enumerate(slots):
            pos_slot[idx] = slot
        for q in range(1, n + 1):
            left, right = exprs[q - 1]
            lslot = 1 if q == 1 else pos_slot[2 * (q - 1) - 1]
            rslot = nslots if q == n else pos_slot[2 * (q - 1)]
            if q > 1:
                bound(left, lslot)
            if q < n:
                bound(right, rslot)
            if not ok:
                break
            agent = order[q - 1]
            coeffs, const = _piece_rows(edges, dens[agent], prefix[agent],
                                        left, right, lslot, rslot, nvars)
            # piece value == c
            row = list(coeffs)
            row[c_col] -= ONE
            a_eq.append(row)
            b_eq.append(-const)
            # ordering left <= right
            row = [ZERO] * nvars
            for c, a in left[0].items():
                row[c] += a
            for c, a in right[0].items():
                row[c] -= a
            a_ub.append(row)
            b_ub.append(right[1] - left[1])
        if not ok:
            continue
        res = simplex.solve_lp([ZERO] * nvars, a_ub, b_ub, a_eq, b_eq)
        if res.status != simplex.OPTIMAL:
            continue
        xs = res.x[:n - 1]
        cuts = (lo, *xs, hi)
        pieces = []
        good = True
        for q in range(1, n + 1):
            left = lo if q == 1 else cuts[q - 1] + s
            right = hi if q == n else cuts[q]
            if left > right:
                good = False
                break
            pieces.append(Interval(left, right))
        if good:
            return tuple(pieces)
    raise InternalError("no exact equitable assignment found")


# -- envy-free -------------------------------------------------------------------


def _color(y: Tuple[int, ...], n: int) -> int:
    return sum(y) % n


def _vertex_pieces(y, m, n, s, lo, width):
    ks = [y[0]] + [y[i] - y[i - 1] for i in range(1, n - 1)] + [m - y[-1]] \
        if n > 1 else [m]
    lengths = [Fraction(k, m) * width for k in ks]
    return SimplexPoint(tuple(lengths)).to_pieces(s, lo)


def _favorite_piece(v, pieces) -> int:
    vals = [v.value_between(p.left, p.right) for p in pieces]
    best = max(vals)
    if best > 0:
        return vals.index(best)
    lens = [p.right - p.left for p in pieces]
    return lens.index(max(lens))


def _cells_at(m: int, n: int):
    """All cells of the staircase triangulation of the order polytope
    0 <= y_1 <= ... <= y_{n-1} <= m, as (base, permutation)."""
    dim = n - 1
    for base in product(range(m + 1), repeat=dim):
        if any(base[i] > base[i + 1] for i in range(dim - 1)):
            continue
        for perm in permutations(range(dim)):
            verts = [tuple(base)]
            good = True
            for step in perm:
                nxt = list(verts[-1])
                nxt[step] += 1
                verts.append(tuple(nxt))
                prev = verts[-1]
                if any(prev[i] > prev[i + 1] for i in range(dim - 1)) \
                        or prev[-1] > m:
                    good = False
                    break
            if good:
                yield verts


def _fully_labeled(verts, m, n, s, lo, width, vs, cache):
    labels = set()
    for y in verts:
        key = (m, y)
        if key not in cache:
            pieces = _vertex_pieces(y, m, n, s, lo, width)
            owner = _color(y, n)
            cache[key] = _favorite_piece(vs[owner], pieces)
        labels.add(cache[key])
    return len(labels) == n


def _refine_cell(verts, m: int, n: int):
    """Cells of the doubled grid inside one staircase cell.

    The cell hull is {base + sum mu_i e_perm(i) : 1 >= mu_0 >= ... >= 0};
    after doubling, integer points inside are enumerated directly.
    """
    dim = n - 1
    base = verts[0]
    steps = []
    cur = verts[0]
    for nxt in verts[1:]:
        steps.append(next(i for i in range(dim) if nxt[i] != cur[i]))
        cur = nxt
    dbase = tuple(2 * b for b in base)

    def inside(z):
        delta = [z[i] - dbase[i] for i in range(dim)]
        vals = [delta[steps[t]] for t in range(len(steps))]
        if any(d != 0 for i, d in enumerate(delta)
               if i not in steps):
            return False
        prev = Fraction(2)
        for t, val in enumerate(vals):
            if not (0 <= val <= prev):
                return False
            prev = val
        return True

    members = []
    for off in product(range(3), repeat=dim):
        z = tuple(dbase[i] + off[i] for i in range(dim))
        if inside(z):
            members.append(z)
    member_set = set(members)
    for zbase in members:
        for perm in permutations(range(dim)):
            verts2 = [zbase]
            good = True
            for step in perm:
                nxt = list(verts2[-1])
                nxt[step] += 1
                verts2.append(tuple(nxt))
                if verts2[-1] not in member_set:
                    good = False
                    break
            if good:
                yield verts2


def envy_free_sperner(vs: Sequence[PiecewiseConstantValuation], s,
                      eps=Fraction(1, 10**6),
                      domain=(ZERO, ONE)) -> Allocation:
    """Exactly separated allocation with every pairwise envy at most eps.

    Triangulate the simplex of piece lengths, let agents own grid vertices
    round-robin (every cell sees each agent once), label each vertex with
    its owner's favorite non-empty piece there, locate a fully-labeled
    cell, and keep halving it (relabeling each level) until the envy
    measured exactly at its barycenter drops within eps.  Each agent
    receives the piece she named at her own vertex.
    """
    n = len(vs)
    s, eps = frac(s), frac(eps)
    if eps <= 0:
        raise InputError("eps must be positive")
    lo_dom, hi_dom, width = _domain_and_width(vs, s, domain, n)
    if n == 1:
        return Allocation(s, {0: Interval(lo_dom, hi_dom)}, vs[0].topology)

    cache: dict = {}

    def scan(m):
        for verts in _cells_at(m, n):
            if _fully_labeled(verts, m, n, s, lo_dom, width, vs, cache):
                return verts
        return None

    def cell_allocation(verts, m):
        dim = n - 1
        bary = tuple(Fraction(sum(y[i] for y in verts), n)
                     for i in range(dim))
        ks = [bary[0]] + [bary[i] - bary[i - 1] for i in range(1, dim)] \
            + [m - bary[-1]]
        lengths = tuple(Fraction(k, m) * width for k in ks)
        pieces = SimplexPoint(lengths).to_pieces(s, lo_dom)
        assignment = {}
        for y in verts:
            owner = _color(y, n)
            assignment[owner] = cache[(m, y)]
        alloc = {i: pieces[assignment[i]] for i in range(n)}
        values = [[v.value_between(p.left, p.right) for p in pieces]
                  for v in vs]
        envy = max(values[i][j] - values[i][assignment[i]]
                   for i in range(n) for j in range(n))
        return alloc, envy

    m_global = 2
    cell = scan(m_global)
    if cell is None:
        raise InternalError("a fully-labeled cell must exist")
    m = m_global
    for _ in range(512):
        alloc, envy = cell_allocation(cell, m)
        if envy <= eps:
            return Allocation(s, alloc, vs[0].topology)
        sub = None
        for verts2 in _refine_cell(cell, m, n):
            if _fully_labeled(verts2, 2 * m, n, s, lo_dom, width, vs, cache):
                sub = verts2
                break
        if sub is not None:
            cell, m = sub, 2 * m
            continue
        # Local refinement lost the label pattern: rescan globally, and
        # past a sane grid size hand over to the exact solver.
        m_global *= 2
        if m_global > 256:
            pieces, assignment = _envy_free_exact(vs, s, lo_dom, hi_dom)
            return Allocation(
                s, {i: pieces[assignment[i]] for i in range(n)},
                vs[0].topology)
        cell = scan(m_global)
        if cell is None:
            raise InternalError("a fully-labeled cell must exist")
        m = m_global
    raise InternalError("refinement failed to reach the envy target")


def _envy_free_exact(vs, s, lo, hi):
    """Zero-envy fallback: enumerate segment slots of the interior
    endpoints and the agent-to-piece assignment; each candidate is a small
    feasibility LP whose constraints say everyone prefers her own piece."""
    n = len(vs)
    edges, dens, prefix = _merged_slots(vs, lo, hi)
    nslots = len(edges) - 1
    exprs = _position_exprs(n, s, lo, hi)
    nvars = n - 1
    for slots in _slot_assignments(nslots, 2 * (n - 1)):
        rows_cache = {}
        a_ub0, b_ub0, ok = [], [], True

        def bound(expr, slot):
            nonlocal ok
            coeffs, const = expr
            lo_b, hi_b = edges[slot - 1], edges[slot]
            if not coeffs:
                if not (lo_b <= const <= hi_b):
                    ok = False
                return
            row = [ZERO] * nvars
            for c, a in coeffs.items():
                row[c] = -a
            a_ub0.append(row)
            b_ub0.append(const - lo_b)
            row = [ZERO] * nvars
            for c, a in coeffs.items():
                row[c] = a
            a_ub0.append(row)
            b_ub0.append(hi_b - const)

        slot_of = {}
        for q in range(1, n + 1):
            left, right = exprs[q - 1]
            lslot = 1 if q == 1 else slots[2 * (q - 1) - 1]
            rslot = nslots if q == n else slots[2 * (q - 1)]
            slot_of[q] = (lslot, rslot)
            if q > 1:
                bound(left, lslot)
            if q < n:
                bound(right, rslot)
            row = [ZERO] * nvars
            for c, a in left[0].items():
                row[c] += a
            for c, a in right[0].items():
                row[c] -= a
            a_ub0.append(row)
            b_ub0.append(right[1] - left[1])
        if not ok:
            continue
        for agent in range(n):
            for q in range(1, n + 1):
                left, right = exprs[q - 1]
                lslot, rslot = slot_of[q]
                rows_cache[(agent, q)] = _piece_rows(
                    edges, dens[agent], prefix[agent], left, right,
                    lslot, rslot, nvars)
        for assign in permutations(range(n)):
            # assign[j] = agent receiving piece j+1
            a_ub, b_ub = list(a_ub0), list(b_ub0)
            for j in range(n):
                agent = assign[j]
                own = rows_cache[(agent, j + 1)]
                for q in range(1, n + 1):
                    if q == j + 1:
                        continue
                    other = rows_cache[(agent, q)]
                    row = [oc - sc for oc, sc in zip(other[0], own[0])]
                    a_ub.append(row)
                    b_ub.append(own[1] - other[1])
            res = simplex.solve_lp([ZERO] * nvars, a_ub, b_ub)
            if res.status != simplex.OPTIMAL:
                continue
            xs = res.x[:nvars]
            cuts = (lo, *xs, hi)
            pieces = []
            good = True
            for q in range(1, n + 1):
                left = lo if q == 1 else cuts[q - 1] + s
                right = hi if q == n else cuts[q]
                if left > right:
                    good = False
                    break
                pieces.append(Interval(left, right))
            if not good:
                continue
            assignment = {assign[j]: j for j in range(n)}
            return tuple(pieces), assignment
    raise InternalError("no exact envy-free assignment found")


# -- verification ----------------------------------------------------------------


def fairness_check(alloc: Allocation,
                   vs: Sequence[PiecewiseConstantValuation], s,
                   topology: Topology) -> FairnessReport:
    """Exact fairness audit of an allocation.

    ``mms_dominance[i]`` compares agent i's piece against her exact
    guaranteed share: over n pieces on a cake, over n+1 on a pie (the
    circle costs one extra separator, so the n-piece level cannot be
    promised there).
    """
    n = len(vs)
    s = frac(s)
    topology = Topology(topology)
    if set(alloc.assignment) != set(range(n)):
        raise InputError("allocation does not cover the agents")
    own = [vs[i].value(alloc.assignment[i]) for i in range(n)]
    envy = max(vs[i].value(alloc.assignment[j]) - own[i]
               for i in range(n) for j in range(n))
    gap = max(own) - min(own)
    ordered = [piece for _, piece in alloc.pieces_in_order()]
    sep_ok = pieces_separated(ordered, s, topology)
    dominance = []
    for i in range(n):
        if topology is Topology.CAKE:
            bench = exact_mms(vs[i], n, s)[0]
        else:
            bench = pie_exact_mms(vs[i], n + 1, s)
        dominance.append(own[i] >= bench)
    return FairnessReport(envy, gap, sep_ok, tuple(dominance))


# -- pie wrappers ----------------------------------------------------------------


def _pie_domain_check(vs, s, n):
    if any(v.topology is not Topology.PIE for v in vs):
        raise InputError("expected pie valuations")
    if not (ZERO < s < Fraction(1, n)):
        raise InputError(f"separation {s} outside (0, 1/{n})")


def pie_envy_free(vs, s, eps=Fraction(1, 10**6)) -> Allocation:
    """Insert one separator at [0, s] and solve the rest as a cake."""
    s = frac(s)
    _pie_domain_check(vs, s, len(vs))
    alloc = envy_free_sperner(vs, s, eps, domain=(s, ONE))
    return _wrap_pie(alloc)


def pie_equitable(vs, s, order=None, eps=Fraction(1, 10**9)) -> Allocation:
    s = frac(s)
    _pie_domain_check(vs, s, len(vs))
    alloc = equitable_bisection(vs, s, order, eps, domain=(s, ONE))
    return _wrap_pie(alloc)


def _wrap_pie(alloc: Allocation) -> Allocation:
    assignment = {
        i: Interval(piece.left % ONE, piece.right % ONE)
        for i, piece in alloc.assignment.items()
    }
    return Allocation(alloc.s, assignment, Topology.PIE)
