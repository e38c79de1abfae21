"""Acceptance suite: one test per contract criterion, each printing a
pass/fail line (run with ``pytest tests/test_acceptance.py -v -s``).

Every tolerance is pinned here; nothing is calibrated at runtime.  The
oracles (interval-list enumeration for cakes, a 1/2000-lattice search for
pies) are independent of the code paths they certify.
"""

import random
from fractions import Fraction as F

from sepfair.adversary import (bisection_share_candidate, cut_walk_candidate,
                               falsify_share_solver, falsify_window_solver,
                               grid_eval_share_candidate,
                               window_scan_candidate)
from sepfair.cake import (Relation, approx_mms, decide, mms_fair_allocation)
from sepfair.exact_mms import brute_mms_interval_enum, exact_mms
from sepfair.fairness import (envy_free_sperner, equitable_bisection,
                              fairness_check)
from sepfair.pie import pie_allocation_ordinal, pie_decide_equals_one_over_k
from sepfair.sessions import QuerySession
from sepfair.valuations import (Interval, PiecewiseConstantValuation,
                                Topology, pieces_separated)

from helpers import (THIRDS, UNIFORM_PIE, pie_grid_oracle, random_separation,
                     random_valuation, verify_partition)


def report(criterion, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
    print(line)
    assert ok, line


def test_criterion_01_worked_example():
    s = F(1, 3)
    q1 = QuerySession(THIRDS)
    at_least, witness = decide(q1, 2, s, F(2, 5), Relation.AT_LEAST)
    q2 = QuerySession(THIRDS)
    greater, _ = decide(q2, 2, s, F(2, 5), Relation.GREATER)
    mms, _ = exact_mms(THIRDS, 2, s)
    ok = (at_least is True and q1.query_count <= 2
          and witness is not None
          and greater is False and q2.query_count <= 3
          and mms == F(2, 5))
    report(1, ok,
           f"worked example: at-least yes in {q1.query_count} queries, "
           f"greater no in {q2.query_count}, exact share {mms}")


def test_criterion_02_exact_equals_enumeration():
    rng = random.Random(20240202)
    checked = 0
    for _ in range(200):
        n = rng.choice([2, 2, 2, 3])
        d_cap = 5 if n == 2 else rng.choice([4, 4, 5])
        v = random_valuation(rng, max_segments=d_cap)
        s = random_separation(rng, F(1, n - 1))
        got = exact_mms(v, n, s)[0]
        oracle = brute_mms_interval_enum(v, n, s)
        assert got == oracle, (v.breakpoints, v.densities, n, s, got, oracle)
        checked += 1
    report(2, checked >= 200,
           f"exact share equals the enumeration oracle on {checked} "
           f"random instances (exact equality)")


def test_criterion_03_share_fair_allocation():
    rng = random.Random(20240303)
    checked = 0
    for _ in range(100):
        n = rng.choice([2, 2, 2, 3, 3, 4])
        v_cap = 3 if n >= 3 else 4
        s = random_separation(rng, F(1, n - 1))
        vs = [random_valuation(rng, max_segments=v_cap) for _ in range(n)]
        thresholds = [exact_mms(v, n, s)[0] for v in vs]
        sessions = [QuerySession(v) for v in vs]
        alloc = mms_fair_allocation(sessions, s, thresholds)
        for i, v in enumerate(vs):
            assert v.value(alloc.assignment[i]) >= thresholds[i]
        ordered = [p for _, p in sorted(alloc.assignment.items(),
                                        key=lambda kv: kv[1].left)]
        assert pieces_separated(ordered, s, Topology.CAKE, exact=True)
        cuts = sum(1 for sess in sessions for rec in sess.transcript
                   if rec.kind == "cut")
        assert cuts <= n * (n + 1) // 2
        checked += 1
    report(3, checked >= 100,
           f"moving-knife allocation met every exact share with exact "
           f"separation on {checked} instances within n(n+1)/2 cuts")


def test_criterion_04_approximation_bracket():
    rng = random.Random(20240404)
    eps = F(1, 2 ** 20)
    cases = [(THIRDS, 2, F(1, 3))]
    for _ in range(12):
        n = rng.choice([2, 3])
        cases.append((random_valuation(rng, max_segments=3), n,
                      random_separation(rng, F(1, n - 1))))
    for v, n, s in cases:
        sess = QuerySession(v)
        r, witness = approx_mms(sess, n, s, eps)
        mms = exact_mms(v, n, s)[0]
        assert r <= mms
        assert mms - r <= eps
        assert sess.query_count <= n * (20 + 1)
        verify_partition(v, witness, r)
    report(4, True,
           f"share bracketed within 2^-20 from below on {len(cases)} "
           f"instances within 21n queries")


def test_criterion_05_pie_ordinal_allocation():
    rng = random.Random(20240505)
    # uniform instances: exactly the analytic ordinal level
    for n in (2, 3):
        s = F(1, 4 * n)
        t = F(1, n + 1) - s
        sessions = [QuerySession(UNIFORM_PIE) for _ in range(n)]
        alloc = pie_allocation_ordinal(sessions, s, [1] * n, [t] * n)
        for i in range(n):
            assert UNIFORM_PIE.value(alloc.assignment[i]) >= t
    # random instances against the lattice oracle
    checked = 0
    for _ in range(100):
        n = 2
        s = random_separation(rng, F(1, n + 1))
        vs = [random_valuation(rng, Topology.PIE, max_segments=3)
              for _ in range(n)]
        oracle = [pie_grid_oracle(v, n + 1, s) for v in vs]
        thresholds = [max(o - F(1, 1000), F(0)) for o in oracle]
        sessions = [QuerySession(v) for v in vs]
        alloc = pie_allocation_ordinal(sessions, s, [1] * n, thresholds)
        for i, v in enumerate(vs):
            assert v.value(alloc.assignment[i]) >= oracle[i] - F(1, 1000)
        ordered = [p for _, p in sorted(alloc.assignment.items(),
                                        key=lambda kv: kv[1].left)]
        assert pieces_separated(ordered, s, Topology.PIE)
        checked += 1
    report(5, checked >= 100,
           f"pie ordinal allocation met the 1-out-of-(n+1) lattice-oracle "
           f"level minus 1/1000 on {checked} instances plus uniform exact")


def _zero_separator_instance(rng, k, s):
    """k value blocks worth exactly 1/k each, separated by k value-free
    arcs of length at least s."""
    slack = (1 - 2 * k * s) if 1 - 2 * k * s > 0 else F(0)
    gaps, blocks = [], []
    for _ in range(k):
        gaps.append(s + slack / (2 * k) * F(rng.randint(0, 4), 4))
    remaining = 1 - sum(gaps)
    cuts = sorted(F(rng.randint(1, 19), 20) for _ in range(k - 1))
    shares = []
    prev = F(0)
    for c in cuts + [F(1)]:
        shares.append((c - prev) * remaining)
        prev = c
    bps, dens = [F(0)], []
    for block_len, gap_len in zip(shares, gaps):
        bps.append(bps[-1] + block_len)
        dens.append(F(1, k) / block_len)
        bps.append(bps[-1] + gap_len)
        dens.append(F(0))
    bps[-1] = F(1)
    return PiecewiseConstantValuation(bps, dens, Topology.PIE)


def test_criterion_06_pie_ceiling_decision():
    rng = random.Random(20240606)
    for k, s in ((2, F(1, 10)), (3, F(1, 12)), (2, F(1, 8))):
        # constructed yes-instances with verified witnesses
        for _ in range(4):
            v = _zero_separator_instance(rng, k, s)
            sess = QuerySession(v)
            ok, witness = pie_decide_equals_one_over_k(sess, k, s)
            assert ok
            assert sess.query_count <= 6 * k / s
            assert pieces_separated(witness.pieces, s, Topology.PIE)
            for piece in witness.pieces:
                assert v.value(piece) == F(1, k)
            pieces = sorted(witness.pieces, key=lambda p: p.left)
            for i, piece in enumerate(pieces):
                nxt = pieces[(i + 1) % len(pieces)]
                assert v.value_between(piece.right, nxt.left) == 0
        # the uniform pie always stays strictly below 1/k
        sess = QuerySession(UNIFORM_PIE)
        ok, _ = pie_decide_equals_one_over_k(sess, k, s)
        assert not ok
        assert sess.query_count <= 6 * k / s
        assert (1 - k * s) / k < F(1, k)
    report(6, True,
           "ceiling decision: yes with verified zero-value separators on "
           "constructed instances, no on uniform, within 6k/s queries")


def test_criterion_07_adversaries_falsify_all_solvers():
    runs = 0
    for s in (F(1, 10), F(1, 4)):
        for budget in (5, 20, 50):
            for solver in (bisection_share_candidate,
                           grid_eval_share_candidate):
                out = falsify_share_solver(solver, s, budget)
                assert out["falsified"]
                assert out["claimed"] != out["actual"]
                runs += 1
    window_runs = 0
    for budget in (5, 20, 50):
        for solver in (window_scan_candidate, cut_walk_candidate):
            out = falsify_window_solver(solver, F(1, 4), F(1, 8), budget)
            assert out["falsified"]
            if out["answer"]:
                assert out["window_min"] > F(1, 8)
            else:
                assert out["window_min"] <= F(1, 8)
            window_runs += 1
    report(7, True,
           f"every deterministic candidate falsified: {runs} sum-hiding "
           f"runs, {window_runs} window-hiding runs (exact mismatches)")


def test_criterion_08_equitable():
    rng = random.Random(20240808)
    eps = F(1, 10 ** 9)
    checked = 0
    for _ in range(50):
        n = rng.choice([2, 3])
        s = random_separation(rng, F(1, n - 1))
        vs = [random_valuation(rng, max_segments=3) for _ in range(n)]
        order = list(range(n))
        rng.shuffle(order)
        alloc = equitable_bisection(vs, s, order=order, eps=eps)
        values = [vs[i].value(alloc.assignment[i]) for i in range(n)]
        assert max(values) - min(values) <= eps
        ordered = [p for _, p in sorted(alloc.assignment.items(),
                                        key=lambda kv: kv[1].left)]
        assert pieces_separated(ordered, s, Topology.CAKE, exact=True)
        checked += 1
    report(8, checked >= 50,
           f"equitable gap at most 1e-9 with exact separation on "
           f"{checked} instances (residual monotonicity asserted inside)")


def test_criterion_09_envy_free():
    rng = random.Random(20240909)
    eps = F(1, 10 ** 6)
    checked = 0
    for _ in range(20):
        n = rng.choice([2, 3])
        s = random_separation(rng, F(1, n - 1))
        vs = [random_valuation(rng, max_segments=3) for _ in range(n)]
        alloc = envy_free_sperner(vs, s, eps)
        rep = fairness_check(alloc, vs, s, Topology.CAKE)
        assert rep.envy_max <= eps
        for i, v in enumerate(vs):
            floor = exact_mms(v, n, s)[0]
            assert v.value(alloc.assignment[i]) >= floor - eps
        checked += 1
    report(9, checked >= 20,
           f"envy at most 1e-6 and own value at least the exact share "
           f"minus 1e-6 on {checked} instances")


def test_criterion_10_some_piece_reaches_the_share():
    rng = random.Random(20241010)
    checked = 0
    agents = []
    for _ in range(25):
        n = rng.choice([2, 3])
        s = random_separation(rng, F(1, n - 1))
        v = random_valuation(rng, max_segments=3)
        agents.append((v, n, s, exact_mms(v, n, s)[0]))
    while checked < 500:
        v, n, s, mms = agents[rng.randrange(len(agents))]
        width = 1 - (n - 1) * s
        cuts = sorted(width * F(rng.randint(0, 60), 60)
                      for _ in range(n - 1))
        pieces, pos, prev = [], F(0), F(0)
        for bound in cuts + [width]:
            pieces.append(Interval(pos, pos + bound - prev))
            pos += bound - prev + s
            prev = bound
        assert pieces_separated(pieces, s, Topology.CAKE, exact=True)
        assert max(v.value(p) for p in pieces) >= mms
        checked += 1
    report(10, checked >= 500,
           f"every exactly separated partition handed some piece worth the "
           f"agent's exact share ({checked} random partitions, exact)")


def test_criterion_11_impossibilities_covered_as_properties():
    # The negative results are not numbers to reproduce; they are witnessed
    # by the adversary falsification suite above and documented non-goals
    # (no exact share computation through queries, no strict/equality
    # decisions on pies, no reverse cut through sessions).
    import sepfair.adversary as adversary
    assert hasattr(adversary, "falsify_share_solver")
    assert hasattr(adversary, "falsify_window_solver")
    assert hasattr(adversary, "pie_threshold_witnesses")
    report(11, True,
           "impossibility results covered by the adversary property suite "
           "and documented non-goals")
