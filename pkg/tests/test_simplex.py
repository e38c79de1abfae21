from fractions import Fraction as F

from sepfair import simplex


def test_trivial_bound():
    # max c subject to c <= 1
    res = simplex.solve_lp([F(1)], [[F(1)]], [F(1)])
    assert res.status == simplex.OPTIMAL
    assert res.objective == 1


def test_two_piece_balance():
    # max c s.t. c <= x, c <= 4/5 - x  -> c = 2/5
    res = simplex.solve_lp(
        [F(0), F(1)],
        [[F(-1), F(1)], [F(1), F(1)]],
        [F(0), F(4, 5)])
    assert res.status == simplex.OPTIMAL
    assert res.objective == F(2, 5)


def test_infeasible_bounds():
    # x <= 1/3 and x >= 1/2
    res = simplex.solve_lp([F(1)], [[F(1)], [F(-1)]], [F(1, 3), F(-1, 2)])
    assert res.status == simplex.INFEASIBLE


def test_unbounded_detected():
    res = simplex.solve_lp([F(1)], [[F(-1)]], [F(0)])
    assert res.status == simplex.UNBOUNDED


def test_equality_constraints():
    # max x + y s.t. x + y = 1, x - y <= 1/3
    res = simplex.solve_lp(
        [F(1), F(1)],
        [[F(1), F(-1)]], [F(1, 3)],
        [[F(1), F(1)]], [F(1)])
    assert res.status == simplex.OPTIMAL
    assert res.objective == 1


def test_negative_rhs_rows():
    # x >= 2/3 written as -x <= -2/3; max -x  -> x = 2/3
    res = simplex.solve_lp([F(-1)], [[F(-1)], [F(1)]], [F(-2, 3), F(1)])
    assert res.status == simplex.OPTIMAL
    assert res.x[0] == F(2, 3)


def test_free_variables_can_go_negative():
    # max -x s.t. -x <= 5
    res = simplex.solve_lp([F(-1)], [[F(-1)]], [F(5)])
    assert res.status == simplex.OPTIMAL
    assert res.x[0] == -5


def test_degenerate_redundant_rows():
    rows = [[F(1), F(1)], [F(1), F(1)], [F(2), F(2)], [F(1), F(0)]]
    rhs = [F(1), F(1), F(2), F(3, 4)]
    res = simplex.solve_lp([F(1), F(0)], rows, rhs,
                           [[F(1), F(1)]], [F(1)])
    assert res.status == simplex.OPTIMAL
    assert res.objective == F(3, 4)
