from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apmeyer.aprank import (
    ExprPoint,
    SymbolicTranslate,
    aprank_bounds,
    branch_decompose,
    covering_radius_certificate,
    euclideanize,
    expr_contains,
    independent_ratios,
    inscribe_box,
    li_ap_in_meyer,
    li_ap_in_model_set,
    meyer_expr,
    mono_li_ap,
    rank_gap_example,
    sample_module_rank,
    shrink_window,
    verify_euclideanization,
)
from apmeyer.cps import Ball, Box, builtin, trivial_window
from apmeyer.errors import BudgetExceeded, NotInLattice, RankGapError
from apmeyer.exact import QuadScalar
from apmeyer.progression import ap_points, ap_rank, verify_ap

F = Fraction
PHI = QuadScalar(F(1, 2), F(1, 2), 5)


def fib():
    return builtin("fibonacci")


UNIT = Box([F(0)], [F(1)])


# -- shrink_window ----------------------------------------------------------------

def test_shrink_unit_window_m1():
    u, v = shrink_window(UNIT, 1)
    assert (v.lo[0], v.hi[0]) == (F(-1, 4), F(1, 4))
    assert (u.lo[0], u.hi[0]) == (F(1, 4), F(3, 4))
    assert not u.lo_closed[0] and not v.lo_closed[0]


def test_shrink_unit_window_m2():
    u, v = shrink_window(UNIT, 2)
    assert (v.lo[0], v.hi[0]) == (F(-1, 8), F(1, 8))
    assert (u.lo[0], u.hi[0]) == (F(1, 4), F(3, 4))


def test_shrink_two_axis_window():
    w = Box([F(0), F(0)], [F(2), F(1)])
    u, v = shrink_window(w, 1)
    assert (u.lo[0], u.hi[0]) == (F(1, 2), F(3, 2))
    assert (u.lo[1], u.hi[1]) == (F(1, 4), F(3, 4))
    assert (v.lo[0], v.hi[0]) == (F(-1, 2), F(1, 2))
    assert (v.lo[1], v.hi[1]) == (F(-1, 4), F(1, 4))


def test_shrink_rejects_non_box():
    with pytest.raises(ValueError):
        shrink_window(Ball([F(0)], F(1)), 1)


@settings(max_examples=40)
@given(
    st.fractions(min_value=-3, max_value=3),
    st.fractions(min_value=F(1, 4), max_value=3),
    st.integers(min_value=1, max_value=8),
)
def test_shrink_containment_exact(lo, width, factor):
    w = Box([lo], [lo + width])
    u, v = shrink_window(w, factor)
    # U + factor * V stays inside W, endpoint arithmetic exact
    assert u.lo[0] + factor * v.lo[0] >= w.lo[0]
    assert u.hi[0] + factor * v.hi[0] <= w.hi[0]
    # 0 is interior to V
    assert v.contains((F(0),))


def test_inscribe_box_in_ball():
    b = inscribe_box(Ball([F(0), F(0)], F(1)))
    assert b.dim == 2
    # corners stay inside the closed ball
    corner_sq = b.hi[0] * b.hi[0] + b.hi[1] * b.hi[1]
    assert corner_sq <= 1


# -- covering radius certificate -----------------------------------------------

def test_covering_certificate_integer_lattice():
    il = builtin("integer_lattice(1)")
    r = covering_radius_certificate(il, trivial_window(), F(1, 10))
    assert r == F(1, 2) + F(1, 10)


def test_covering_certificate_fibonacci():
    u = Box([F(1, 4)], [F(3, 4)], (False,), (False,))
    r = covering_radius_certificate(fib(), u, F(1, 10))
    assert 0 < r <= 10


def test_covering_certificate_thin_window_errors():
    thin = Box([F(1, 1000)], [F(2, 1000)], (False,), (False,))
    with pytest.raises(BudgetExceeded):
        covering_radius_certificate(fib(), thin, F(1, 10), span=F(4))


# -- independent ratios -----------------------------------------------------------

def test_independent_ratios_fibonacci_quarter_window():
    v = Box([F(-1, 4)], [F(1, 4)], (False,), (False,))
    picks = independent_ratios(fib(), v)
    assert [p.coords for p in picks] == [(1, 2), (2, 3)]  # values 1+2phi, 2+3phi
    # both stars lie inside the window
    for p in picks:
        assert v.contains(p.internal)


def test_independent_ratios_eighth_window_matches_fixture():
    v = Box([F(-1, 8)], [F(1, 8)], (False,), (False,))
    picks = independent_ratios(fib(), v)
    assert [p.coords for p in picks] == [(3, 5), (5, 8)]


def test_independent_ratios_integer_lattice():
    il2 = builtin("integer_lattice(2)")
    picks = independent_ratios(il2, trivial_window())
    assert [p.coords for p in picks] == [(1, 0), (0, 1)]


# -- the main construction ---------------------------------------------------------

def test_li_ap_fixture_n1_y0():
    ap, radius = li_ap_in_model_set(fib(), UNIT, 1, [F(0)])
    assert ap.ratios == ((3, 5), (5, 8))
    assert ap_rank(ap) == 2
    s = fib()
    stars = [s.star(p).internal[0] for p in ap_points(ap)]
    assert all(UNIT.contains((x,)) for x in stars)
    # base is the exact nearest admissible point to the anchor
    assert ap.base == (0, -1)
    assert radius > 0


def test_li_ap_spec_fixture_progression():
    # the pinned fixture: base 1+phi, ratios 3+5phi and 5+8phi, N=1
    s = fib()
    base = (1, 1)
    ratios = [(3, 5), (5, 8)]
    pts = [base,
           tuple(b + r for b, r in zip(base, ratios[1])),
           tuple(b + r for b, r in zip(base, ratios[0])),
           (base[0] + ratios[0][0] + ratios[1][0], base[1] + ratios[0][1] + ratios[1][1])]
    stars = sorted(s.star(p).internal[0] for p in pts)
    expected = sorted([
        QuadScalar(F(3, 2), F(-1, 2), 5),    # (3 - sqrt5)/2
        QuadScalar(7, -3, 5),                # 7 - 3 sqrt5
        QuadScalar(F(21, 2), F(-9, 2), 5),   # (21 - 9 sqrt5)/2
        QuadScalar(16, -7, 5),               # 16 - 7 sqrt5
    ])
    assert stars == expected
    assert all(UNIT.contains((x,)) for x in stars)


def test_li_ap_length_zero():
    ap, _ = li_ap_in_model_set(fib(), UNIT, 0, [F(0)])
    assert len(ap_points(ap)) == 1
    assert UNIT.contains(fib().star(ap.base).internal)


def test_li_ap_integer_lattice_unit_ratios():
    il2 = builtin("integer_lattice(2)")
    ap, _ = li_ap_in_model_set(il2, None, 3, [F(0), F(0)])
    assert set(ap.ratios) == {(1, 0), (0, 1)}
    assert ap_rank(ap) == 2


def test_li_ap_far_anchor():
    ap, radius = li_ap_in_model_set(fib(), UNIT, 1, [F(100)])
    s = fib()
    ball = Ball([F(100)], radius * radius)
    for p in ap_points(ap):
        pt = s.star(p)
        assert UNIT.contains(pt.internal)
        assert ball.contains(pt.physical)


# -- monochromatic construction ------------------------------------------------------

def test_mono_li_ap_constant_coloring():
    ap = mono_li_ap(fib(), UNIT, 1, lambda z: 0)
    assert ap.length == 1 and ap_rank(ap) == 2


def test_mono_li_ap_parity_coloring():
    ap = mono_li_ap(fib(), UNIT, 1, lambda z: z[0] % 2)
    colors = {z[0] % 2 for z in ap_points(ap)}
    assert len(colors) == 1
    assert ap_rank(ap) == 2
    s = fib()
    for p in ap_points(ap):
        assert UNIT.contains(s.star(p).internal)


def test_mono_li_ap_rejects_partial_coloring():
    with pytest.raises(ValueError):
        mono_li_ap(fib(), UNIT, 1, lambda z: None)


# -- Meyer expressions ---------------------------------------------------------------

def test_meyer_expr_membership_and_decompose():
    expr = meyer_expr(fib(), [(None, UNIT)])
    assert expr_contains(expr, ExprPoint((F(0), F(0))))
    assert expr_contains(expr, ExprPoint((F(1), F(1))))      # 1+phi
    assert not expr_contains(expr, ExprPoint((F(0), F(1))))  # phi: star outside
    assert branch_decompose(expr, ExprPoint((F(1), F(0)))) == 0


def test_meyer_expr_rejects_translate_outside_span():
    with pytest.raises(NotInLattice):
        meyer_expr(fib(), [([QuadScalar(0, 1, 2)], UNIT)])


def test_li_ap_in_meyer_plain_equals_model_set():
    expr = meyer_expr(fib(), [(None, UNIT)])
    ap = li_ap_in_meyer(expr, 2)
    assert ap_rank(ap) == 2
    assert all(expr_contains(expr, p) for p in ap_points(ap))


def test_li_ap_in_meyer_rational_translate():
    half = Box([F(0)], [F(1, 2)])
    expr = meyer_expr(fib(), [([F(1, 3)], half)])
    ap = li_ap_in_meyer(expr, 1)
    for p in ap_points(ap):
        assert expr_contains(expr, p)
        # each point is 1/3 plus a lattice point
        assert (p.coords[0] - F(1, 3)).denominator == 1
        assert p.coords[1].denominator == 1


def test_li_ap_in_meyer_symbolic_second_branch():
    expr = meyer_expr(
        fib(),
        [(None, UNIT), (SymbolicTranslate("t", (1.7320508,)), UNIT)],
    )
    ap = li_ap_in_meyer(expr, 2)
    assert ap_rank(ap) == 2
    assert all(expr_contains(expr, p) for p in ap_points(ap))


def test_verify_ap_on_expr_certificate():
    expr = meyer_expr(fib(), [(None, UNIT)])
    ap = li_ap_in_meyer(expr, 1)
    assert verify_ap(ap, lambda p: expr_contains(expr, p))


def test_verify_ap_fails_against_shrunken_window():
    s = fib()
    ap, _ = li_ap_in_model_set(s, UNIT, 1, [F(0)])
    assert verify_ap(ap, lambda z: UNIT.contains(s.star(z).internal))
    shrunken = Box([F(0)], [F(1, 4)])
    assert not verify_ap(ap, lambda z: shrunken.contains(s.star(z).internal))


def test_no_li_ap_exceeds_scheme_rank_in_euclidean_expr_samples():
    # rank of any progression found in a sample of a fully Euclidean
    # expression is capped by d+m: rank 3 searches must come up empty
    from apmeyer.aprank import sample_points
    from apmeyer.progression import brute_force_li_ap

    half = Box([F(0)], [F(1, 2)])
    expr = meyer_expr(fib(), [([F(1, 3)], half)])
    pts = [p.coords for p in sample_points(expr, halfwidth=F(15))]
    assert brute_force_li_ap(pts, 3, 1) is None
    found = brute_force_li_ap(pts, 2, 1)
    if found is not None:
        assert ap_rank(found) == 2


# -- brackets, rank gap, euclideanization ----------------------------------------------

def test_aprank_bounds_fibonacci():
    expr = meyer_expr(fib(), [(None, UNIT)])
    bracket = aprank_bounds(expr, 3)
    assert (bracket.lower, bracket.upper) == (2, 2)
    assert bracket.upper_tag == "theorem-d-plus-m"
    assert bracket.tested_lengths == (1, 2, 3)
    assert [n for n, _ in bracket.certificates] == [1, 2, 3]
    for n, ap in bracket.certificates:
        assert ap.length == n and ap_rank(ap) == 2


def test_aprank_bounds_integer_lattice():
    il2 = builtin("integer_lattice(2)")
    expr = meyer_expr(il2, [(None, trivial_window())])
    bracket = aprank_bounds(expr, 2)
    assert (bracket.lower, bracket.upper) == (2, 2)


def test_aprank_bounds_raw_sample():
    points = [(0,), (1,), (2,), (3,)]
    bracket = aprank_bounds(points, 2)
    assert bracket.upper_tag == "module-rank"
    assert (bracket.lower, bracket.upper) == (1, 1)
    for n, ap in bracket.certificates:
        assert set(ap_points(ap)) <= set(points)


def test_rank_gap_example_ranks():
    assert sample_module_rank(rank_gap_example(fib(), 0)) == 2
    assert sample_module_rank(rank_gap_example(fib(), 1)) == 3
    assert sample_module_rank(rank_gap_example(fib(), 2)) == 4


def test_rank_gap_bracket_stays_at_two():
    expr = rank_gap_example(fib(), 1)
    bracket = aprank_bounds(expr, 2)
    assert (bracket.lower, bracket.upper) == (2, 2)


def test_euclideanize_plain_is_identity():
    expr = meyer_expr(fib(), [(None, UNIT)])
    cps2, w2 = euclideanize(expr)
    assert cps2.generators == fib().generators
    assert isinstance(w2, Box)
    assert (w2.lo[0], w2.hi[0]) == (F(0), F(1))


def test_euclideanize_one_third_translate():
    half = Box([F(0)], [F(1, 2)])
    expr = meyer_expr(fib(), [([F(1, 3)], half)])
    cps2, w2 = euclideanize(expr)
    assert cps2.generators[0][0] == F(1, 3)
    assert cps2.generators[1][0] == PHI / 3
    assert isinstance(w2, Box)
    assert (w2.lo[0], w2.hi[0]) == (F(1, 3), F(5, 6))
    report = verify_euclideanization(expr, cps2, w2)
    assert report["violations"] == 0 and report["points_checked"] >= 8


def test_euclideanized_model_set_is_strictly_larger():
    # the embedding is one-directional: 2/3 lies in the refined model set but
    # not in the original expression (2/3 - 1/3 = 1/3 is not a lattice point)
    half = Box([F(0)], [F(1, 2)])
    expr = meyer_expr(fib(), [([F(1, 3)], half)])
    cps2, w2 = euclideanize(expr)
    p = cps2.star((2, 0))
    assert p.physical[0] == F(2, 3)
    assert w2.contains(p.internal)
    assert not expr_contains(expr, ExprPoint((F(2, 3), F(0))))


def test_euclideanize_refuses_symbolic_translate():
    with pytest.raises(RankGapError):
        euclideanize(rank_gap_example(fib(), 1))
