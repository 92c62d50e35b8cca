import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from disjocc.bounds import (
    bernstein,
    best_product_bound,
    bk_chernoff,
    falling_factorial,
    janson_bound,
    markov_chain_verify,
    phi,
    product_bound,
    tail_report,
)
from disjocc.errors import HypothesisError
from disjocc.events import Event
from disjocc.gallery import differs_from_last
from disjocc.space import Factor, ProductSpace
from disjocc.verify import random_corpus

F = Fraction


def test_phi_values():
    assert phi(0) == 0
    assert phi(-1) == 1
    assert phi(1) == pytest.approx(2 * math.log(2) - 1, abs=1e-15)
    assert phi(1) == pytest.approx(0.3862944, abs=1e-7)
    with pytest.raises(ValueError):
        phi(-1.5)


def test_phi_continuous_at_minus_one():
    assert abs(phi(-1 + 1e-12) - 1) < 1e-9


@pytest.mark.parametrize("x", [1e-8, -1e-8, 1e-5, 3e-4, -2e-3, 1e-2])
def test_phi_matches_series_near_zero(x):
    # (1+x)log(1+x) - x = sum_{j>=2} (-1)^j x^j / (j (j-1))
    mpmath.mp.dps = 50
    xm = mpmath.mpf(x)
    series = mpmath.nsum(lambda j: (-1) ** j * xm ** j / (j * (j - 1)), [2, mpmath.inf])
    assert abs(phi(x) - float(series)) < 1e-12


@given(st.floats(-1, 50), st.floats(-1, 50))
def test_phi_nonnegative_and_midpoint_convex(a, b):
    assert phi(a) >= 0
    assert phi((a + b) / 2) <= (phi(a) + phi(b)) / 2 + 1e-9 * (1 + abs(a) + abs(b))


def test_bk_chernoff_examples():
    assert bk_chernoff(3.0, 0) == 1
    assert bk_chernoff(0, 2.0) == 0
    assert bk_chernoff(1, math.e - 1) == pytest.approx(math.exp(-1), rel=1e-12)
    with pytest.raises(ValueError):
        bk_chernoff(-1, 1)
    with pytest.raises(ValueError):
        bk_chernoff(1, -1)


def test_janson_is_the_same_formula():
    for lam, t in [(3.0, 0), (0, 2.0), (1, math.e - 1), (2.5, 4)]:
        assert janson_bound(lam, t) == bk_chernoff(lam, t)


def test_bernstein_examples():
    assert bernstein(2.0, 0) == 1
    assert bernstein(1, 3) == pytest.approx(math.exp(-9 / 4), rel=1e-12)
    assert bernstein(1, 3) == pytest.approx(0.1053992, abs=1e-7)


def test_falling_factorial():
    assert falling_factorial(7.3, 0) == 1
    assert falling_factorial(5, 3) == 60
    assert falling_factorial(2.5, 2) == pytest.approx(3.75)
    assert falling_factorial(F(5, 2), 2) == F(15, 4)


def test_product_bound_examples():
    assert product_bound(2.0, 1) == pytest.approx(2 / 3)
    assert product_bound(1, 2) == pytest.approx(1 / 6)
    with pytest.raises(ValueError):
        product_bound(0, 1)
    with pytest.raises(ValueError):
        product_bound(1, 1.5)


def test_best_product_bound_flags_t_above_k():
    val, flagged = best_product_bound(1.0, 2, 3)
    assert not flagged and val == product_bound(1.0, 2)
    val, flagged = best_product_bound(1.0, 5, 2)
    assert flagged
    # r = 1 gives 1/6, r = 2 gives 1/(6*5)
    assert val == pytest.approx(1 / 30)


def test_tail_report_examples():
    rep = tail_report(1, 0)
    assert rep.chernoff == rep.bernstein == rep.product == 1
    rep = tail_report(1, 2)
    # direct evaluation; the rounded 0.2746 quoted for this point is off in the third digit
    assert rep.chernoff == pytest.approx(math.exp(-(3 * math.log(3) - 2)), rel=1e-12)
    assert rep.chernoff == pytest.approx(0.27367, abs=1e-5)
    assert rep.product == pytest.approx(1 / 6)
    assert rep.bernstein == pytest.approx(math.exp(-1.2), rel=1e-12)
    assert rep.ordered()
    assert tail_report(2, 3).ordered()


def test_exact_within():
    assert tail_report(1, 2, F(1, 10)).exact_within()
    assert not tail_report(1, 2, F(1, 2)).exact_within()
    assert tail_report(1, 2).exact_within() is None


GRID = [(i / 10, t) for i in range(1, 101) for t in range(1, 21)]


def test_bound_chain_on_grid():
    for lam, t in GRID:
        p, c, b = product_bound(lam, t), bk_chernoff(lam, t), bernstein(lam, t)
        assert p <= c <= b <= 1, (lam, t)


def test_bernstein_dominates_chernoff_including_t0():
    for i in range(1, 101):
        for t in range(0, 21):
            assert bk_chernoff(i / 10, t) <= bernstein(i / 10, t)


@pytest.mark.parametrize("lam, t", [(0.1, 1), (0.5, 7), (1.0, 2), (3.3, 11), (10.0, 20), (7.5, 1)])
def test_quadrature_identity(lam, t):
    integral, _ = quad(lambda x: math.log(lam / (lam + t - x)), 0, t, epsabs=1e-13, epsrel=1e-13)
    assert abs(integral + lam * phi(t / lam)) < 1e-9


def test_markov_examples():
    space = ProductSpace.cube(2)
    A = Event.cylinder(space, 0, [1])
    rep = markov_chain_verify([A], 1)
    assert rep.expected_chi == rep.lam == F(1, 2) and rep.ok
    rep = markov_chain_verify([A, Event.cylinder(space, 1, [1])], 2)
    assert rep.expected_chi == F(1, 2) and rep.lam_power == 1 and rep.ok
    space4, fam = differs_from_last(4)
    rep = markov_chain_verify(fam, 2)
    assert rep.expected_chi == 0 and rep.ok


def test_markov_refuses_non_linear_factor():
    space = ProductSpace((Factor.diamond(),))
    with pytest.raises(HypothesisError):
        markov_chain_verify([Event.full(space)], 1)
    with pytest.raises(ValueError):
        markov_chain_verify([Event.full(ProductSpace.cube(1))], 2)


def test_markov_chain_on_random_linear_instances():
    for space, events in random_corpus(seed=3, count=200, max_n=3, max_size=3, max_k=4):
        for r in range(1, len(events) + 1):
            assert markov_chain_verify(events, r).ok
