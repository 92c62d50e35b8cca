"""The twelve acceptance criteria, each at its stated tolerance.

Every test prints one PASS/FAIL line; the lines are repeated together in the
terminal summary.
"""

import math
import time
from fractions import Fraction
from pathlib import Path

from scipy.integrate import quad

from disjocc import verify
from disjocc.bounds import bernstein, bk_chernoff, phi, product_bound
from disjocc.disjoint import X_values, Z_distribution, Z_values
from disjocc.events import are_independent
from disjocc.gallery import differs_from_last, run_case
from disjocc.percolation import Graph, exact_pair_probability, monte_carlo_tail, parse_pairs

GOLDEN = Path(__file__).parent / "golden"
SEED = 20240601

# the tail-bound corpus is shared by criteria 5 and 6
_corpus = None


def tail_corpus():
    global _corpus
    if _corpus is None:
        _corpus = list(verify.random_corpus(SEED, 10_000, max_n=3, max_size=3, max_k=4, linear=True))
    return _corpus


def test_01_remark_ii(acceptance_record):
    t0 = time.perf_counter()
    res = run_case("remark-ii")
    elapsed = time.perf_counter() - t0
    ok = res.passed and elapsed < 1.0
    detail = "; ".join(f.statement for f in res.facts) + f" ({elapsed:.3f}s)"
    assert acceptance_record(1, "gallery case remark-ii", ok, detail), res.render()


def test_02_monotone_domination_exhaustive(acceptance_record):
    res = verify.monotone_domination_suite(max_n=3, max_k=3)
    ok = res.passed and res.instances >= 100_000 and res.elapsed < 300
    assert acceptance_record(2, "domination over Bernoulli products, n<=3, k<=3", ok, res.line())


def test_03_pa_poset(acceptance_record):
    from disjocc.space import is_positively_associated

    pa = all(is_positively_associated(f) for f in verify.DIAMOND_FACTORS)
    res = verify.pa_poset_suite(max_n=2, max_k=2)
    ok = pa and res.passed and len(verify.DIAMOND_FACTORS) == 3
    assert acceptance_record(3, "domination over diamond-poset factors, n<=2, k<=2", ok, res.line())


def test_04_bk_and_reimer(acceptance_record):
    t0 = time.perf_counter()
    bk = verify.bk_suite(n=2)
    # all 256 ordered pairs on {0,1}^2, then 200 seeded triples on {0,1}^3
    reimer = verify.reimer_suite(n=2, k=2, random_instances=200, seed=SEED, random_n=3, random_k=3)
    elapsed = time.perf_counter() - t0
    ok = (bk.passed and bk.instances == 36 and reimer.passed and reimer.instances == 256 + 200
          and elapsed < 10)
    detail = f"{bk.line()} | {reimer.line()}"
    assert acceptance_record(4, "BK recovery and box-product inequality", ok, detail)


def test_05_chernoff_tail_of_X(acceptance_record):
    res = verify.tail_bound_suite(tail_corpus(), "X")
    ok = res.passed and res.instances == 10_000
    assert acceptance_record(5, "Chernoff tail of X, arbitrary events on chains", ok, res.line())


def test_06_chernoff_tail_of_Z(acceptance_record):
    res = verify.tail_bound_suite(tail_corpus(), "Z")
    ok = res.passed and res.instances == 10_000
    assert acceptance_record(6, "Chernoff tail of Z on the same corpus", ok, res.line())


def test_07_bound_chain(acceptance_record):
    t0 = time.perf_counter()
    worst_gap = 0.0
    ordered = True
    for i in range(1, 101):
        lam = i / 10
        for t in range(1, 21):
            p, c, b = product_bound(lam, t), bk_chernoff(lam, t), bernstein(lam, t)
            ordered &= p <= c <= b
            integral, _ = quad(lambda x: math.log(lam / (lam + t - x)), 0, t, epsabs=1e-13, epsrel=1e-13)
            worst_gap = max(worst_gap, abs(integral + lam * phi(t / lam)))
    elapsed = time.perf_counter() - t0
    ok = ordered and worst_gap < 1e-9 and elapsed < 5
    detail = f"2000 grid points ordered: {ordered}; max quadrature gap {worst_gap:.2e} ({elapsed:.2f}s)"
    assert acceptance_record(7, "product <= chernoff <= bernstein, quadrature identity", ok, detail)


def test_08_psi_zero(acceptance_record):
    corpus = verify.monotone_corpus(verify.BINARY_FACTORS, 3, 3, "increasing")
    res = verify.psi_zero_suite(corpus)
    ok = res.passed and res.instances > 0
    assert acceptance_record(8, "psi = 0 gives identical laws of X and Y", ok, res.line())


def test_09_harris(acceptance_record):
    a = verify.harris_suite(verify.cylinder_corpus(max_n=3, max_k=3))
    b = verify.harris_suite(verify.monotone_corpus(verify.BINARY_FACTORS, 3, 2, "increasing"))
    ok = a.passed and b.passed and a.instances > 0 and b.instances > 0
    detail = f"cylinder corpus: {a.line()} | exhaustive pairs: {b.line()}"
    assert acceptance_record(9, "independent increasing events occur disjointly", ok, detail)


def test_10_X_small_while_Z_large(acceptance_record):
    parts = []
    ok = True
    for n in (4, 5):
        space, events = differs_from_last(n)
        max_x = int(X_values(events).max())
        indep = are_independent(events)
        zs = Z_values(events)
        witness = next((space.outcome(i) for i in range(space.size) if zs[i] == n - 1), None)
        pz = Z_distribution(events)[n - 1]
        ok &= max_x == 1 and indep and witness is not None and pz > 0
        parts.append(f"n={n}: max X={max_x}, independent={indep}, Pr(Z={n - 1})={pz} at {witness}")
    assert acceptance_record(10, "X <= 1 while Z reaches n-1", ok, "; ".join(parts))


def test_11_oracles(acceptance_record):
    a = verify.oracle_suite(seed=SEED, count=1000, max_n=4, max_k=3)
    b = verify.percolation_oracle_suite()
    cases_ok = all(g.n_edges <= 12 for g, _ in verify.default_percolation_cases())
    ok = a.passed and a.instances == 1000 and b.passed and cases_ok
    assert acceptance_record(11, "X against brute force; path search against X", ok, f"{a.line()} | {b.line()}")


def test_12_percolation_monte_carlo(acceptance_record):
    graph = Graph.grid(3, 3)
    pairs = parse_pairs("1-9,3-7")
    p = Fraction(7, 10)
    t0 = time.perf_counter()
    first = monte_carlo_tail(graph, pairs, p, 100_000, seed=42, workers=2)
    second = monte_carlo_tail(graph, pairs, p, 100_000, seed=42, workers=1)
    elapsed = time.perf_counter() - t0
    lam = float(sum((exact_pair_probability(graph, p, pr) for pr in pairs), Fraction(0)))
    csv = first.to_csv()
    stable = csv == second.to_csv() == (GOLDEN / "grid3x3_p0.7_n100000_seed42.csv").read_text()
    checked = [row for row in first.rows if row["chernoff_bound"] is not None]
    ok = (first.lam_exact and first.lam == lam and stable and checked
          and not first.bound_violations(3.0) and elapsed < 120)
    detail = (f"lambda={lam:.12g} (exact), {len(checked)} rows above lambda within 3 SE of the bound, "
              f"byte-stable={stable} ({elapsed:.1f}s for two runs)")
    assert acceptance_record(12, "grid percolation Monte Carlo", ok, detail)
