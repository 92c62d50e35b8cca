import itertools
import math
from fractions import Fraction
from pathlib import Path

import pytest

from disjocc.disjoint import X_at, X_distribution, Z_at, Z_distribution
from disjocc.errors import InstanceTooLargeError, SpecFormatError
from disjocc.events import are_independent, is_increasing
from disjocc.percolation import (
    Graph,
    config_to_outcome,
    edge_space,
    exact_X_distribution,
    exact_pair_probability,
    max_disjoint_connected_pairs,
    monte_carlo_tail,
    parse_pairs,
    path_events,
    path_exists,
    sample_configuration,
    sample_rng,
)

F = Fraction
GOLDEN = Path(__file__).parent / "golden"


def test_grid_layout():
    g = Graph.grid(3, 3)
    assert g.n_vertices == 9 and g.n_edges == 12
    assert Graph.grid(2, 2).n_edges == 4
    assert Graph.complete(5).n_edges == 10
    assert Graph.cycle(8).n_edges == 8


def test_named_graphs_and_files(tmp_path):
    assert Graph.named("grid3x3") == Graph.grid(3, 3)
    assert Graph.named("cycle6") == Graph.cycle(6)
    g = Graph.path(4)
    f = tmp_path / "g.txt"
    f.write_text(g.to_text())
    assert Graph.named(f"file:{f}") == g
    with pytest.raises(ValueError):
        Graph.named("hypercube3")


def test_graph_file_errors_carry_line_numbers():
    with pytest.raises(SpecFormatError, match="line 3"):
        Graph.from_text("3\n1 2\n1 9\n")


def test_parse_pairs_is_one_based():
    assert parse_pairs("1-9,3-7") == [(0, 8), (2, 6)]
    with pytest.raises(SpecFormatError):
        parse_pairs("1:9")


def test_sampling_extremes():
    g = Graph.grid(3, 3)
    rng = sample_rng(1, 0)
    assert sample_configuration(g, 1.0, rng) == (1 << 12) - 1
    assert sample_configuration(g, 0.0, rng) == 0


def test_sampling_golden_bitmask():
    g = Graph.grid(3, 3)
    assert sample_configuration(g, 0.5, sample_rng(42, 0)) == 3090
    assert sample_configuration(g, 0.5, sample_rng(42, 1)) == 2362


def test_path_exists_examples():
    g = Graph.path(3)
    assert path_exists(g, 0, 1, 1)
    assert not path_exists(g, 0, 0, 2)
    assert path_exists(g, 0b11, 0, 2)


def test_max_disjoint_examples():
    # two vertex-disjoint host paths
    g = Graph(6, ((0, 1), (1, 2), (3, 4), (4, 5)))
    assert max_disjoint_connected_pairs(g, 0b1111, [(0, 2), (3, 5)]) == 2
    assert max_disjoint_connected_pairs(g, 0, [(0, 2), (3, 5)]) == 0
    # 5-edge gadget: a1, a2 -> u -> v -> b1, b2, the bridge u-v is shared
    bridge = Graph(6, ((0, 2), (1, 2), (2, 3), (3, 4), (3, 5)))
    assert max_disjoint_connected_pairs(bridge, 0b11111, [(0, 4), (1, 5)]) == 1


def test_max_disjoint_caps():
    g = Graph.complete(9)
    with pytest.raises(InstanceTooLargeError):
        max_disjoint_connected_pairs(g, (1 << g.n_edges) - 1, [(0, 1)])
    with pytest.raises(InstanceTooLargeError):
        max_disjoint_connected_pairs(Graph.path(14), 0, [(i, i + 7) for i in range(7)])


def test_exact_pair_probability_examples():
    assert exact_pair_probability(Graph.path(2), F(1, 3), (0, 1)) == F(1, 3)
    # two parallel 2-edge routes between 0 and 2
    diamond = Graph(4, ((0, 1), (1, 2), (0, 3), (3, 2)))
    assert exact_pair_probability(diamond, F(1, 2), (0, 2)) == F(7, 16)
    assert exact_pair_probability(Graph.grid(2, 3), 1, (0, 5)) == 1


def test_parallel_routes_by_direct_enumeration():
    total = F(0)
    for bits in itertools.product((0, 1), repeat=4):
        if (bits[0] and bits[1]) or (bits[2] and bits[3]):
            total += F(1, 16)
    assert total == 1 - F(3, 4) ** 2 == F(7, 16)


def test_max_disjoint_equals_X_at_on_small_graphs():
    for g, pairs in [(Graph.grid(2, 3), [(0, 5), (2, 3)]), (Graph.complete(4), [(0, 1), (2, 3)]),
                     (Graph.cycle(6), [(0, 3), (1, 4), (2, 5)])]:
        space = edge_space(g, F(1, 2))
        events = path_events(g, pairs, space)
        for config in range(1 << g.n_edges):
            w = config_to_outcome(config, g.n_edges)
            assert max_disjoint_connected_pairs(g, config, pairs) == X_at(w, events)


def test_path_events_are_increasing():
    g = Graph.grid(2, 2)
    for ev in path_events(g, [(0, 3), (1, 2)]):
        assert is_increasing(ev)


def test_opening_an_edge_never_decreases_count():
    g = Graph.grid(2, 3)
    pairs = [(0, 5), (2, 3)]
    for config in range(1 << g.n_edges):
        base = max_disjoint_connected_pairs(g, config, pairs)
        for e in range(g.n_edges):
            assert max_disjoint_connected_pairs(g, config | (1 << e), pairs) >= base


def test_exact_X_law_matches_product_space_law():
    g = Graph.grid(2, 2)
    pairs = [(0, 3), (1, 2)]
    space = edge_space(g, F(3, 10))
    assert tuple(exact_X_distribution(g, F(3, 10), pairs)) == X_distribution(path_events(g, pairs, space)).pmf


def test_series_pairs_contrast():
    # pairs on a 6-cycle: all open gives X = 3 but no two connection events are independent
    g = Graph.cycle(6)
    pairs = [(0, 1), (2, 3), (4, 5)]
    events = path_events(g, pairs, edge_space(g, F(1, 2)))
    all_open = (1,) * 6
    assert X_at(all_open, events) == 3
    assert Z_at(all_open, events) == 1
    assert Z_distribution(events).support == (0, 1)
    for a, b in itertools.combinations(events, 2):
        assert not are_independent([a, b])


def test_monte_carlo_extremes():
    g = Graph.grid(3, 3)
    rep = monte_carlo_tail(g, [(0, 8), (2, 6)], 0, 200, seed=1)
    assert all(row["empirical_survival"] == 0 for row in rep.rows)
    host = Graph(6, ((0, 1), (1, 2), (3, 4), (4, 5)))
    rep = monte_carlo_tail(host, [(0, 2), (3, 5)], 1, 200, seed=1)
    assert rep.counts == [0, 0, 200]


def test_monte_carlo_against_exact_law():
    g = Graph.grid(2, 2)
    pairs = [(0, 3), (1, 2)]
    n = 10_000
    rep = monte_carlo_tail(g, pairs, F(1, 2), n, seed=5)
    exact = exact_X_distribution(g, F(1, 2), pairs)
    surv = [sum(exact[r:]) for r in range(len(exact))]
    for row in rep.rows:
        p = float(surv[row["r"]])
        se = math.sqrt(p * (1 - p) / n)
        assert abs(row["empirical_survival"] - p) <= 4 * se + 1e-12
    assert rep.lam == pytest.approx(float(sum(exact_pair_probability(g, F(1, 2), pr) for pr in pairs)))


def test_monte_carlo_independent_of_worker_count():
    g = Graph.grid(3, 3)
    a = monte_carlo_tail(g, [(0, 8), (2, 6)], 0.7, 600, seed=9, workers=1)
    b = monte_carlo_tail(g, [(0, 8), (2, 6)], 0.7, 600, seed=9, workers=3)
    assert a.to_csv() == b.to_csv()


def test_monte_carlo_golden_csv():
    rep = monte_carlo_tail(Graph.grid(3, 3), parse_pairs("1-9,3-7"), F(7, 10), 2000, seed=42)
    assert rep.to_csv() == (GOLDEN / "grid3x3_p0.7_n2000_seed42.csv").read_text()
    assert not rep.bound_violations()


def test_lambda_estimated_above_edge_cap():
    g = Graph.grid(4, 4)  # 24 edges
    rep = monte_carlo_tail(g, [(0, 15)], 0.5, 300, seed=2)
    assert not rep.lam_exact
    assert 0 <= rep.lam <= 1
