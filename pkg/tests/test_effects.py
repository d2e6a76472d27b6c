import numpy as np
import pytest

from nscausal.effects import (delta_star, direct_effect, effect_report,
                              total_effect, total_effect_by_paths,
                              total_effect_jacobian_entry, total_effects)
from nscausal.graph import WeightedDag
from nscausal.optimizer import fit_baseline
from nscausal.scm import BernoulliNoise, SemSpec, sample_linear

from conftest import random_dag
from test_graph import table1_graph


def chain_to_outcome(weights):
    dim = len(weights) + 1
    w = np.zeros((dim, dim))
    for i, value in enumerate(weights):
        w[i, i + 1] = value
    return WeightedDag(w)


class TestDirectEffect:
    def test_reads_the_outcome_column(self):
        w = np.zeros((4, 4))
        w[0, 3] = 0.5
        w[2, 3] = 1.2
        g = WeightedDag(w)
        assert direct_effect(g, 0) == 0.5
        assert direct_effect(g, 1) == 0.0
        assert direct_effect(g, 2) == 1.2

    def test_two_route_example(self):
        g = table1_graph(omega1=0.3, omega2=0.7, c=1.0)
        assert direct_effect(g, 0) == pytest.approx(0.3)
        assert direct_effect(g, 1) == pytest.approx(0.7)

    def test_rejects_outcome_node(self):
        with pytest.raises(ValueError):
            direct_effect(chain_to_outcome([1.0]), 1)


class TestTotalEffect:
    def test_chain_multiplies_weights(self):
        assert total_effect(chain_to_outcome([2.0, 3.0]), 0) == pytest.approx(6.0)

    def test_two_route_example(self):
        g = table1_graph(omega1=0.3, omega2=0.7, c=1.0)
        assert total_effect(g, 0) == pytest.approx(1.0)
        assert total_effect(g, 1) == pytest.approx(0.7)

    def test_matches_path_enumeration(self, rng):
        for _ in range(200):
            g = random_dag(rng, dim=int(rng.integers(3, 9)), density=0.5,
                           signed=True)
            for i in range(g.dim):
                if i == g.outcome_index:
                    continue
                closed = total_effect(g, i)
                brute = total_effect_by_paths(g, i)
                assert abs(closed - brute) < 1e-10

    def test_only_direct_path_equals_direct_effect(self):
        w = np.zeros((3, 3))
        w[0, 2] = 1.7
        w[1, 0] = 0.4  # upstream of 0, irrelevant for node 0's own effect
        g = WeightedDag(w)
        assert total_effect(g, 0) == pytest.approx(direct_effect(g, 0))

    def test_zero_without_outgoing_edges(self, rng):
        g = random_dag(rng, 6, density=0.6)
        w = g.weights.copy()
        node = next(i for i in range(6) if i != g.outcome_index)
        w[node, :] = 0.0
        cut = WeightedDag(w, g.labels, g.outcome_index)
        assert total_effect_by_paths(cut, node) == 0.0
        assert abs(total_effect(cut, node)) < 1e-12

    def test_linear_in_each_weight(self, rng):
        # finite-difference slope equals the resolvent jacobian entry
        for _ in range(20):
            g = random_dag(rng, 6, density=0.6)
            edges = np.argwhere(g.weights != 0)
            if len(edges) == 0:
                continue
            k, l = edges[rng.integers(len(edges))]
            i = next(i for i in range(6) if i != g.outcome_index)
            step = 1e-6
            up, down = g.weights.copy(), g.weights.copy()
            up[k, l] += step
            down[k, l] -= step
            slope = (total_effect(WeightedDag(up, g.labels, g.outcome_index), i)
                     - total_effect(WeightedDag(down, g.labels, g.outcome_index), i)) / (2 * step)
            assert abs(slope - total_effect_jacobian_entry(g, i, k, l)) < 1e-6

    def test_rejects_cyclic(self):
        w = np.zeros((3, 3))
        w[0, 1] = w[1, 0] = 0.9
        with pytest.raises(ValueError):
            total_effect(WeightedDag(w), 0)


class TestEffectReport:
    def test_empty_graph(self):
        report = effect_report(WeightedDag(np.zeros((4, 4))))
        assert len(report.records) == 3
        assert all(r.direct == 0.0 and r.total == 0.0 for r in report.records)

    def test_two_route_example(self):
        report = effect_report(table1_graph(0.3, 0.7, 1.0))
        by_label = {r.label: r for r in report.records}
        assert by_label["F"].direct == pytest.approx(0.3)
        assert by_label["F"].total == pytest.approx(1.0)
        assert by_label["D"].direct == pytest.approx(0.7)
        assert by_label["D"].total == pytest.approx(0.7)

    def test_direct_column_matches_weights(self, rng):
        g = random_dag(rng, 7, density=0.5)
        for record in effect_report(g).records:
            assert record.direct == g.weights[record.node, g.outcome_index]


class TestDeltaStar:
    @staticmethod
    def _baseline(data):
        return fit_baseline(data).graph

    def test_empty_generating_graph(self):
        g = WeightedDag(np.zeros((4, 4)))
        data = sample_linear(SemSpec(g, BernoulliNoise(0.5)), 4000, seed=0)
        assert delta_star(data, self._baseline, "te") <= 0.1

    def test_chain_total_effects(self):
        data = sample_linear(SemSpec(chain_to_outcome([1.0, 1.0])), 5000, seed=1)
        value = delta_star(data, self._baseline, "te")
        assert 1.7 <= value <= 2.3

    def test_chain_direct_effects(self):
        data = sample_linear(SemSpec(chain_to_outcome([1.0, 1.0])), 5000, seed=1)
        value = delta_star(data, self._baseline, "de")
        assert 0.8 <= value <= 1.2

    def test_rejects_unknown_kind(self):
        data = sample_linear(SemSpec(chain_to_outcome([1.0])), 50, seed=0)
        with pytest.raises(ValueError):
            delta_star(data, self._baseline, "ate")
