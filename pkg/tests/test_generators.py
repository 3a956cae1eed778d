import math

import numpy as np
import pytest
from scipy import stats as sps

from rigsim.generators import (
    ModelConfig,
    gen_active,
    gen_configuration,
    gen_degree_sequences,
    gen_inhomogeneous,
    gen_passive,
    generate_bipartite,
    plant_clique,
)
from rigsim.graphs import Graph, intersection_graph
from rigsim.laws import DegreeLaw, WeightLaw
from rigsim.rng import substream


class TestActive:
    def test_complete(self):
        H = gen_active(4, 3, DegreeLaw.constant(3), substream(1))
        G = intersection_graph(H)
        assert G.edge_count == 6  # K_4

    def test_empty(self):
        assert gen_active(5, 3, DegreeLaw.constant(0), substream(1)).edge_count == 0

    def test_oversized_support_aborts(self):
        with pytest.raises(ValueError):
            gen_active(5, 2, DegreeLaw.constant(3), substream(1))

    def test_part1_degrees_match_p_chisquare(self):
        P = DegreeLaw.from_pmf({1: 0.3, 3: 0.5, 6: 0.2})
        H = gen_active(100_000, 100_000, P, substream(2))
        deg = H.part_degrees(1)
        obs = np.array([(deg == v).sum() for v in (1, 3, 6)])
        exp = np.array([0.3, 0.5, 0.2]) * 100_000
        chi2 = ((obs - exp) ** 2 / exp).sum()
        assert chi2 < sps.chi2.ppf(0.999, df=2)

    def test_part2_degrees_binomial(self):
        # P == 3: each attribute degree ~ Binomial(n1, 3/n2)
        n = 10_000
        H = gen_active(n, n, DegreeLaw.constant(3), substream(3))
        deg2 = H.part_degrees(2)
        p = 3.0 / n
        for cell in range(7):
            expect = n * sps.binom.pmf(cell, n, p)
            sd = math.sqrt(max(expect * (1 - sps.binom.pmf(cell, n, p)), 1))
            assert abs((deg2 == cell).sum() - expect) < 3 * sd


class TestPassive:
    def test_complete(self):
        H = gen_passive(3, 4, DegreeLaw.constant(3), substream(4))
        assert intersection_graph(H).edge_count == 3

    def test_single_attribute_pair(self):
        H = gen_passive(6, 1, DegreeLaw.constant(2), substream(5))
        G = intersection_graph(H)
        assert G.edge_count == 1 and G.vertex_count == 6

    def test_empty(self):
        assert gen_passive(4, 3, DegreeLaw.constant(0), substream(6)).edge_count == 0


class TestInhomogeneous:
    def test_zero_weight_empty(self):
        H = gen_inhomogeneous(10, 10, WeightLaw.point(0), WeightLaw.point(1), substream(7))
        assert H.edge_count == 0

    def test_clipped_complete(self):
        H = gen_inhomogeneous(30, 30, WeightLaw.point(10), WeightLaw.point(10), substream(8))
        assert H.edge_count == 900

    def test_edge_count_binomial(self):
        n = 3000
        H = gen_inhomogeneous(n, n, WeightLaw.point(1), WeightLaw.point(1), substream(9))
        mean, sd = n, math.sqrt(n * (1 - 1 / n))
        assert abs(H.edge_count - mean) < 3 * sd

    def test_mean_degree_matches_limit(self):
        # mean part-1 degree -> E xi1 E xi2 sqrt(n2/n1)
        n1, n2 = 20_000, 5_000
        xi1 = WeightLaw.finite([0.5, 1.5], [0.5, 0.5])
        xi2 = WeightLaw.exponential(1.0)
        H = gen_inhomogeneous(n1, n2, xi1, xi2, substream(10))
        expect = xi1.mean() * xi2.mean() * math.sqrt(n2 / n1)
        got = H.edge_count / n1
        assert abs(got - expect) < 3 * math.sqrt(expect / n1)

    def test_thinning_and_row_modes_agree_in_law(self):
        # heavy weights trigger the row path; moderate ones the thinning path
        n = 400
        h1 = gen_inhomogeneous(n, n, WeightLaw.point(1), WeightLaw.point(1), substream(11, 0))
        means = []
        for rep in range(40):
            H = gen_inhomogeneous(n, n, WeightLaw.pareto(2.2, 1.0), WeightLaw.point(1), substream(11, rep))
            means.append(H.edge_count)
        # expected edges = n1 n2 E min(w1 w2 / n, 1); crude sanity bound only
        assert 0 < np.mean(means) < n * n


class TestConfiguration:
    def test_sum_mismatch_rejected(self):
        with pytest.raises(ValueError):
            gen_configuration([2, 1], [1, 1, 2], substream(12))

    def test_degrees_preserved_with_multiplicity(self, rng):
        for _ in range(20):
            d1 = rng.integers(0, 5, size=rng.integers(1, 8))
            total = int(d1.sum())
            if total == 0:
                continue
            # split total into a random d2
            cuts = np.sort(rng.integers(0, total + 1, size=rng.integers(1, 6)))
            d2 = np.diff(np.concatenate([[0], cuts, [total]]))
            H = gen_configuration(d1, d2, substream(int(rng.integers(1 << 30))))
            assert H.part_degrees(1).tolist() == list(d1)
            assert H.part_degrees(2).tolist() == list(d2)

    def test_trivial_examples(self):
        H = gen_configuration([2], [1, 1], substream(13))
        assert intersection_graph(H).edge_count == 0
        H = gen_configuration([1, 1], [2], substream(14))
        assert intersection_graph(H).edge_count == 1
        H = gen_configuration([1] * 10, [1] * 10, substream(15))
        assert (H.part_degrees(1) == 1).all() and (H.part_degrees(2) == 1).all()


class TestDegreeSequences:
    def test_balanced_constant(self):
        d1, d2 = gen_degree_sequences(10, DegreeLaw.constant(2), DegreeLaw.constant(2), substream(16))
        assert len(d1) == 11 and len(d2) == 11
        assert d1.sum() == d2.sum() and d1[-1] == 0 and d2[-1] == 0

    def test_beta_scaling(self):
        d1, d2 = gen_degree_sequences(10, DegreeLaw.constant(4), DegreeLaw.constant(2), substream(17))
        assert len(d2) == 21  # n2 = 2 * n1, plus the balancing entry
        assert d1.sum() == d2.sum()

    def test_beta_mismatch_rejected(self):
        with pytest.raises(ValueError):
            gen_degree_sequences(10, DegreeLaw.constant(4), DegreeLaw.constant(2), substream(18), beta=1.0)

    def test_lln_balancing_term_small(self):
        D1 = DegreeLaw.from_pmf({1: 0.5, 3: 0.5})
        for rep in range(5):
            d1, d2 = gen_degree_sequences(100_000, D1, DegreeLaw.constant(2), substream(19, rep))
            assert d1.sum() == d2.sum()
            assert max(d1[-1], d2[-1]) / 100_000 < 0.01


class TestPlantClique:
    def test_identity_cases(self):
        g = Graph.empty(6)
        assert plant_clique(g, 1, substream(20)).edge_count == 0
        assert plant_clique(g, 6, substream(20)).edge_count == 15
        K3g = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
        assert plant_clique(K3g, 3, substream(20)).edge_count == 3

    def test_range_checks(self):
        with pytest.raises(ValueError):
            plant_clique(Graph.empty(3), 0, substream(21))
        with pytest.raises(ValueError):
            plant_clique(Graph.empty(3), 4, substream(21))


class TestDeterminismAndConfig:
    def test_bitwise_determinism(self):
        for model_cfg in (
            {"model": "active", "n1": 200, "n2": 150, "P": {"kind": "pmf", "pmf": {"1": 0.5, "3": 0.5}}},
            {"model": "passive", "n1": 150, "n2": 200, "P": {"kind": "constant", "value": 2}},
            {
                "model": "inhomogeneous",
                "n1": 100,
                "n2": 100,
                "xi1": {"kind": "exponential", "rate": 1.0},
                "xi2": {"kind": "point", "value": 1.0},
            },
            {
                "model": "configuration",
                "n1": 100,
                "D1": {"kind": "pmf", "pmf": {"1": 0.5, "3": 0.5}},
                "D2": {"kind": "constant", "value": 2},
            },
        ):
            config = ModelConfig.from_config(model_cfg)
            a = generate_bipartite(config, substream(99, 5))
            b = generate_bipartite(config, substream(99, 5))
            assert np.array_equal(a.edge_u, b.edge_u)
            assert np.array_equal(a.edge_w, b.edge_w)
            assert np.array_equal(a.mult, b.mult)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ModelConfig.from_config({"model": "active", "n1": 10, "n2": 10, "P": {"kind": "poisson", "lam": 2}})
        with pytest.raises(ValueError):
            ModelConfig.from_config({"model": "nope", "n1": 1, "n2": 1})
        cfg = ModelConfig.from_config(
            {"model": "configuration", "n1": 100, "D1": {"kind": "constant", "value": 4}, "D2": {"kind": "constant", "value": 2}}
        )
        assert cfg.n2 == 200 and cfg.beta == 2.0
