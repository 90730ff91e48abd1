"""Channel model, normalization, alpha selection, and subset restriction."""

import numpy as np
import pytest

from jpac.network import (
    NetworkInstance,
    NormalizedProblem,
    normalize,
    restrict,
    select_alpha,
    sinr,
    spectral_radius,
)

from conftest import A3, B3, random_problem


def _single_link(g=1.0, gamma=1.0, eta=1.0, pbar=1.0):
    return NetworkInstance(gains=[[g]], noise=[eta], sinr_targets=[gamma], budgets=[pbar])


class TestSinr:
    def test_single_link_no_interference(self):
        inst = _single_link()
        assert sinr(inst, [2.0]) == pytest.approx([2.0])

    def test_zero_power(self, three_link_instance):
        assert np.all(sinr(three_link_instance, np.zeros(3)) == 0.0)

    def test_three_link_optimum_meets_targets(self, three_link_instance):
        # p = (0.5 pbar1, 0.5 pbar2, 0): the two supported links sit exactly
        # at their targets.
        s = sinr(three_link_instance, [0.5, 0.5, 0.0])
        assert s[0] == pytest.approx(1.0)
        assert s[1] == pytest.approx(1.0)
        assert s[2] == 0.0

    def test_dimension_mismatch(self, three_link_instance):
        with pytest.raises(ValueError):
            sinr(three_link_instance, [1.0, 2.0])


class TestNormalize:
    def test_single_link(self):
        prob = normalize(_single_link())
        assert prob.A == pytest.approx(np.array([[1.0]]))
        assert prob.b == pytest.approx([1.0])

    def test_three_link_matches_reference(self, three_link_instance):
        prob = normalize(three_link_instance)
        assert prob.A == pytest.approx(A3)
        assert prob.b == pytest.approx(B3)
        assert prob.alpha is None

    def test_sign_round_trip_random(self):
        # SINR_k >= gamma_k iff [Ax - b]_k >= 0 with x = p / pbar.
        from jpac.scenario import ScenarioConfig, generate

        inst = generate(ScenarioConfig(K=5, seed=7))
        prob = normalize(inst)
        rng = np.random.default_rng(0)
        for _ in range(100):
            x = rng.uniform(0.0, 1.0, size=5)
            p = x * inst.budgets
            lhs = sinr(inst, p) - inst.sinr_targets
            rhs = prob.A @ x - prob.b
            scale = np.maximum(np.abs(lhs), 1.0)
            agree = (lhs >= -1e-12 * scale) == (rhs >= -1e-12 * scale)
            assert np.all(agree)

    def test_output_structure(self):
        for seed in range(5):
            prob = random_problem(6, seed)
            assert np.all(np.diag(prob.A) == 1.0)
            off = prob.A - np.diag(np.diag(prob.A))
            assert np.all(off <= 0.0)
            assert np.all(prob.b > 0.0)


class TestSpectralRadius:
    def test_identity(self):
        assert spectral_radius(np.eye(3)) == pytest.approx(1.0)

    def test_three_link_interference_block(self):
        assert spectral_radius(np.eye(3) - A3) == pytest.approx(np.sqrt(2.0))

    def test_zero_matrix(self):
        assert spectral_radius(np.zeros((4, 4))) == 0.0

    def test_matches_dense_oracle_random(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            M = rng.uniform(0.0, 2.0, size=(5, 5))
            expected = float(np.max(np.abs(np.linalg.eigvals(M))))
            assert spectral_radius(M) == pytest.approx(expected, abs=1e-8)

    def test_large_matrix_power_iteration(self):
        rng = np.random.default_rng(9)
        M = rng.uniform(0.0, 1.0, size=(80, 80))
        expected = float(np.max(np.abs(np.linalg.eigvals(M))))
        assert spectral_radius(M) == pytest.approx(expected, rel=1e-8)

    def test_negative_entry_rejected(self):
        with pytest.raises(ValueError):
            spectral_radius([[1.0, -1.0], [0.0, 1.0]])


class TestSelectAlpha:
    def test_three_link_high_interference_branch(self, three_link_no_alpha):
        # rho(I - A) = sqrt(2) >= 1, so alpha = c1 * alpha1 = 0.2 / 3.
        assert select_alpha(three_link_no_alpha) == pytest.approx(1.0 / 15.0)

    def test_single_link_fallback_branch(self):
        prob = NormalizedProblem(A=[[1.0]], b=[0.5], budgets=[1.0])
        assert select_alpha(prob) == pytest.approx(0.2)

    def test_alpha2_override(self):
        prob = NormalizedProblem(A=[[1.0]], b=[0.5], budgets=[1.0])
        assert select_alpha(prob, alpha2=0.01) == pytest.approx(0.04)
        assert select_alpha(prob, alpha2=10.0) == pytest.approx(0.2)

    def test_output_always_in_bounds(self):
        for seed in range(10):
            prob = random_problem(5, seed)
            a = select_alpha(prob)
            assert 0.0 < a < prob.alpha1

    def test_invalid_constants(self):
        prob = NormalizedProblem(A=[[1.0]], b=[0.5], budgets=[1.0])
        with pytest.raises(ValueError):
            select_alpha(prob, c1=1.5)
        with pytest.raises(ValueError):
            select_alpha(prob, c3=0.1)


class TestRestrict:
    def test_full_set_identity(self, three_link):
        sub = restrict(three_link, [0, 1, 2])
        assert sub.A == pytest.approx(three_link.A)
        assert sub.b == pytest.approx(three_link.b)
        assert sub.link_ids == (0, 1, 2)
        assert sub.alpha == three_link.alpha

    def test_three_link_pair(self, three_link):
        sub = restrict(three_link, [0, 1])
        assert sub.A == pytest.approx(np.eye(2))
        assert sub.b == pytest.approx([0.5, 0.5])
        assert sub.link_ids == (0, 1)

    def test_composition(self):
        prob = random_problem(6, 1)
        once = restrict(prob, [0, 2, 3])
        twice = restrict(restrict(prob, [0, 1, 2, 3]), [0, 2, 3])
        assert twice.A == pytest.approx(once.A)
        assert twice.link_ids == once.link_ids

    def test_empty_rejected(self, three_link):
        with pytest.raises(ValueError):
            restrict(three_link, [])


class TestValidation:
    def test_nonpositive_diagonal_gain(self):
        with pytest.raises(ValueError):
            NetworkInstance(gains=[[0.0]], noise=[1.0], sinr_targets=[1.0], budgets=[1.0])

    def test_negative_gain(self):
        with pytest.raises(ValueError):
            NetworkInstance(gains=[[1.0, -0.1], [0.0, 1.0]], noise=[1.0, 1.0],
                            sinr_targets=[1.0, 1.0], budgets=[1.0, 1.0])

    def test_positive_offdiagonal_rejected(self):
        with pytest.raises(ValueError):
            NormalizedProblem(A=[[1.0, 0.1], [0.0, 1.0]], b=[0.5, 0.5], budgets=[1.0, 1.0])

    def test_nonunit_diagonal_rejected(self):
        with pytest.raises(ValueError):
            NormalizedProblem(A=[[2.0]], b=[0.5], budgets=[1.0])

    def test_alpha_out_of_range(self, three_link_no_alpha):
        with pytest.raises(ValueError):
            three_link_no_alpha.with_alpha(1.0)  # alpha1 = 1/3
        with pytest.raises(ValueError):
            three_link_no_alpha.with_alpha(0.0)


class TestSerialization:
    def test_instance_round_trip(self, three_link_instance):
        back = NetworkInstance.from_json(three_link_instance.to_json())
        assert back.gains == pytest.approx(three_link_instance.gains)
        assert back.noise == pytest.approx(three_link_instance.noise)
        assert back.geometry is None

    def test_instance_geometry_round_trip(self):
        from jpac.scenario import ScenarioConfig, generate

        inst = generate(ScenarioConfig(K=4, seed=2))
        back = NetworkInstance.from_json(inst.to_json())
        assert back.gains == pytest.approx(inst.gains, rel=1e-15)
        assert back.geometry["tx_m"] == pytest.approx(inst.geometry["tx_m"])

    def test_problem_round_trip(self, three_link):
        back = NormalizedProblem.from_json(three_link.to_json())
        assert back.A == pytest.approx(three_link.A)
        assert back.alpha == three_link.alpha
        assert back.link_ids == three_link.link_ids

    def test_bad_version_rejected(self, three_link):
        import json

        doc = json.loads(three_link.to_json())
        doc["version"] = 99
        with pytest.raises(ValueError):
            NormalizedProblem.from_json(json.dumps(doc))
