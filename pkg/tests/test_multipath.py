"""n-path coherence/distinguishability, duality bound and pair aggregation."""

import math

import numpy as np
import pytest

from dualitylab import (
    build_mixed_state,
    build_pure_state,
    coherence,
    coherence_from_pair_visibilities,
    distinguishability,
    distinguishability_from_pairs,
    duality_report,
    is_symmetric,
    pair_distinguishability,
    pair_visibility,
)
from dualitylab.sampling import (
    random_amplitudes,
    random_detectors,
    random_gram,
    random_mixed_state,
    random_pure_state,
    random_symmetric_mixed_state,
    random_symmetric_pure_state,
)

ISQ3 = 1.0 / np.sqrt(3.0)
TRINE_DETECTORS = [(1, 0), (0.5, np.sqrt(3) / 2), (0.5, -np.sqrt(3) / 2)]


class TestDirectFormulas:
    def test_maximal_coherence(self):
        state = build_pure_state([0.5] * 4, [(1, 0)] * 4)
        assert coherence(state) == pytest.approx(1.0, abs=1e-12)
        assert distinguishability(state) == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_detectors(self):
        state = build_pure_state([0.5] * 4, np.eye(4))
        assert coherence(state) == 0.0
        assert distinguishability(state) == pytest.approx(1.0, abs=1e-12)

    def test_half_overlap_three_paths(self):
        # (1/2) * 6 * (1/3) * 0.5 = 0.5 for both quantities.
        state = build_pure_state([ISQ3] * 3, TRINE_DETECTORS)
        assert coherence(state) == pytest.approx(0.5, abs=1e-12)
        assert distinguishability(state) == pytest.approx(0.5, abs=1e-12)

    def test_maximally_mixed_margin_one(self):
        for n in range(2, 6):
            state = build_mixed_state(np.eye(n) / n, np.ones((n, n)))
            report = duality_report(state)
            assert report.coherence == pytest.approx(0.0, abs=1e-12)
            assert report.distinguishability == pytest.approx(0.0, abs=1e-12)
            assert report.duality_margin == pytest.approx(1.0, abs=1e-12)

    def test_asymmetric_pure_full_overlap(self):
        # C = sqrt(.15) + sqrt(.10) + sqrt(.06), frozen from the pair sums.
        expected = math.sqrt(0.15) + math.sqrt(0.10) + math.sqrt(0.06)
        state = build_pure_state(np.sqrt([0.5, 0.3, 0.2]), [(1, 0)] * 3)
        assert coherence(state) == pytest.approx(expected, abs=1e-12)
        assert distinguishability(state) == pytest.approx(1.0 - expected, abs=1e-12)


class TestAggregation:
    def test_symmetric_average_matches(self):
        state = build_pure_state([ISQ3] * 3, TRINE_DETECTORS)
        assert is_symmetric(state)
        assert coherence_from_pair_visibilities(state) == pytest.approx(
            coherence(state), abs=1e-12)
        assert distinguishability_from_pairs(state) == pytest.approx(
            distinguishability(state), abs=1e-12)

    def test_asymmetric_weighted_sum_matches(self):
        state = build_pure_state(np.sqrt([0.5, 0.3, 0.2]), [(1, 0)] * 3)
        assert not is_symmetric(state)
        # Independent evaluation of the weighted pair sum.
        by_hand = 0.0
        for i, j in [(0, 1), (0, 2), (1, 2)]:
            weight = state.rho[i, i].real + state.rho[j, j].real
            by_hand += weight * pair_visibility(state, i, j)
        by_hand /= state.n - 1
        assert coherence_from_pair_visibilities(state) == pytest.approx(by_hand, abs=1e-15)
        assert by_hand == pytest.approx(coherence(state), abs=1e-10)

    def test_orthogonal_detectors_aggregate(self):
        state = build_pure_state([ISQ3] * 3, np.eye(3))
        assert coherence_from_pair_visibilities(state) == pytest.approx(0.0, abs=1e-12)
        assert distinguishability_from_pairs(state) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("sampler,seed", [(random_mixed_state, 1001),
                                              (random_pure_state, 1002),
                                              (random_symmetric_mixed_state, 1003),
                                              (random_symmetric_pure_state, 1004)])
    def test_aggregation_identity_random(self, sampler, seed):
        rng = np.random.default_rng(seed)
        for _ in range(400):
            n = int(rng.integers(2, 7))
            state = sampler(n, rng, gram_rank=int(rng.integers(1, n + 2)))
            assert abs(coherence_from_pair_visibilities(state)
                       - coherence(state)) <= 1e-10
            assert abs(distinguishability_from_pairs(state)
                       - distinguishability(state)) <= 1e-10

    def test_symmetric_weighted_equals_plain_average(self):
        # With equal path probabilities every weight is 2/n, so the weighted
        # sum collapses to the plain pair average.
        rng = np.random.default_rng(41)
        for _ in range(50):
            n = int(rng.integers(2, 7))
            state = random_symmetric_mixed_state(n, rng)
            report = duality_report(state)
            assert report.is_symmetric
            assert report.symmetric_sum_lhs is not None
            assert report.symmetric_sum_lhs == pytest.approx(
                report.weighted_sum_lhs, abs=1e-10)


class TestDualityReport:
    def test_pure_state_margin_zero(self):
        rng = np.random.default_rng(53)
        for _ in range(100):
            n = int(rng.integers(2, 7))
            report = duality_report(random_pure_state(n, rng))
            assert abs(report.duality_margin) <= 1e-10

    def test_orthogonal_detectors_margin_zero(self):
        state = build_pure_state([ISQ3] * 3, np.eye(3))
        report = duality_report(state)
        assert report.coherence == 0.0
        assert report.distinguishability == pytest.approx(1.0, abs=1e-12)
        assert report.duality_margin == pytest.approx(0.0, abs=1e-12)

    def test_report_carries_all_pairs(self):
        rng = np.random.default_rng(59)
        state = random_mixed_state(5, rng)
        report = duality_report(state)
        assert len(report.pairwise) == 10
        assert report.dark_pairs == ()
        assert [(m.i, m.j) for m in report.pairwise] == sorted(
            (i, j) for i in range(5) for j in range(i + 1, 5))

    def test_dark_pairs_reported_not_raised(self):
        state = build_mixed_state(np.diag([0.0, 0.0, 1.0]), np.ones((3, 3)))
        report = duality_report(state)
        assert report.dark_pairs == ((0, 1),)
        assert len(report.pairwise) == 2
        assert report.symmetric_sum_lhs is None

    def test_gram_rank_in_report(self):
        rng = np.random.default_rng(61)
        state = random_mixed_state(4, rng, gram_rank=2)
        assert duality_report(state).gram_rank == 2

    def test_symmetric_sum_only_for_symmetric_states(self):
        state = build_pure_state(np.sqrt([0.5, 0.3, 0.2]), [(1, 0)] * 3)
        report = duality_report(state)
        assert not report.is_symmetric
        assert report.symmetric_sum_lhs is None
        assert report.weighted_sum_lhs == pytest.approx(1.0, abs=1e-10)


class TestInvarianceProperties:
    def test_phase_flip_leaves_everything_unchanged(self):
        rng = np.random.default_rng(71)
        for _ in range(100):
            n = int(rng.integers(2, 7))
            amplitudes = random_amplitudes(n, rng)
            detectors = random_detectors(n, n, rng)
            base = build_pure_state(amplitudes, detectors)
            flipped_amplitudes = amplitudes.copy()
            k = int(rng.integers(0, n))
            phase = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi)) if rng.random() < 0.5 else -1.0
            flipped_amplitudes[k] *= phase
            flipped = build_pure_state(flipped_amplitudes, detectors)
            assert coherence(flipped) == pytest.approx(coherence(base), abs=1e-12)
            assert distinguishability(flipped) == pytest.approx(
                distinguishability(base), abs=1e-12)
            for i in range(n):
                for j in range(i + 1, n):
                    assert pair_visibility(flipped, i, j) == pytest.approx(
                        pair_visibility(base, i, j), abs=1e-12)
                    assert pair_distinguishability(flipped, i, j) == pytest.approx(
                        pair_distinguishability(base, i, j), abs=1e-12)

    def test_overlap_scaling_monotonicity(self):
        # Shrinking every off-diagonal overlap by t in [0, 1] removes
        # which-path overlap, so C grows with t and D_Q falls with t.
        rng = np.random.default_rng(73)
        for _ in range(50):
            n = int(rng.integers(2, 7))
            rho = random_mixed_state(n, rng).rho
            gram = random_gram(n, rng)
            grid = np.linspace(0.0, 1.0, 9)
            coh_values, dist_values = [], []
            for t in grid:
                gram_t = t * gram + (1.0 - t) * np.eye(n)
                state = build_mixed_state(rho, gram_t)
                coh_values.append(coherence(state))
                dist_values.append(distinguishability(state))
            assert np.all(np.diff(coh_values) >= -1e-12)
            assert np.all(np.diff(dist_values) <= 1e-12)

    def test_duality_bound_random(self):
        rng = np.random.default_rng(79)
        for _ in range(1000):
            n = int(rng.integers(2, 9))
            state = random_mixed_state(n, rng, gram_rank=int(rng.integers(1, n + 2)))
            assert coherence(state) + distinguishability(state) <= 1.0 + 1e-10
