import math

import numpy as np
import pytest

from quadscorer.losses import (OBJECTIVES, ComparisonSample, LossConfig,
                               combined_objective, ranking_loss,
                               ranking_loss_grad)
from quadscorer.quads import LabelSequence, Review

LN2 = math.log(2.0)
LN4 = math.log(4.0)


def central_diff(kind, logp_pos, logp_negs, beta=1.0, h=1e-6):
    """Finite-difference gradient oracle, independent of the analytic path."""
    def f(p, negs):
        return ranking_loss(kind, p, negs, beta)

    g_pos = (f(logp_pos + h, logp_negs) - f(logp_pos - h, logp_negs)) / (2 * h)
    g_negs = []
    for i in range(len(logp_negs)):
        up = list(logp_negs)
        down = list(logp_negs)
        up[i] += h
        down[i] -= h
        g_negs.append((f(logp_pos, up) - f(logp_pos, down)) / (2 * h))
    return g_pos, np.array(g_negs)


class TestListwise:
    def test_equal_likelihoods_give_log_k(self):
        assert ranking_loss("listwise", -1.0, [-1.0, -1.0, -1.0]) == pytest.approx(
            LN4, abs=1e-9)

    def test_half_vs_two_quarters(self):
        loss = ranking_loss("listwise", math.log(0.5),
                            [math.log(0.25), math.log(0.25)])
        assert loss == pytest.approx(LN2, abs=1e-9)

    def test_shift_invariance(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            pos = float(-rng.uniform(0.1, 5))
            negs = list(-rng.uniform(0.1, 5, size=3))
            shift = float(rng.normal())
            a = ranking_loss("listwise", pos, negs)
            b = ranking_loss("listwise", pos + shift, [n + shift for n in negs])
            assert a == pytest.approx(b, rel=1e-9)

    def test_removing_a_negative_never_increases_loss(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            pos = float(-rng.uniform(0.1, 5))
            negs = list(-rng.uniform(0.1, 5, size=4))
            full = ranking_loss("listwise", pos, negs)
            for i in range(len(negs)):
                reduced = ranking_loss("listwise", pos, negs[:i] + negs[i + 1:])
                assert reduced <= full + 1e-12

    def test_no_negatives_is_zero(self):
        assert ranking_loss("listwise", -2.0, []) == pytest.approx(0.0, abs=1e-12)


class TestPointwise:
    def test_probability_one_negative_is_domain_error(self):
        with pytest.raises(ValueError):
            ranking_loss("pointwise", -1.0, [0.0])

    def test_value_matches_direct_formula(self):
        pos, negs = math.log(0.8), [math.log(0.3), math.log(0.6)]
        expected = -math.log(0.8) - math.log(0.7) - math.log(0.4)
        assert ranking_loss("pointwise", pos, negs) == pytest.approx(expected, rel=1e-12)


class TestPairwise:
    def test_equal_likelihoods_cost_log2_per_negative(self):
        for beta in (0.5, 1.0, 3.0):
            loss = ranking_loss("pairwise1", -2.0, [-2.0, -2.0, -2.0], beta=beta)
            assert loss == pytest.approx(3 * LN2, abs=1e-9)

    def test_hinge_inactive(self):
        assert ranking_loss("pairwise2", math.log(0.5), [math.log(0.3)]) == 0.0

    def test_hinge_active_value(self):
        loss = ranking_loss("pairwise2", math.log(0.3), [math.log(0.5)])
        assert loss == pytest.approx(0.2, rel=1e-12)


class TestGradients:
    @pytest.mark.parametrize("kind", OBJECTIVES)
    def test_matches_central_differences(self, kind):
        rng = np.random.default_rng(42)
        checked = 0
        while checked < 100:
            pos = float(-rng.uniform(0.05, 6.0))
            negs = -rng.uniform(0.05, 6.0, size=int(rng.integers(1, 5)))
            if kind == "pairwise2" and np.any(
                    np.abs(np.exp(negs) - np.exp(pos)) < 1e-3):
                continue  # keep finite differences away from the hinge kink
            beta = float(rng.uniform(0.5, 2.0))
            g_pos, g_negs = ranking_loss_grad(kind, pos, negs, beta)
            e_pos, e_negs = central_diff(kind, pos, list(negs), beta)
            scale = max(1e-8, abs(e_pos), float(np.max(np.abs(e_negs))))
            assert abs(g_pos - e_pos) / scale < 1e-4
            assert np.max(np.abs(g_negs - e_negs)) / scale < 1e-4
            checked += 1

    @pytest.mark.parametrize("kind", OBJECTIVES)
    def test_losses_non_negative(self, kind):
        rng = np.random.default_rng(7)
        for _ in range(100):
            pos = float(-rng.uniform(0.01, 8.0))
            negs = -rng.uniform(0.01, 8.0, size=3)
            assert ranking_loss(kind, pos, negs) >= 0.0


class TestCombined:
    def test_alpha_zero_is_mean_ranking_loss(self):
        comp = [(-1.0, [-1.0, -1.0, -1.0]), (math.log(0.5), [math.log(0.25)] * 2)]
        loss = combined_objective(comp, [math.log(0.9)], alpha=0.0)
        assert loss == pytest.approx((LN4 + LN2) / 2, abs=1e-9)

    def test_empty_comparison_batch_is_positive_nll(self):
        extra = [math.log(0.5), math.log(0.25)]
        loss = combined_objective([], extra, alpha=1.0)
        assert loss == pytest.approx(-(extra[0] + extra[1]) / 2, rel=1e-12)

    def test_both_empty_is_zero(self):
        assert combined_objective([], [], alpha=1.0) == 0.0

    def test_frozen_two_sample_value(self):
        comp = [(-1.0, [-1.0, -1.0, -1.0]), (math.log(0.5), [math.log(0.25)] * 2)]
        assert combined_objective(comp, [], alpha=0.0) == pytest.approx(
            1.039721, abs=1e-6)


class TestTypes:
    def test_loss_config_validation(self):
        with pytest.raises(ValueError):
            LossConfig(objective="bogus")
        with pytest.raises(ValueError):
            LossConfig(alpha=-0.1)
        with pytest.raises(ValueError):
            LossConfig(beta=0.0)

    def test_comparison_sample_rejects_positive_among_negatives(self):
        review = Review(id="r", text="the food was great")
        pos = LabelSequence.from_text("food quality | positive | food | great")
        dup = LabelSequence.from_text("food quality|positive|food|great")
        with pytest.raises(ValueError):
            ComparisonSample(review=review, positive=pos, negatives=(dup,))

    def test_comparison_sample_rejects_duplicate_negatives(self):
        review = Review(id="r", text="the food was great")
        pos = LabelSequence.from_text("food quality | positive | food | great")
        neg = LabelSequence.from_text("food quality | negative | food | great")
        dup = LabelSequence.from_text("food quality|negative|food|great")
        with pytest.raises(ValueError):
            ComparisonSample(review=review, positive=pos, negatives=(neg, dup))
