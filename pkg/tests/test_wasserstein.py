"""Empirical distances, bound estimators, and their leave-one-out replicates."""

import itertools

import numpy as np
import pytest

from wassbound import (
    EmpiricalMeasure,
    decay_constant,
    estimate_bounds,
    estimate_lower,
    estimate_lower_squared,
    estimate_upper,
    w2_squared,
    w2_squared_1d,
)


def brute_force_w2sq(a, b):
    n = a.shape[0]
    c = ((a[:, None, :] - b[None, :, :]) ** 2).sum(-1)
    return min(c[np.arange(n), p].sum() for p in itertools.permutations(range(n))) / n


def drop(arr, i):
    return np.delete(arr, i, axis=0)


class TestEmpiricalMeasure:
    def test_coerces_1d(self):
        m = EmpiricalMeasure([1.0, 2.0, 3.0])
        assert (m.n, m.d) == (3, 1)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            EmpiricalMeasure([[np.nan, 0.0]])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            EmpiricalMeasure(np.empty((0, 2)))


class TestW2Squared:
    def test_same_point_sets(self):
        cost, _ = w2_squared([0.0, 1.0], [1.0, 0.0])
        assert cost == 0.0

    def test_sorted_pairing_arithmetic(self):
        cost, _ = w2_squared([0.0, 2.0], [1.0, 3.0])
        assert cost == pytest.approx(1.0)

    def test_matches_permutation_enumeration(self):
        rng = np.random.default_rng(10)
        a = rng.normal(size=(6, 3))
        b = rng.normal(size=(6, 3))
        cost, sol = w2_squared(a, b)
        assert cost == pytest.approx(brute_force_w2sq(a, b), rel=1e-12)
        assert sorted(sol.sigma) == list(range(6))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            w2_squared(np.zeros((3, 2)), np.zeros((4, 2)))
        with pytest.raises(ValueError):
            w2_squared(np.zeros((3, 2)), np.zeros((3, 3)))

    def test_metric_axioms_on_random_triples(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            n, d = int(rng.integers(2, 9)), int(rng.integers(1, 4))
            a, b, c = rng.normal(size=(3, n, d)) * rng.random() * 3
            ab, _ = w2_squared(a, b)
            ba, _ = w2_squared(b, a)
            aa, _ = w2_squared(a, a)
            ac, _ = w2_squared(a, c)
            bc, _ = w2_squared(b, c)
            assert ab == pytest.approx(ba, rel=1e-12)
            assert aa == pytest.approx(0.0, abs=1e-12)
            assert np.sqrt(ac) <= np.sqrt(ab) + np.sqrt(bc) + 1e-9

    def test_translation_covariance(self):
        rng = np.random.default_rng(12)
        a = rng.normal(size=(8, 3))
        b = rng.normal(size=(8, 3))
        shift = rng.normal(size=3)
        base, _ = w2_squared(a, b)
        both, _ = w2_squared(a + shift, b + shift)
        assert both == pytest.approx(base, rel=1e-9, abs=1e-12)
        # identical point sets, one side shifted: the matching is a translation
        moved, _ = w2_squared(a, a + shift)
        assert moved == pytest.approx(float(shift @ shift), rel=1e-12)

    def test_plug_in_positive_bias(self):
        # Monte-Carlo mean of the plug-in exceeds the true squared distance
        rng = np.random.default_rng(13)
        truth = 2.0 * (np.sqrt(2.0) - 1.0) ** 2  # N2(0,I) vs N2(0,2I)
        vals = []
        for _ in range(200):
            a = rng.standard_normal((20, 2))
            b = np.sqrt(2.0) * rng.standard_normal((20, 2))
            vals.append(w2_squared(a, b)[0])
        assert np.mean(vals) > truth


class TestW2Squared1d:
    def test_identical_multisets(self):
        assert w2_squared_1d([3.0, 1.0, 2.0], [1.0, 2.0, 3.0]) == 0.0

    def test_unit_shift(self):
        assert w2_squared_1d([0.0, 0.0], [1.0, 1.0]) == pytest.approx(1.0)

    def test_matches_general_solver(self):
        rng = np.random.default_rng(14)
        a = rng.normal(size=50)
        b = rng.normal(size=50) * 2 + 1
        assert w2_squared_1d(a, b) == pytest.approx(w2_squared(a, b)[0], rel=1e-12)

    def test_rejects_multivariate(self):
        with pytest.raises(ValueError):
            w2_squared_1d(np.zeros((3, 2)), np.zeros((3, 2)))


class TestEstimators:
    def test_identical_nu_and_mu_prime_cancel(self):
        rng = np.random.default_rng(20)
        pts = rng.normal(size=(6, 2))
        mu = rng.normal(size=(6, 2))
        upper, lower, lower_sq = estimate_bounds(pts, mu, pts)
        assert upper.value == 0.0
        assert lower.value == 0.0
        assert lower_sq.value == 0.0
        assert np.all(upper.loo_values == 0.0)

    def test_upper_matches_brute_force_difference(self):
        rng = np.random.default_rng(21)
        nu, mu, mup = rng.normal(size=(3, 4, 2))
        upper = estimate_upper(nu, mu, mup)
        expected = brute_force_w2sq(nu, mu) - brute_force_w2sq(mup, mu)
        assert upper.value == pytest.approx(expected, rel=1e-12)

    def test_lower_matches_roots_of_brute_force(self):
        rng = np.random.default_rng(22)
        nu, mu, mup = rng.normal(size=(3, 4, 2))
        lower = estimate_lower(nu, mu, mup)
        expected = np.sqrt(brute_force_w2sq(nu, mu)) - np.sqrt(brute_force_w2sq(mup, mu))
        assert lower.value == pytest.approx(expected, rel=1e-12)

    def test_lower_value_bound_algebra(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            nu, mu, mup = rng.normal(size=(3, 5, 3)) * 2
            lower = estimate_lower(nu, mu, mup)
            cap = max(w2_squared(nu, mu)[0], w2_squared(mup, mu)[0])
            assert lower.value**2 <= cap + 1e-12

    def test_lower_squared_sign_preservation(self):
        rng = np.random.default_rng(24)
        nu, mu, mup = rng.normal(size=(3, 5, 2))
        lower = estimate_lower(nu, mu, mup)
        lower_sq = estimate_lower_squared(nu, mu, mup)
        assert np.sign(lower_sq.value) == np.sign(lower.value)
        assert abs(lower_sq.value) == pytest.approx(lower.value**2, rel=1e-12)
        assert np.allclose(lower_sq.loo_values, np.sign(lower.loo_values) * lower.loo_values**2)

    def test_loo_replicates_match_reduced_sample(self):
        # paired deletion: replicate i is the estimator on samples minus point i
        rng = np.random.default_rng(25)
        nu, mu, mup = rng.normal(size=(3, 6, 2))
        upper, lower, _ = estimate_bounds(nu, mu, mup)
        for i in range(6):
            u_i = estimate_upper(drop(nu, i), drop(mu, i), drop(mup, i))
            assert upper.loo_values[i] == pytest.approx(u_i.value, rel=1e-10, abs=1e-12)
            l_i = estimate_lower(drop(nu, i), drop(mu, i), drop(mup, i))
            assert lower.loo_values[i] == pytest.approx(l_i.value, rel=1e-10, abs=1e-12)

    def test_joint_and_single_calls_agree(self):
        rng = np.random.default_rng(26)
        nu, mu, mup = rng.normal(size=(3, 5, 2))
        upper, lower, lower_sq = estimate_bounds(nu, mu, mup, alpha=0.1)
        for joint, single in (
            (upper, estimate_upper(nu, mu, mup, alpha=0.1)),
            (lower, estimate_lower(nu, mu, mup, alpha=0.1)),
            (lower_sq, estimate_lower_squared(nu, mu, mup, alpha=0.1)),
        ):
            assert single.kind == joint.kind
            assert single.value == joint.value
            assert np.array_equal(single.loo_values, joint.loo_values)
            assert (single.ci_low, single.ci_high) == (joint.ci_low, joint.ci_high)

    def test_ci_fields_absent_until_requested(self):
        rng = np.random.default_rng(27)
        nu, mu, mup = rng.normal(size=(3, 4, 2))
        upper = estimate_upper(nu, mu, mup)
        assert upper.ci_low is None and upper.ci_high is None
        upper_ci = estimate_upper(nu, mu, mup, alpha=0.05)
        assert upper_ci.ci_low < upper_ci.value < upper_ci.ci_high

    def test_shift_unbiasedness_small(self):
        # nu = mu + a: the upper estimator is unbiased for ||a||^2
        rng = np.random.default_rng(28)
        a = np.array([0.6, -0.8])
        vals = []
        for _ in range(150):
            mu = rng.standard_normal((30, 2))
            mup = rng.standard_normal((30, 2))
            nu = rng.standard_normal((30, 2)) + a
            vals.append(w2_squared(nu, mu)[0] - w2_squared(mup, mu)[0])
        se = np.std(vals, ddof=1) / np.sqrt(len(vals))
        assert abs(np.mean(vals) - 1.0) <= 3 * se

    def test_requires_matching_shapes(self):
        with pytest.raises(ValueError):
            estimate_bounds(np.zeros((4, 2)), np.zeros((4, 2)), np.zeros((5, 2)))
        with pytest.raises(ValueError):
            estimate_bounds(np.zeros((1, 2)), np.zeros((1, 2)), np.zeros((1, 2)))


class TestDecayConstant:
    def test_all_at_origin(self):
        assert decay_constant(np.zeros((5, 3)), np.zeros((5, 3))) == 0.0

    def test_direct_formula(self):
        # mean ||X||^2 = 4 and mean ||Y||^2 = 9 gives 3*2 + 3 = 9
        mu = np.array([[2.0, 0.0], [0.0, -2.0]])
        nu = np.array([[3.0, 0.0], [0.0, 3.0]])
        assert decay_constant(mu, nu) == pytest.approx(9.0)

    def test_standard_normal_scaling(self):
        rng = np.random.default_rng(29)
        d = 16
        mu = rng.standard_normal((40000, d))
        nu = rng.standard_normal((40000, d))
        # E||X||^2 = d, so the constant is about 4 sqrt(d)
        assert decay_constant(mu, nu) == pytest.approx(4 * np.sqrt(d), rel=0.02)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            decay_constant(np.empty((0, 2)), np.zeros((2, 2)))
