from itertools import combinations

import numpy as np
import pytest

from spcart.core.errors import ArgumentError
from spcart.models.config import TruncationKind, TruncationSpec
from spcart.truncation.operators import (
    apply_truncation,
    hard_threshold,
    soft_threshold,
    threshold,
    truncate,
    truncate_by_energy,
    truncate_by_sparsity,
    truncate_columns,
)

Z = np.array([0.7, 0.5, 0.5, 0.1])  # unit norm


def _random_unit(rng, p):
    z = rng.standard_normal(p)
    return z / np.linalg.norm(z)


class TestHardThreshold:
    def test_zeroes_small_entries(self):
        res = hard_threshold(Z, 0.3)
        np.testing.assert_allclose(res.vector, np.array([0.7, 0.5, 0.5, 0.0]) / np.sqrt(0.99))
        assert res.cardinality == 3
        assert res.truncated_energy == pytest.approx(0.01)
        assert res.deviation_sin == pytest.approx(0.1)

    def test_boundary_is_zeroed(self):
        res = hard_threshold(np.array([0.6, 0.8]), 0.6)
        np.testing.assert_allclose(res.vector, [0.0, 1.0])

    def test_everything_removed_is_flagged(self):
        res = hard_threshold(np.full(4, 0.5), 0.5)
        assert res.is_zero
        assert not np.any(res.vector)
        assert res.deviation_sin == 1.0

    def test_zero_lambda_keeps_vector(self):
        res = hard_threshold(Z, 0.0)
        np.testing.assert_allclose(res.vector, Z)
        assert res.deviation_sin == 0.0


class TestSoftThreshold:
    def test_shrinks_and_renormalizes(self):
        res = soft_threshold(Z, 0.3)
        expected = np.array([0.4, 0.2, 0.2, 0.0]) / np.sqrt(0.24)
        np.testing.assert_allclose(res.vector, expected)
        assert res.cardinality == 3

    def test_same_support_as_hard(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            z = _random_unit(rng, 12)
            assert np.array_equal(soft_threshold(z, 0.2).vector != 0, hard_threshold(z, 0.2).vector != 0)

    def test_deviation_at_least_hard(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            z = _random_unit(rng, 12)
            assert soft_threshold(z, 0.25).deviation_sin >= hard_threshold(z, 0.25).deviation_sin - 1e-12


class TestSparsityTruncation:
    def test_ties_zero_lower_index_first(self):
        res = truncate_by_sparsity(Z, 2)
        np.testing.assert_allclose(res.vector, np.array([0.7, 0.0, 0.5, 0.0]) / np.sqrt(0.74))

    def test_exact_cardinality(self):
        rng = np.random.default_rng(2)
        for lam in range(10):
            assert truncate_by_sparsity(_random_unit(rng, 10), lam).cardinality == 10 - lam

    def test_optimal_support(self):
        # kept energy must match the best support of the same size
        rng = np.random.default_rng(3)
        p = 6
        for _ in range(20):
            z = _random_unit(rng, p)
            for lam in range(p):
                res = truncate_by_sparsity(z, lam)
                best = max(sum(z[list(s)] ** 2) for s in combinations(range(p), p - lam))
                assert 1.0 - res.truncated_energy == pytest.approx(best, abs=1e-12)

    def test_lambda_above_p_minus_one(self):
        with pytest.raises(ArgumentError) as exc:
            truncate_by_sparsity(Z, 4)
        assert exc.value.flag == "--lambda"

    def test_fractional_lambda(self):
        with pytest.raises(ArgumentError):
            truncate_by_sparsity(Z, 1.5)


class TestEnergyTruncation:
    def test_removes_smallest_within_share(self):
        res = truncate_by_energy(Z, 0.26)
        np.testing.assert_allclose(res.vector, np.array([0.7, 0.0, 0.5, 0.0]) / np.sqrt(0.74))
        assert res.truncated_energy == pytest.approx(0.26)

    def test_zero_lambda_keeps_tiny_entries(self):
        z = np.array([1.0, 1e-7])
        z /= np.linalg.norm(z)
        res = truncate_by_energy(z, 0.0)
        assert res.cardinality == 2

    def test_never_removes_everything(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            assert not truncate_by_energy(_random_unit(rng, 8), 0.99).is_zero

    def test_lambda_must_be_below_one(self):
        with pytest.raises(ArgumentError):
            truncate_by_energy(Z, 1.0)


class TestTruncate:
    def test_requires_unit_vector(self):
        spec = TruncationSpec(kind=TruncationKind.HARD, lam=0.1)
        with pytest.raises(ArgumentError):
            truncate(2 * Z, spec)

    @pytest.mark.parametrize("kind,lam", [("l0", 0.2), ("l1", 0.2), ("sp", 3), ("en", 0.2)])
    def test_unit_output(self, kind, lam):
        rng = np.random.default_rng(5)
        spec = TruncationSpec(kind=kind, lam=lam)
        for _ in range(20):
            res = truncate(_random_unit(rng, 10), spec)
            if not res.is_zero:
                assert np.linalg.norm(res.vector) == pytest.approx(1.0, abs=1e-12)


class TestThreshold:
    @pytest.mark.parametrize("kind", [TruncationKind.HARD, TruncationKind.SOFT])
    def test_adaptive_equals_scaled_threshold(self, kind):
        rng = np.random.default_rng(6)
        lam = 0.2
        for _ in range(50):
            z = rng.standard_normal(15)
            z *= rng.uniform(0.1, 1.5) / np.linalg.norm(z)
            adaptive = threshold(z, TruncationSpec(kind=kind, lam=lam), adaptive=True)
            scaled = apply_truncation(z, TruncationSpec(kind=kind, lam=lam * np.linalg.norm(z)))
            np.testing.assert_allclose(adaptive, scaled, atol=1e-12)

    def test_raw_mode_ignores_scale(self):
        z = np.array([0.05, 0.02, 0.01])
        spec = TruncationSpec(kind=TruncationKind.HARD, lam=0.03)
        np.testing.assert_allclose(threshold(z, spec, adaptive=False), [0.05, 0.0, 0.0])
        np.testing.assert_allclose(threshold(z, spec, adaptive=True), z)

    def test_zero_vector(self):
        spec = TruncationSpec(kind=TruncationKind.SOFT, lam=0.1)
        assert not np.any(threshold(np.zeros(3), spec))


class TestTruncateColumns:
    def test_zero_column_falls_back(self):
        z = np.column_stack([np.full(4, 0.5), np.eye(4)[:, 0]])
        x, results, fallbacks = truncate_columns(z, TruncationSpec(kind=TruncationKind.HARD, lam=0.5))
        assert fallbacks == 1
        assert results[0].is_zero
        np.testing.assert_allclose(x[:, 0], np.full(4, 0.5))
        np.testing.assert_allclose(x[:, 1], np.eye(4)[:, 0])
