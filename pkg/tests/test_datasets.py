import hashlib
import shutil

import numpy as np
import pytest

from spcart.core.errors import ArgumentError, DataIntegrityError, DegeneracyError, InputError
from spcart.datasets.csv_io import read_matrix_csv, read_matrix_table, write_matrix_csv
from spcart.datasets.pitprops import PITPROPS_PATH, PITPROPS_VARIABLES, load_pitprops
from spcart.datasets.preprocess import artificial_data_from_covariance, remove_dc
from spcart.datasets.registry import DatasetRegistry, registry
from spcart.datasets.synthetic import SyntheticModel, synthetic_covariance, synthetic_samples
from spcart.linalg.core import pca_loadings
from spcart.models.matrix import InputKind, MatrixInput


class TestSynthetic:
    def test_covariance_entries(self):
        c = synthetic_covariance()
        assert c.shape == (10, 10)
        assert c[0, 0] == pytest.approx(291.0)
        assert c[0, 1] == pytest.approx(290.0)
        assert c[8, 8] == pytest.approx(284.7875)
        assert c[0, 8] == pytest.approx(-87.0)
        assert c[4, 8] == pytest.approx(277.5)
        assert c[8, 9] == pytest.approx(283.7875)
        np.testing.assert_array_equal(c, c.T)

    def test_samples_match_covariance(self):
        samples = synthetic_samples(100_000, seed=0)
        c = synthetic_covariance()
        err = np.linalg.norm(np.cov(samples, rowvar=False) - c) / np.linalg.norm(c)
        assert err < 0.05

    def test_samples_seeded(self):
        np.testing.assert_array_equal(synthetic_samples(50, seed=3), synthetic_samples(50, seed=3))

    def test_non_positive_n(self):
        with pytest.raises(ArgumentError):
            synthetic_samples(0)

    def test_bad_groups(self):
        with pytest.raises(ValueError):
            SyntheticModel(groups=(0, 3))


class TestArtificialData:
    def test_identity(self):
        np.testing.assert_allclose(artificial_data_from_covariance(np.eye(3)), np.eye(3), atol=1e-12)

    def test_diagonal(self):
        np.testing.assert_allclose(artificial_data_from_covariance(np.diag([4.0, 1.0])), np.diag([2.0, 1.0]),
                                   atol=1e-12)

    def test_reproduces_pitprops(self):
        c = load_pitprops()
        a = artificial_data_from_covariance(c)
        np.testing.assert_allclose(a.T @ a, c, atol=1e-10)

    def test_shares_loadings(self):
        c = load_pitprops()
        from_data = pca_loadings(MatrixInput.from_data(artificial_data_from_covariance(c)), 3).loadings
        from_cov = pca_loadings(MatrixInput.from_covariance(c), 3).loadings
        np.testing.assert_allclose(np.abs(np.sum(from_data * from_cov, axis=0)), 1.0, atol=1e-8)

    def test_literal_inverse_root(self):
        a = artificial_data_from_covariance(np.diag([4.0, 1.0]), literal=True)
        np.testing.assert_allclose(a, np.diag([0.5, 1.0]), atol=1e-12)

    def test_literal_singular(self):
        with pytest.raises(DegeneracyError):
            artificial_data_from_covariance(np.diag([1.0, 0.0]), literal=True)

    def test_rejects_asymmetric(self):
        with pytest.raises(InputError):
            artificial_data_from_covariance(np.array([[1.0, 0.5], [0.0, 1.0]]))


class TestPitprops:
    def test_load(self):
        c = load_pitprops()
        assert c.shape == (13, 13)
        assert c[0, 1] == pytest.approx(0.954)
        np.testing.assert_array_equal(np.diag(c), 1.0)

    def test_header(self):
        _, header = read_matrix_table(PITPROPS_PATH)
        assert tuple(header) == PITPROPS_VARIABLES

    def test_corrupted_copy(self, tmp_path):
        copy = tmp_path / "pitprops.csv"
        text = PITPROPS_PATH.read_text(encoding="utf-8")
        copy.write_text(text.replace("0.954", "0.955", 1), encoding="utf-8")
        with pytest.raises(DataIntegrityError):
            load_pitprops(copy)

    def test_asymmetric_copy_with_matching_digest(self, tmp_path):
        copy = tmp_path / "pitprops.csv"
        text = PITPROPS_PATH.read_text(encoding="utf-8")
        copy.write_text(text.replace("0.954", "0.955", 1), encoding="utf-8")
        digest = hashlib.sha256(copy.read_bytes()).hexdigest()
        with pytest.raises(DataIntegrityError):
            load_pitprops(copy, sha256=digest)

    def test_pristine_copy(self, tmp_path):
        copy = tmp_path / "pitprops.csv"
        shutil.copyfile(PITPROPS_PATH, copy)
        np.testing.assert_array_equal(load_pitprops(copy), load_pitprops())


class TestMatrixCsv:
    def test_round_trip_is_exact(self, tmp_path):
        m = np.random.default_rng(0).standard_normal((5, 4))
        path = write_matrix_csv(m, tmp_path / "m.csv", header=list("abcd"), comments=["seed 0"])
        back, header = read_matrix_table(path)
        np.testing.assert_array_equal(back, m)
        assert header == list("abcd")
        assert path.read_text(encoding="utf-8").startswith("# seed 0\n")

    def test_no_header(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1,2\n3,4\n", encoding="utf-8")
        m, header = read_matrix_table(path)
        assert header is None
        np.testing.assert_array_equal(m, [[1.0, 2.0], [3.0, 4.0]])

    @pytest.mark.parametrize("content", ["1,2,3\n4,5\n", "1,,3\n4,5,6\n", "1,2\n3,abc\n", "", "a,b\n"])
    def test_malformed(self, tmp_path, content):
        path = tmp_path / "bad.csv"
        path.write_text(content, encoding="utf-8")
        with pytest.raises(InputError):
            read_matrix_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputError):
            read_matrix_csv(tmp_path / "nope.csv")

    def test_header_width_checked(self, tmp_path):
        with pytest.raises(InputError):
            write_matrix_csv(np.eye(2), tmp_path / "m.csv", header=["a"])


def test_remove_dc():
    out = remove_dc(np.array([[1.0, 2.0, 3.0], [4.0, 4.0, 4.0]]))
    np.testing.assert_allclose(out, [[-1.0, 0.0, 1.0], [0.0, 0.0, 0.0]])


class TestRegistry:
    def test_builtin_cached(self):
        a = registry.resolve("pitprops")
        assert registry.resolve("pitprops") is a
        assert a.kind is InputKind.COVARIANCE

    def test_builtin_as_data(self):
        inp = registry.resolve("synthetic", input_kind=InputKind.DATA)
        assert inp.is_data
        np.testing.assert_allclose(inp.gram(), synthetic_covariance(), atol=1e-8)

    def test_csv_is_centered(self, tmp_path):
        path = write_matrix_csv(np.random.default_rng(1).normal(5.0, 1.0, (30, 4)), tmp_path / "d.csv")
        inp = registry.resolve(str(path))
        assert inp.is_data
        np.testing.assert_allclose(inp.matrix.mean(axis=0), 0.0, atol=1e-12)

    def test_csv_uncentered_with_dc_removal(self, tmp_path):
        path = write_matrix_csv(np.array([[1.0, 3.0], [2.0, 6.0]]), tmp_path / "d.csv")
        inp = registry.resolve(str(path), center=False, remove_dc=True)
        np.testing.assert_allclose(inp.matrix, [[-1.0, 1.0], [-2.0, 2.0]])

    def test_csv_as_covariance(self, tmp_path):
        path = write_matrix_csv(np.array([[2.0, 1.0], [0.0, 2.0]]), tmp_path / "c.csv")
        with pytest.raises(InputError):
            registry.resolve(str(path), input_kind=InputKind.COVARIANCE)

    def test_unknown_source(self):
        with pytest.raises(InputError):
            registry.resolve("no-such-dataset")

    def test_clear(self):
        local = DatasetRegistry(ttl_s=60)
        a = local.resolve("synthetic")
        local.clear()
        assert local.resolve("synthetic") is not a
