import json

import numpy as np
import pandas as pd
import pytest
from loguru import logger

from spcart.commands.compare import sweep_cells
from spcart.datasets.csv_io import read_matrix_table, write_matrix_csv
from spcart.main import build_parser, build_run_config, main
from spcart.models.config import Method


@pytest.fixture(autouse=True)
def detach_logging():
    yield
    # main() points loguru at the captured stderr; drop it before capture closes
    logger.remove()


def _error(capsys):
    lines = [line for line in capsys.readouterr().err.splitlines() if line.startswith("{")]
    assert lines, "no error record on stderr"
    return json.loads(lines[-1])


def _config(argv):
    return build_run_config(build_parser().parse_args(argv))


def _jsonl(path):
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh]


class TestFit:
    def test_pitprops_spcart(self, output_dir):
        code = main(["fit", "--input", "pitprops", "--method", "spcart", "--trunc", "sp", "--lambda", "10",
                     "--r", "6"])
        assert code == 0
        metrics = pd.read_csv(output_dir / "fit_pitprops_spcart_metrics.csv", dtype=str)
        assert metrics.loc[0, "cardinalities"] == "333333"
        loadings, header = read_matrix_table(output_dir / "fit_pitprops_spcart_loadings.csv")
        assert header is None
        assert loadings.shape == (13, 6)
        assert np.all(np.count_nonzero(loadings, axis=0) == 3)

    def test_pca_cpev(self, output_dir):
        assert main(["fit", "--input", "pitprops", "--method", "pca", "--r", "6", "--format", "jsonl"]) == 0
        record = _jsonl(output_dir / "fit_pitprops_pca_metrics.jsonl")[0]
        assert record["cpev"] == pytest.approx(0.87, abs=0.002)
        assert record["truncation"] is None

    def test_synthetic_rsvd_gp(self, output_dir):
        assert main(["fit", "--method", "rsvd-gp", "--trunc", "sp", "--lambda", "4", "--r", "2"]) == 0
        loadings, _ = read_matrix_table(output_dir / "fit_synthetic_rsvd-gp_loadings.csv")
        supports = {frozenset(np.flatnonzero(loadings[:, i]).tolist()) for i in range(2)}
        assert supports == {frozenset(range(4, 10)), frozenset([0, 1, 2, 3, 8, 9])}

    def test_prints_output_paths(self, output_dir, capsys):
        assert main(["fit", "--method", "st", "--trunc", "l0", "--r", "2"]) == 0
        printed = capsys.readouterr().out.split()
        assert str(output_dir / "fit_synthetic_st_loadings.csv") in printed

    def test_block_mode_on_builtin_uses_artificial_data(self, output_dir):
        assert main(["fit", "--input", "pitprops", "--method", "rsvd-gpb", "--trunc", "l1",
                     "--lambda", "0.2", "--r", "3", "--format", "jsonl"]) == 0
        record = _jsonl(output_dir / "fit_pitprops_rsvd-gpb_metrics.jsonl")[0]
        assert record["method"] == "rsvd-gpb"
        assert 0.0 < record["cpev"] <= 1.0


class TestErrors:
    @pytest.mark.parametrize("argv,flag", [
        (["fit", "--lambda", "abc"], "--lambda"),
        (["fit", "--trunc", "sp", "--lambda", "1/sqrt(p)"], "--lambda"),
        (["fit", "--trunc", "l0", "--lambda", "1.5"], "--lambda"),
        (["fit", "--input", "pitprops", "--r", "20"], "--r"),
        (["fit", "--input", "pitprops", "--trunc", "sp", "--lambda", "13"], "--lambda"),
        (["fit", "--method", "rsvd-gpb", "--input-kind", "covariance"], "--input-kind"),
        (["bounds", "--method", "pca"], "--method"),
    ])
    def test_argument_errors(self, output_dir, capsys, argv, flag):
        assert main(argv) == 2
        record = _error(capsys)
        assert record["error"] == "argument"
        assert record["flag"] == flag
        assert record["run_id"]

    def test_unknown_command(self, capsys):
        assert main(["frobnicate"]) == 2
        assert _error(capsys)["error"] == "argument"

    def test_missing_file(self, output_dir, tmp_path, capsys):
        assert main(["fit", "--input", str(tmp_path / "missing.csv")]) == 3
        assert _error(capsys)["error"] == "data"

    def test_asymmetric_covariance(self, output_dir, tmp_path, capsys):
        path = write_matrix_csv(np.array([[2.0, 1.0], [0.0, 2.0]]), tmp_path / "c.csv")
        assert main(["fit", "--input", str(path), "--input-kind", "covariance", "--r", "1"]) == 3
        assert _error(capsys)["error"] == "data"


class TestConfigLayers:
    def test_config_file_and_flag_precedence(self, tmp_path):
        path = tmp_path / "run.env"
        path.write_text("trunc=sp\nlambda=7\nr=6\nmax-iter=50\n", encoding="utf-8")
        cfg = _config(["fit", "--config", str(path), "--lambda", "9"])
        assert cfg.trunc.value == "sp"
        assert cfg.lam == "9"
        assert cfg.r == 6
        assert cfg.max_iterations == 50

    def test_environment_defaults(self, monkeypatch):
        from spcart.core.config import get_settings

        monkeypatch.setenv("SPCART_MAX_ITERATIONS", "17")
        get_settings.cache_clear()
        try:
            assert _config(["fit"]).max_iterations == 17
        finally:
            get_settings.cache_clear()

    def test_unknown_config_key(self, tmp_path, capsys):
        path = tmp_path / "run.env"
        path.write_text("frobnicate=1\n", encoding="utf-8")
        assert main(["fit", "--config", str(path)]) == 2
        assert _error(capsys)["flag"] == "--config"

    def test_list_fields(self):
        cfg = _config(["compare", "--methods", "spcart, pca", "--lambdas", "0.1,0.2"])
        assert cfg.methods == [Method.SPCART, Method.PCA]
        assert cfg.lambdas == ["0.1", "0.2"]


class TestCompare:
    ARGV = ["compare", "--input", "pitprops", "--methods", "st,spcart,pca,rsvd-gp", "--trunc", "sp",
            "--lambdas", "9,7", "--r", "6", "--format", "jsonl"]

    def test_sweep_cells(self):
        cells = sweep_cells(_config(self.ARGV))
        assert (Method.PCA, None) in cells
        assert len(cells) == 7

    def test_rows_sorted(self, output_dir):
        assert main(self.ARGV) == 0
        rows = _jsonl(output_dir / "compare_pitprops.jsonl")
        keys = [(row["method"], row["lam"] if row["lam"] is not None else -1.0) for row in rows]
        assert keys == sorted(keys)
        assert [row["method"] for row in rows].count("pca") == 1

    @pytest.mark.parametrize("workers", ["1", "2"])
    def test_deterministic(self, output_dir, workers):
        def run(extra):
            assert main(self.ARGV + extra) == 0
            rows = _jsonl(output_dir / "compare_pitprops.jsonl")
            return [{k: v for k, v in row.items() if k != "wall_time"} for row in rows]

        assert run(["--workers", "1"]) == run(["--workers", workers])

    def test_csv_output(self, output_dir):
        argv = [a for a in self.ARGV if a not in ("--format", "jsonl")]
        assert main(argv) == 0
        frame = pd.read_csv(output_dir / "compare_pitprops.csv", dtype=str)
        assert len(frame) == 7
        assert "wall_time" in frame.columns

    def test_sparsity_sweep_without_lambda_flag(self, output_dir):
        assert main(["compare", "--input", "pitprops", "--methods", "spcart,rsvd-gp", "--trunc", "sp",
                     "--lambdas", "9,10", "--r", "6", "--format", "jsonl"]) == 0
        rows = _jsonl(output_dir / "compare_pitprops.jsonl")
        assert sorted((row["method"], row["lam"]) for row in rows) == [
            ("rsvd-gp", 9.0), ("rsvd-gp", 10.0), ("spcart", 9.0), ("spcart", 10.0)]

    def test_energy_sweep_without_lambda_flag(self, output_dir):
        assert main(["compare", "--input", "pitprops", "--methods", "spcart", "--trunc", "en",
                     "--lambdas", "0.1,0.2", "--r", "6"]) == 0


class TestBoundsAndSynth:
    def test_bounds(self, output_dir):
        assert main(["bounds", "--input", "pitprops", "--method", "spcart", "--trunc", "en", "--lambda", "0.15",
                     "--r", "6", "--trials", "50", "--format", "jsonl"]) == 0
        rows = _jsonl(output_dir / "bounds_pitprops_spcart.jsonl")
        sources = {row["source"] for row in rows}
        assert sources == {"fit", "monte-carlo"}
        names = {row["name"] for row in rows}
        assert {"ev_dmin", "sparsity", "deviation", "en.sparsity"} <= names
        mc = [row for row in rows if row["source"] == "monte-carlo"]
        assert all(row["violations"] == 0 for row in mc)

    def test_synth(self, output_dir):
        assert main(["synth", "--n", "200", "--seed", "4"]) == 0
        cov, header = read_matrix_table(output_dir / "synthetic_covariance.csv")
        assert header == [f"a{i}" for i in range(1, 11)]
        assert cov[0, 8] == pytest.approx(-87.0)
        samples, _ = read_matrix_table(output_dir / "synthetic_samples.csv")
        assert samples.shape == (200, 10)
        assert "seed=4" in (output_dir / "synthetic_samples.csv").read_text(encoding="utf-8")

    def test_synth_without_samples(self, output_dir):
        assert main(["synth"]) == 0
        assert not (output_dir / "synthetic_samples.csv").exists()
