"""`synth`: write the synthetic model's covariance and samples."""

from pathlib import Path
from typing import List

from loguru import logger

from spcart.commands.common import output_dir
from spcart.datasets.csv_io import write_matrix_csv
from spcart.datasets.synthetic import SyntheticModel, synthetic_covariance, synthetic_samples
from spcart.models.config import RunConfig


def cmd_synth(cfg: RunConfig, run_id: str) -> List[Path]:
    """Covariance always; an n x 10 sample matrix when --n > 0."""
    model = SyntheticModel()
    names = [f"a{i + 1}" for i in range(model.p)]
    out = output_dir(cfg)
    paths = [write_matrix_csv(synthetic_covariance(model), out / "synthetic_covariance.csv", header=names,
                              comments=["three-factor synthetic model, exact covariance"])]
    if cfg.n > 0:
        samples = synthetic_samples(cfg.n, cfg.seed, model)
        paths.append(write_matrix_csv(samples, out / "synthetic_samples.csv", header=names,
                                      comments=[f"three-factor synthetic model, n={cfg.n}", f"seed={cfg.seed}"]))
    logger.info(f"[{run_id}] synth wrote {', '.join(p.name for p in paths)}")
    return paths
