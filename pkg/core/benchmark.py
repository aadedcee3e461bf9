"""
Sharp-Feature Benchmark
Location: jetnormals/core/benchmark.py

Desk-scale training experiment: train on quadric and dihedral patches,
then compare the learned pipeline with the unweighted jet on held-out
patches centered near a crease. Errors are measured in the patch frame,
where ground truth already lives for every sample.
"""

import logging
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import pandas as pd

from evaluation.metrics import rmse, unoriented_angle_errors
from fitting.jets import ls_fit, normal_from_beta
from network.params import ModelParams
from network.pipeline import predict_local_normals
from synthetic.corpus import TrainingSample, sharp_feature_corpus
from training.trainer import TrainConfig, train

logger = logging.getLogger(__name__)

TARGET_RATIO = 0.8


@dataclass(eq=False)
class BenchmarkResult:
    learned_rmse: float
    jet_rmse: float
    trace: pd.DataFrame
    seconds: float

    @property
    def ratio(self) -> float:
        return self.learned_rmse / self.jet_rmse if self.jet_rmse > 0 else float("inf")

    @property
    def passed(self) -> bool:
        return self.ratio <= TARGET_RATIO


def jet_patch_errors(samples: Sequence[TrainingSample], order: int) -> np.ndarray:
    """Unoriented errors of the unweighted jet through every patch point"""
    estimates = np.array([normal_from_beta(ls_fit(sample.points, order)[0]) for sample in samples])
    return unoriented_angle_errors(estimates, np.array([sample.gt_normal for sample in samples]))


def learned_patch_errors(params: ModelParams, samples: Sequence[TrainingSample]) -> np.ndarray:
    estimates = predict_local_normals(params, np.stack([sample.points for sample in samples]))
    return unoriented_angle_errors(estimates, np.array([sample.gt_normal for sample in samples]))


def desk_scale_benchmark(config: TrainConfig = None, train_patches: int = 2000, test_patches: int = 500,
                         count: int = 10000) -> BenchmarkResult:
    """Train on the sharp-feature corpus and score both estimators on its held-out part"""
    config = config or TrainConfig(r=128, k=32, n=3, m=8, epochs=30)
    started = time.perf_counter()
    train_set, test_set = sharp_feature_corpus(train_patches, test_patches, r=config.r, count=count,
                                               seed=config.seed)
    result = train(config, train_set)

    learned = rmse(learned_patch_errors(result.checkpoint.params, test_set))
    baseline = rmse(jet_patch_errors(test_set, config.n))
    outcome = BenchmarkResult(learned_rmse=learned, jet_rmse=baseline, trace=result.trace,
                              seconds=time.perf_counter() - started)
    logger.info(f"Held-out sharp patches: learned RMSE {learned:.3f} deg, jet RMSE {baseline:.3f} deg "
                f"(ratio {outcome.ratio:.3f}) in {outcome.seconds:.0f} s")
    return outcome
