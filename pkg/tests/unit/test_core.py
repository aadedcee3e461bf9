"""
Tests for the whole-cloud estimators, single-patch inspection and benchmark helpers
"""

import numpy as np
import pandas as pd
import pytest

from app.commands.estimate import untrained_selection_note
from core.benchmark import BenchmarkResult, TARGET_RATIO, jet_patch_errors, learned_patch_errors
from core.estimators import (
    CHUNK_SIZE, JetEstimator, LearnedEstimator, PCAEstimator, make_estimator, resolve_threads,
)
from core.fit_debug import SUFFIXES, debug_patch, export_fit_debug, summary_text
from evaluation.metrics import unoriented_angle_errors
from synthetic.corpus import make_sample
from tests.fixtures.sample_data import plane_cloud, tilted_plane_cloud, tiny_config
from training.checkpoint import Checkpoint
from utils.exceptions import InvalidInputError, UnderdeterminedSystemError


@pytest.fixture(scope="module")
def tilted():
    return tilted_plane_cloud(count=1500, seed=2)


class TestThreads:
    def test_zero_means_all_cpus(self):
        assert resolve_threads(0) >= 1

    def test_explicit(self):
        assert resolve_threads(3) == 3

    def test_negative(self):
        with pytest.raises(InvalidInputError):
            resolve_threads(-1)


class TestPCAEstimator:
    def test_plane_normals(self, plane):
        normals = PCAEstimator(patch_size=16).estimate(plane, np.arange(50))
        np.testing.assert_allclose(np.abs(normals), np.tile([0.0, 0.0, 1.0], (50, 1)), atol=1e-12)

    def test_unit_length(self, sphere):
        normals = PCAEstimator(patch_size=32).estimate(sphere, np.arange(100))
        np.testing.assert_allclose(np.linalg.norm(normals, axis=1), 1.0)


class TestJetEstimator:
    def test_tilted_plane_is_exact(self, tilted):
        normals = JetEstimator(order=2, patch_size=32).estimate(tilted, np.arange(200))
        assert np.max(unoriented_angle_errors(normals, tilted.gt_normals[:200])) < 1e-6

    def test_thread_count_does_not_change_output(self, tilted):
        indices = np.arange(2 * CHUNK_SIZE + 37)
        single = JetEstimator(order=3, patch_size=24, threads=1).estimate(tilted, indices)
        pooled = JetEstimator(order=3, patch_size=24, threads=4).estimate(tilted, indices)
        np.testing.assert_array_equal(single, pooled)

    def test_output_follows_query_order(self, tilted):
        estimator = JetEstimator(order=2, patch_size=16)
        everything = estimator.estimate(tilted, np.arange(20))
        np.testing.assert_array_equal(estimator.estimate(tilted, [5, 2, 9]), everything[[5, 2, 9]])

    def test_empty_query(self, tilted):
        assert JetEstimator(order=2, patch_size=16).estimate(tilted, []).shape == (0, 3)

    def test_patch_larger_than_cloud(self):
        with pytest.raises(InvalidInputError):
            JetEstimator(order=1, patch_size=200).estimate(plane_cloud(count=100), [0])

    def test_index_out_of_range(self, plane):
        with pytest.raises(InvalidInputError):
            JetEstimator(order=1, patch_size=16).estimate(plane, [len(plane)])


class TestLearnedEstimator:
    def test_fresh_model_matches_jet(self, tilted):
        checkpoint = Checkpoint.fresh(tiny_config(order=3, k=64, patch_size=64))
        indices = np.arange(0, 1500, 50)
        learned = LearnedEstimator(checkpoint).estimate(tilted, indices)
        jet = JetEstimator(order=3, patch_size=64).estimate(tilted, indices)
        assert np.max(unoriented_angle_errors(learned, jet)) < 1e-6

    def test_patch_size_from_checkpoint(self):
        estimator = LearnedEstimator(Checkpoint.fresh(tiny_config(patch_size=48)))
        assert estimator.patch_size == 48

    def test_untrained_subset_selection_is_flagged(self):
        note = untrained_selection_note(Checkpoint.fresh(tiny_config()))
        assert "16 nearest of 32" in note
        assert untrained_selection_note(Checkpoint.fresh(tiny_config(k=32))) is None
        assert untrained_selection_note(Checkpoint.fresh(tiny_config(use_topk=False))) is None
        trained = Checkpoint(params=Checkpoint.fresh(tiny_config()).params, epoch=3)
        assert untrained_selection_note(trained) is None


class TestMakeEstimator:
    def test_methods(self):
        assert isinstance(make_estimator("pca", patch_size=16), PCAEstimator)
        assert isinstance(make_estimator("jet", order=2, patch_size=16), JetEstimator)
        checkpoint = Checkpoint.fresh(tiny_config())
        assert isinstance(make_estimator("learned", checkpoint=checkpoint), LearnedEstimator)

    def test_learned_needs_checkpoint(self):
        with pytest.raises(InvalidInputError):
            make_estimator("learned")

    def test_jet_patch_too_small(self):
        with pytest.raises(UnderdeterminedSystemError):
            make_estimator("jet", order=3, patch_size=9)

    def test_unknown_method(self):
        with pytest.raises(InvalidInputError):
            make_estimator("svm")


class TestFitDebug:
    def test_jet_on_plane(self, plane):
        debug = debug_patch(plane, 10, "jet", patch_size=32, order=2)
        assert debug.error_deg == pytest.approx(0.0, abs=1e-6)
        assert debug.selected.all()
        assert "method = jet" in summary_text(debug)

    def test_pca(self, plane):
        debug = debug_patch(plane, 3, "pca", patch_size=16)
        assert debug.jet.order == 1
        np.testing.assert_allclose(np.abs(debug.normal), [0.0, 0.0, 1.0], atol=1e-12)

    def test_learned_selection(self, plane):
        checkpoint = Checkpoint.fresh(tiny_config())
        debug = debug_patch(plane, 0, "learned", patch_size=999, checkpoint=checkpoint)
        assert debug.patch.size == 32
        assert int(debug.selected.sum()) == 16
        np.testing.assert_allclose(debug.weights, 0.5)

    def test_export(self, tmp_path, plane):
        debug = debug_patch(plane, 10, "jet", patch_size=32, order=2)
        paths = export_fit_debug(debug, str(tmp_path / "point10"), grid=5)
        assert sorted(p.name for p in paths.values()) == sorted(f"point10{s}" for s in SUFFIXES)
        selection = pd.read_csv(paths["selection"])
        assert list(selection.columns) == ["index", "weight", "selected"]
        assert len(selection) == 32
        assert selection["index"].iloc[0] == 10
        assert len(pd.read_csv(paths["surface"])) == 25
        assert "error_deg" in paths["summary"].read_text()

    def test_center_out_of_range(self, plane):
        with pytest.raises(InvalidInputError):
            debug_patch(plane, len(plane), "jet", patch_size=16)


class TestBenchmarkHelpers:
    def test_ratio(self):
        result = BenchmarkResult(learned_rmse=4.0, jet_rmse=8.0, trace=pd.DataFrame(), seconds=1.0)
        assert result.ratio == 0.5
        assert result.passed
        assert not BenchmarkResult(9.0, 10.0, pd.DataFrame(), 1.0).passed
        assert TARGET_RATIO == 0.8

    def test_zero_baseline(self):
        assert BenchmarkResult(1.0, 0.0, pd.DataFrame(), 0.0).ratio == float("inf")

    def test_patch_errors_on_plane(self, plane):
        samples = [make_sample(plane, center, 32) for center in range(5)]
        assert np.max(jet_patch_errors(samples, 2)) < 1e-6
        fresh = Checkpoint.fresh(tiny_config(order=2, k=32, patch_size=32)).params
        errors = learned_patch_errors(fresh, samples)
        assert errors.shape == (5,)
        assert np.max(errors) < 1e-6
