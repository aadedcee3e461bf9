"""
Command-line integration tests: every subcommand through cli_dispatch
"""

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from app.main import cli, cli_dispatch
from evaluation.metrics import unoriented_angle_errors
from storage.point_files import read_normals, read_points, read_stem_list
from synthetic.shapes import crease_distance
from tests.fixtures.sample_data import plane_cloud, sphere_cloud, write_cloud

TINY_MODEL = ["--patch-size", "32", "--k", "16", "--order", "2", "--m", "4"]


def files_in(directory):
    return sorted(p.name for p in directory.rglob("*") if p.is_file())


@pytest.fixture
def plane_xyz(tmp_path):
    return write_cloud(tmp_path, plane_cloud(), "plane")


@pytest.fixture
def sphere_xyz(tmp_path):
    return write_cloud(tmp_path, sphere_cloud(count=1200, seed=3), "sphere")


class TestSynth:
    def test_single_shape(self, tmp_path):
        out = tmp_path / "s.xyz"
        assert cli_dispatch(["synth", "--shape", "sphere", "--count", "500", "--seed", "1", "--out", str(out)]) == 0
        cloud = read_points(out)
        assert len(cloud) == 500
        np.testing.assert_allclose(np.linalg.norm(cloud.points, axis=1), 1.0)

    def test_noise_alias_and_determinism(self, tmp_path):
        args = ["synth", "--shape", "quadric", "--count", "400", "--noise", "0.006", "--density", "gradient",
                "--seed", "5"]
        assert cli_dispatch(args + ["--out", str(tmp_path / "a.xyz")]) == 0
        assert cli_dispatch(args + ["--out", str(tmp_path / "b.xyz")]) == 0
        assert (tmp_path / "a.xyz").read_bytes() == (tmp_path / "b.xyz").read_bytes()
        assert (tmp_path / "a.normals").read_bytes() == (tmp_path / "b.normals").read_bytes()
        assert len(read_points(tmp_path / "a.xyz")) < 400

    def test_corpus(self, tmp_path):
        corpus = tmp_path / "corpus"
        args = ["synth", "--corpus", str(corpus), "--train-shapes", "1", "--test-shapes", "1", "--count", "300",
                "--subset-size", "50"]
        assert cli_dispatch(args) == 0
        stems = read_stem_list(corpus / "testset.txt")
        assert len(stems) == 6
        assert all((corpus / f"{stem}.idx").is_file() for stem in stems)

    def test_sigma_out_of_range_writes_nothing(self, tmp_path):
        out = tmp_path / "s.xyz"
        assert cli_dispatch(["synth", "--shape", "sphere", "--sigma", "0.5", "--out", str(out)]) == 1
        assert files_in(tmp_path) == []

    def test_needs_an_output(self):
        assert cli_dispatch(["synth", "--shape", "sphere"]) == 1


class TestEstimate:
    def test_pca_on_plane(self, tmp_path, plane_xyz):
        out = tmp_path / "pca.normals"
        assert cli_dispatch(["estimate", "--input", str(plane_xyz), "--method", "pca", "--patch-size", "256",
                             "--out", str(out)]) == 0
        normals = read_normals(out)
        assert normals.shape == (2000, 3)
        np.testing.assert_allclose(np.abs(normals[:, 2]), 1.0, atol=1e-9)

    def test_thread_count_does_not_change_output(self, tmp_path, sphere_xyz):
        args = ["estimate", "--input", str(sphere_xyz), "--method", "jet", "--order", "2", "--patch-size", "32"]
        assert cli_dispatch(args + ["--threads", "1", "--out", str(tmp_path / "one.normals")]) == 0
        assert cli_dispatch(args + ["--threads", "3", "--out", str(tmp_path / "three.normals")]) == 0
        assert (tmp_path / "one.normals").read_bytes() == (tmp_path / "three.normals").read_bytes()

    def test_learned_without_checkpoint(self, tmp_path, plane_xyz):
        out = tmp_path / "x.normals"
        assert cli_dispatch(["estimate", "--input", str(plane_xyz), "--method", "learned", "--out", str(out)]) == 1
        assert not out.exists()

    def test_patch_larger_than_cloud(self, tmp_path):
        small = write_cloud(tmp_path, plane_cloud(count=50), "small")
        out = tmp_path / "x.normals"
        assert cli_dispatch(["estimate", "--input", str(small), "--method", "pca", "--patch-size", "64",
                             "--out", str(out)]) == 1
        assert not out.exists()

    def test_config_file(self, tmp_path, plane_xyz):
        config = tmp_path / "run.conf"
        config.write_text("# estimator settings\nmethod = pca\npatch_size = 16\n")
        out = tmp_path / "conf.normals"
        assert cli_dispatch(["estimate", "--config", str(config), "--input", str(plane_xyz), "--out", str(out)]) == 0
        np.testing.assert_allclose(np.abs(read_normals(out)[:, 2]), 1.0, atol=1e-9)

    def test_unknown_config_key(self, tmp_path, plane_xyz):
        config = tmp_path / "run.conf"
        config.write_text("flavour = vanilla\n")
        out = tmp_path / "conf.normals"
        assert cli_dispatch(["estimate", "--config", str(config), "--input", str(plane_xyz), "--out", str(out)]) == 1
        assert not out.exists()


class TestUsageErrors:
    def test_unknown_subcommand(self):
        assert cli_dispatch(["reconstruct"]) == 2

    def test_unknown_flag(self, tmp_path, plane_xyz):
        before = files_in(tmp_path)
        assert cli_dispatch(["estimate", "--input", str(plane_xyz), "--colour", "red",
                             "--out", str(tmp_path / "x.normals")]) == 2
        assert files_in(tmp_path) == before

    def test_bad_choice(self, tmp_path, plane_xyz):
        assert cli_dispatch(["estimate", "--input", str(plane_xyz), "--method", "svm",
                             "--out", str(tmp_path / "x.normals")]) == 2
        assert not (tmp_path / "x.normals").exists()

    def test_missing_input_names_the_field(self, tmp_path):
        result = CliRunner().invoke(cli, ["estimate", "--method", "pca", "--out", str(tmp_path / "x.normals")],
                                    standalone_mode=False)
        assert result.exception is not None
        assert "input" in str(result.exception)

    def test_help(self):
        result = CliRunner().invoke(cli, ["--help"])
        assert result.exit_code == 0
        for command in ("synth", "estimate", "train", "eval", "fit-debug", "gradcheck"):
            assert command in result.output


class TestInvalidFlagsWriteNothing:
    @pytest.mark.parametrize("args, status", [
        (["synth", "--shape", "quadric", "--count", "0", "--out", "{out}/s.xyz"], 1),
        (["synth", "--corpus", "{out}/corpus", "--test-shapes", "0"], 1),
        (["estimate", "--input", "{xyz}", "--method", "jet", "--order", "3", "--patch-size", "5",
          "--out", "{out}/p.normals"], 1),
        (["estimate", "--input", "{xyz}", "--method", "svm", "--out", "{out}/p.normals"], 2),
        (["train", "--input", "{xyz}", "--epochs", "1", "--k", "64", "--patch-size", "32",
          "--out", "{out}/m.ckpt"], 1),
        (["train", "--input", "{xyz}", "--lr", "0", "--out", "{out}/m.ckpt"], 1),
        (["eval", "--input", "{xyz}", "--normals", "{out}", "--subset-size", "0", "--out", "{out}/r.csv"], 1),
        (["fit-debug", "--input", "{xyz}", "--order", "9", "--out", "{out}/point"], 1),
        (["gradcheck", "--tolerance", "-1", "--out", "{out}/g.csv"], 1),
    ])
    def test_no_partial_output(self, tmp_path, plane_xyz, args, status):
        out = tmp_path / "out"
        before = files_in(tmp_path)
        argv = [arg.format(out=out, xyz=plane_xyz) for arg in args]
        assert cli_dispatch(argv) == status
        assert files_in(tmp_path) == before
        assert not out.exists() or files_in(out) == []


class TestEval:
    def test_ground_truth_scores_zero(self, tmp_path, sphere_xyz):
        report = tmp_path / "report.csv"
        assert cli_dispatch(["eval", "--input", str(sphere_xyz), "--normals", str(sphere_xyz.with_suffix(".normals")),
                             "--out", str(report)]) == 0
        frame = pd.read_csv(report)
        assert frame["rmse"].iloc[0] == pytest.approx(0.0, abs=1e-6)
        assert frame["pgp5"].iloc[0] == 100.0
        table = pd.read_csv(tmp_path / "report.table.csv")
        assert table["category"].tolist() == ["none", "Average"]

    def test_explicit_subset_and_heatmap(self, tmp_path, sphere_xyz):
        (tmp_path / "subset.txt").write_text("0\n5\n7\n")
        heatmap = tmp_path / "heat"
        assert cli_dispatch(["eval", "--input", str(sphere_xyz), "--normals", str(sphere_xyz.with_suffix(".normals")),
                             "--idx", str(tmp_path / "subset.txt"), "--heatmap", str(heatmap),
                             "--heatmap-format", "ply", "--out", str(tmp_path / "report.csv")]) == 0
        assert pd.read_csv(tmp_path / "report.csv")["points"].iloc[0] == 3
        assert (tmp_path / "heat.ply").read_text().startswith("ply\n")

    def test_sibling_subset_is_used(self, tmp_path, sphere_xyz):
        (tmp_path / "sphere.idx").write_text("1\n2\n")
        assert cli_dispatch(["eval", "--input", str(sphere_xyz), "--normals", str(sphere_xyz.with_suffix(".normals")),
                             "--out", str(tmp_path / "report.csv")]) == 0
        assert pd.read_csv(tmp_path / "report.csv")["points"].iloc[0] == 2

    def test_missing_ground_truth(self, tmp_path):
        bare = write_cloud(tmp_path, plane_cloud(count=100), "bare", with_normals=False)
        estimates = tmp_path / "est.normals"
        estimates.write_text("0 0 1\n" * 100)
        assert cli_dispatch(["eval", "--input", str(bare), "--normals", str(estimates),
                             "--out", str(tmp_path / "report.csv")]) == 1
        assert not (tmp_path / "report.csv").exists()


class TestTrainAndLearnedEstimate:
    def test_untrained_checkpoint_matches_jet(self, tmp_path, sphere_xyz):
        checkpoint = tmp_path / "fresh.ckpt"
        assert cli_dispatch(["train", "--input", str(sphere_xyz), "--epochs", "0", "--k", "64", "--patch-size", "64",
                             "--order", "3", "--patches-per-shape", "4", "--out", str(checkpoint)]) == 0
        assert (tmp_path / "fresh.trace.csv").read_text() == "epoch,mean_loss\n"

        assert cli_dispatch(["estimate", "--input", str(sphere_xyz), "--method", "learned", "--checkpoint",
                             str(checkpoint), "--out", str(tmp_path / "learned.normals")]) == 0
        assert cli_dispatch(["estimate", "--input", str(sphere_xyz), "--method", "jet", "--order", "3",
                             "--patch-size", "64", "--out", str(tmp_path / "jet.normals")]) == 0
        learned = read_normals(tmp_path / "learned.normals")
        jet = read_normals(tmp_path / "jet.normals")
        assert np.max(unoriented_angle_errors(learned, jet)) < 1e-6

    def test_training_is_deterministic(self, tmp_path, sphere_xyz):
        args = ["train", "--input", str(sphere_xyz), "--epochs", "1", "--batch-size", "4",
                "--patches-per-shape", "8", "--seed", "2"] + TINY_MODEL
        assert cli_dispatch(args + ["--out", str(tmp_path / "a.ckpt")]) == 0
        assert cli_dispatch(args + ["--out", str(tmp_path / "b.ckpt")]) == 0
        assert (tmp_path / "a.ckpt").read_bytes() == (tmp_path / "b.ckpt").read_bytes()
        trace = pd.read_csv(tmp_path / "a.trace.csv")
        assert trace["epoch"].tolist() == [1]

    def test_resume_from_checkpoint(self, tmp_path, sphere_xyz):
        args = ["train", "--input", str(sphere_xyz), "--epochs", "1", "--batch-size", "4",
                "--patches-per-shape", "8"] + TINY_MODEL
        assert cli_dispatch(args + ["--out", str(tmp_path / "first.ckpt")]) == 0
        assert cli_dispatch(args + ["--checkpoint", str(tmp_path / "first.ckpt"),
                                    "--out", str(tmp_path / "second.ckpt")]) == 0
        assert pd.read_csv(tmp_path / "second.trace.csv")["epoch"].tolist() == [2]

    def test_shape_list(self, tmp_path, sphere_xyz):
        (tmp_path / "trainset.txt").write_text("sphere\n")
        assert cli_dispatch(["train", "--shapes", str(tmp_path / "trainset.txt"), "--epochs", "1",
                             "--patches-per-shape", "4", "--out", str(tmp_path / "m.ckpt")] + TINY_MODEL) == 0

    def test_training_needs_ground_truth(self, tmp_path):
        bare = write_cloud(tmp_path, plane_cloud(count=200), "bare", with_normals=False)
        assert cli_dispatch(["train", "--input", str(bare), "--epochs", "1",
                             "--out", str(tmp_path / "m.ckpt")] + TINY_MODEL) == 1
        assert not (tmp_path / "m.ckpt").exists()

    def test_missing_checkpoint_file(self, tmp_path, plane_xyz):
        assert cli_dispatch(["estimate", "--input", str(plane_xyz), "--method", "learned", "--checkpoint",
                             str(tmp_path / "absent.ckpt"), "--out", str(tmp_path / "x.normals")]) == 1


class TestFitDebug:
    def test_crease_errors_concentrate_at_the_crease(self, tmp_path):
        cloud_path = tmp_path / "dihedral.xyz"
        assert cli_dispatch(["synth", "--shape", "dihedral", "--angle", "90", "--noise", "0", "--count", "3000",
                             "--out", str(cloud_path)]) == 0
        assert cli_dispatch(["estimate", "--input", str(cloud_path), "--method", "jet", "--order", "3",
                             "--patch-size", "64", "--out", str(tmp_path / "jet.normals")]) == 0
        cloud = read_points(cloud_path)
        errors = unoriented_angle_errors(read_normals(tmp_path / "jet.normals"), cloud.gt_normals)
        distance = crease_distance(cloud.points)
        assert errors.max() > 0.0
        assert errors[distance < 0.05].mean() > 10 * max(errors[distance > 0.4].mean(), 1e-6)

        center = int(np.argmin(distance))
        prefix = tmp_path / "crease"
        assert cli_dispatch(["fit-debug", "--input", str(cloud_path), "--center", str(center), "--method", "jet",
                             "--order", "3", "--patch-size", "64", "--grid", "8", "--out", str(prefix)]) == 0
        summary = (tmp_path / "crease_summary.txt").read_text()
        assert f"center = {center}" in summary
        assert len(pd.read_csv(tmp_path / "crease_surface.csv")) == 64
        assert len(pd.read_csv(tmp_path / "crease_selection.csv")) == 64

    def test_center_out_of_range(self, tmp_path, plane_xyz):
        assert cli_dispatch(["fit-debug", "--input", str(plane_xyz), "--center", "5000", "--method", "pca",
                             "--patch-size", "16", "--out", str(tmp_path / "p")]) == 1
        assert not (tmp_path / "p_summary.txt").exists()


class TestGradcheck:
    def test_random_model_passes(self, tmp_path):
        out = tmp_path / "grad.csv"
        assert cli_dispatch(["gradcheck", "--samples", "2", "--out", str(out)] + TINY_MODEL) == 0
        frame = pd.read_csv(out)
        assert list(frame.columns) == ["sample", "array", "relative_error", "step"]
        assert frame["relative_error"].max() <= 1e-4

    def test_impossible_tolerance_fails(self):
        assert cli_dispatch(["gradcheck", "--samples", "1", "--tolerance", "1e-300"] + TINY_MODEL) == 1

    def test_patches_from_input(self, sphere_xyz):
        assert cli_dispatch(["gradcheck", "--samples", "1", "--input", str(sphere_xyz)] + TINY_MODEL) == 0
