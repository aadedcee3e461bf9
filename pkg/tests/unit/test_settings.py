"""
Tests for run configuration loading and validation
"""

import pytest

from config.settings import RunConfig
from utils.exceptions import ConfigurationError


def write_config(tmp_path, text):
    path = tmp_path / "run.cfg"
    path.write_text(text)
    return str(path)


class TestLoad:
    def test_defaults(self):
        config = RunConfig.load()
        assert config.patch_size == 256
        assert config.order == 3
        assert config.lr == 1e-3
        assert config.alpha1 == 1.0 and config.alpha2 == 0.1

    def test_file_values_are_typed(self, tmp_path):
        path = write_config(tmp_path, "# comment\norder = 2\nlr = 0.1\nuse_update = false\ncoeffs = 0,0,0,1,0,1\n")
        config = RunConfig.load(path)
        assert config.order == 2
        assert config.lr == 0.1
        assert config.use_update is False
        assert config.coeffs == (0.0, 0.0, 0.0, 1.0, 0.0, 1.0)

    def test_flags_override_file(self, tmp_path):
        path = write_config(tmp_path, "order = 2\nseed = 5\n")
        config = RunConfig.load(path, {"order": 4, "seed": None})
        assert config.order == 4
        assert config.seed == 5

    def test_hyphenated_keys(self, tmp_path):
        path = write_config(tmp_path, "patch-size = 64\n")
        assert RunConfig.load(path).patch_size == 64

    def test_unknown_file_key_rejected(self, tmp_path):
        path = write_config(tmp_path, "learning_rate_schedule = cosine\n")
        with pytest.raises(ConfigurationError, match="learning_rate_schedule"):
            RunConfig.load(path)

    def test_unknown_override_rejected(self):
        with pytest.raises(ConfigurationError):
            RunConfig.load(None, {"bogus": 1})

    def test_bad_value_rejected(self, tmp_path):
        path = write_config(tmp_path, "order = three\n")
        with pytest.raises(ConfigurationError, match="order"):
            RunConfig.load(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            RunConfig.load(str(tmp_path / "absent.cfg"))


class TestEffectiveK:
    def test_default_scales_with_patch_size(self):
        assert RunConfig(patch_size=256).effective_k == 50
        assert RunConfig(patch_size=512).effective_k == 100

    def test_explicit_k_wins(self):
        assert RunConfig(patch_size=256, k=64).effective_k == 64

    def test_never_below_coefficient_count(self):
        assert RunConfig(patch_size=16, order=3).effective_k == 10


class TestValidate:
    def test_estimate_requires_output_and_one_input(self):
        with pytest.raises(ConfigurationError):
            RunConfig(input=("a.xyz",)).validate_for("estimate")
        with pytest.raises(ConfigurationError):
            RunConfig(out="n.normals").validate_for("estimate")
        RunConfig(input=("a.xyz",), out="n.normals").validate_for("estimate")

    def test_learned_needs_checkpoint(self):
        with pytest.raises(ConfigurationError, match="checkpoint"):
            RunConfig(input=("a.xyz",), out="n", method="learned").validate_for("estimate")

    def test_k_above_patch_size(self):
        with pytest.raises(ConfigurationError):
            RunConfig(input=("a.xyz",), out="n", k=300, patch_size=256).validate_for("estimate")

    def test_k_below_coefficients_for_jet(self):
        with pytest.raises(ConfigurationError):
            RunConfig(input=("a.xyz",), out="n", k=5, order=3, patch_size=5).validate_for("estimate")

    def test_pca_does_not_need_jet_coefficients(self):
        RunConfig(input=("a.xyz",), out="n", method="pca", patch_size=5, k=3).validate_for("estimate")

    def test_order_limited(self):
        with pytest.raises(ConfigurationError):
            RunConfig(input=("a.xyz",), out="n", order=5).validate_for("estimate")

    def test_update_neighborhood_below_k(self):
        with pytest.raises(ConfigurationError):
            RunConfig(input=("a.xyz",), out="c", k=16, patch_size=32, order=2, m=16).validate_for("train")

    def test_synth_sigma_range(self):
        with pytest.raises(ConfigurationError):
            RunConfig(out="a.xyz", sigma=0.2).validate_for("synth")
        RunConfig(out="a.xyz", sigma=0.012).validate_for("synth")

    def test_synth_angle_range(self):
        with pytest.raises(ConfigurationError):
            RunConfig(out="a.xyz", shape="dihedral", angle=180.0).validate_for("synth")

    def test_negative_seed(self):
        with pytest.raises(ConfigurationError):
            RunConfig(seed=-1).validate_for("gradcheck")

    def test_eval_needs_normals(self):
        with pytest.raises(ConfigurationError, match="normals"):
            RunConfig(input=("a.xyz",), out="r.csv").validate_for("eval")

    def test_error_keeps_offending_key(self):
        with pytest.raises(ConfigurationError) as info:
            RunConfig(out="a.xyz", density="waves").validate_for("synth")
        assert info.value.key == "density"


class TestDerivedConfigs:
    def test_network_config(self):
        config = RunConfig(patch_size=64, k=32, order=2, m=4).network_config()
        assert (config.patch_size, config.k, config.order, config.m) == (64, 32, 2, 4)

    def test_train_config(self):
        config = RunConfig(patch_size=64, k=32, order=2, m=4, lr=0.1, epochs=3, seed=9).train_config()
        assert config.learning_rate == 0.1
        assert config.r == 64 and config.k == 32 and config.n == 2
        assert config.epochs == 3 and config.seed == 9
