from __future__ import annotations

import pytest

from lipsynckit.config import RunConfig, apply_overrides, dump_config, load_config


class TestRunConfig:
    def test_defaults_match_published_hyperparameters(self):
        config = RunConfig()
        assert config.keyframe_count == 14
        assert config.spacing == 12
        assert config.sigma_data == 0.5
        assert config.w_aud == 5.0
        assert config.w_id == 2.0
        assert config.audio_drop_rate == 0.2
        assert config.identity_drop_rate == 0.1
        assert config.lambda_2 == 1.0
        assert config.inference_steps == 10
        assert config.seed == 7

    def test_accessors(self):
        config = RunConfig()
        assert config.schedule().keyframe_count == 14
        assert config.edm().sigma_data == 0.5
        assert config.guidance().w_aud == 5.0
        assert config.drop_rates().audio == 0.2


class TestConfigFile:
    def test_roundtrip(self, tmp_path):
        config = RunConfig(steps=77, seed=3, w_aud=4.5)
        path = tmp_path / "run.toml"
        path.write_text(dump_config(config), encoding="utf-8")
        assert load_config(path) == config

    def test_partial_file_uses_defaults(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("steps = 9\nseed = 2\n", encoding="utf-8")
        config = load_config(path)
        assert config.steps == 9 and config.seed == 2
        assert config.keyframe_count == 14

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("stepz = 9\n", encoding="utf-8")
        with pytest.raises(ValueError, match="unknown config keys: stepz"):
            load_config(path)

    def test_non_integer_for_int_field_rejected(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("steps = 9.5\n", encoding="utf-8")
        with pytest.raises(ValueError, match="integer"):
            load_config(path)


class TestOverrides:
    def test_none_values_ignored(self):
        config = RunConfig()
        assert apply_overrides(config, steps=None, seed=None) == config

    def test_flag_wins_over_file(self):
        config = RunConfig(steps=100)
        assert apply_overrides(config, steps=25).steps == 25
