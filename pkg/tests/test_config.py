"""Config assembly: defaults, files, dotted overrides, validation."""

import json

import pytest

from spvsim.config import (
    ConfigError,
    SimConfig,
    config_from_dict,
    config_to_dict,
    load_config,
)


def test_defaults():
    cfg = load_config()
    assert cfg.implant.rows == 10 and cfg.implant.cols == 10
    assert cfg.implant.spacing_um == 400.0
    assert cfg.implant.rho_um == 200.0 and cfg.implant.lambda_um == 400.0
    assert cfg.percept.um_per_degree == 280.0
    assert (cfg.percept.width, cfg.percept.height) == (128, 128)
    assert cfg.percept.extent_deg == 14.6
    assert cfg.trial.fps == 90.0
    assert cfg.trial.duration_s == 50.0
    assert cfg.trial.gaze_window_deg == 14.6
    assert cfg.trial.cooldown_m == 0.25
    assert cfg.player.speed_m_s == 1.4
    assert cfg.strategy.kind == "Control"


def test_round_trip_through_dict():
    cfg = load_config()
    again = config_from_dict(config_to_dict(cfg))
    assert again == cfg
    assert isinstance(again, SimConfig)


def test_file_and_overrides(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"trial": {"fps": 60}, "implant": {"rows": 4}}))
    cfg = load_config(p, overrides=["implant.cols=5", "scene.layout=plaza_b"])
    assert cfg.trial.fps == 60.0
    assert cfg.implant.rows == 4 and cfg.implant.cols == 5
    assert cfg.scene.layout == "plaza_b"  # bare strings need no quoting


def test_env_var_points_at_config(tmp_path, monkeypatch):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"batch": {"seed": 42}}))
    monkeypatch.setenv("SPVSIM_CONFIG", str(p))
    assert load_config().batch.seed == 42
    monkeypatch.delenv("SPVSIM_CONFIG")
    assert load_config().batch.seed == 0


def test_override_parsing_accepts_json_values():
    cfg = load_config(overrides=[
        "implant.center_um=[100, -50]",
        "service.realtime=false",
        "batch.trials_per_strategy=3",
    ])
    assert cfg.implant.center_um == (100.0, -50.0)
    assert cfg.service.realtime is False
    assert cfg.batch.trials_per_strategy == 3


def test_unknown_field_rejected_with_dotted_path():
    with pytest.raises(ConfigError, match="implant"):
        config_from_dict({"implant": {"rowz": 4}})
    with pytest.raises(ConfigError):
        config_from_dict({"nonsense": {}})


def test_type_errors_name_the_field():
    with pytest.raises(ConfigError, match="trial.fps"):
        config_from_dict({"trial": {"fps": "fast"}})
    with pytest.raises(ConfigError, match="implant.center_um"):
        config_from_dict({"implant": {"center_um": [1, 2, 3]}})


def test_validation_rules():
    with pytest.raises(ConfigError):
        config_from_dict({"trial": {"gaze_window_deg": 80}})  # wider than fov
    with pytest.raises(ConfigError):
        config_from_dict({"implant": {"rows": 0}})
    with pytest.raises(ConfigError):
        config_from_dict({"strategy": {"kind": "Magic"}})
    with pytest.raises(ConfigError):
        config_from_dict({"trial": {"fps": -1}})
    with pytest.raises(ConfigError):
        config_from_dict({"batch": {"strategies": ["Control", "Magic"]}})


def test_missing_file_and_bad_json(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)
    arr = tmp_path / "arr.json"
    arr.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_config(arr)
