import pytest
import yaml

from epspy import settings as settings_module
from epspy.config import DEFAULT_SEED, REPLICATIONS
from epspy.errors import ConfigError
from epspy.settings import get_default_settings, load_experiment_settings, save_default_settings


@pytest.fixture(autouse=True)
def _clear_seed_env(monkeypatch):
    monkeypatch.delenv("EPSPY_SEED", raising=False)


def test_defaults():
    settings = get_default_settings()
    assert settings["seed"] == DEFAULT_SEED
    assert settings["replications"] == REPLICATIONS
    assert settings["thetas"] == [0.0, 1.0, 10.0]


def test_env_seed(monkeypatch):
    monkeypatch.setenv("EPSPY_SEED", "42")
    assert get_default_settings()["seed"] == 42
    monkeypatch.setenv("EPSPY_SEED", "forty-two")
    with pytest.raises(ConfigError):
        get_default_settings()


def test_file_overrides_defaults(tmp_path):
    path = tmp_path / "settings.yaml"
    path.write_text("replications: 200\nthetas: [1.0]\n")
    settings = load_experiment_settings(path, verbose=False)
    assert settings["replications"] == 200
    assert settings["thetas"] == [1.0]
    assert settings["alpha"] == 0.5


def test_file_seed_beats_env(tmp_path, monkeypatch):
    monkeypatch.setenv("EPSPY_SEED", "42")
    path = tmp_path / "settings.yaml"
    path.write_text("seed: 7\n")
    assert load_experiment_settings(path, verbose=False)["seed"] == 7


def test_json_settings_parse(tmp_path):
    path = tmp_path / "settings.json"
    path.write_text('{"alpha": 0.25, "epsilons": [0.05]}')
    settings = load_experiment_settings(path, verbose=False)
    assert settings["alpha"] == 0.25
    assert settings["epsilons"] == [0.05]


def test_missing_file_falls_back(tmp_path, capsys):
    settings = load_experiment_settings(tmp_path / "absent.yaml")
    assert settings == get_default_settings()
    assert "Using default settings" in capsys.readouterr().out


def test_strict_mode_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_experiment_settings(tmp_path / "absent.yaml", strict=True)

    broken = tmp_path / "broken.yaml"
    broken.write_text("alpha: [0.5\n")
    with pytest.raises(ConfigError):
        load_experiment_settings(broken, strict=True)
    assert load_experiment_settings(broken, verbose=False) == get_default_settings()

    scalar = tmp_path / "scalar.yaml"
    scalar.write_text("just a string\n")
    with pytest.raises(ConfigError):
        load_experiment_settings(scalar, strict=True)


def test_saved_template_loads_back(tmp_path):
    path = tmp_path / "experiment_settings.yaml"
    save_default_settings(path)
    loaded = yaml.safe_load(path.read_text())
    expected = get_default_settings()
    del expected["seed"]
    assert loaded == expected
    assert load_experiment_settings(path, verbose=False) == get_default_settings()


def test_settings_command_writes_template_and_echoes(tmp_path, monkeypatch, capsys):
    path = tmp_path / "experiment_settings.yaml"
    monkeypatch.setattr(settings_module, "SETTINGS_FILE", path)
    settings_module.main()
    assert path.exists()
    out = capsys.readouterr().out
    assert "Effective experiment settings:" in out
    echoed = yaml.safe_load(out.split("Effective experiment settings:", 1)[1])
    assert echoed["replications"] == REPLICATIONS
    assert echoed["seed"] == DEFAULT_SEED
