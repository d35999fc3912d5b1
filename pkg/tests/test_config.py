import json

import pytest

from splitsolve.config import RunDefaults, apply_overrides, ensure_directories, load_config
from splitsolve.exceptions import ConfigurationError


def test_builtin_defaults():
    defaults = RunDefaults()
    assert defaults.tolerance == 1e-6
    assert defaults.inner == "cholesky"
    assert defaults.grid == (0.01, 2.0, 0.01)


def test_load_config_without_file(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert load_config() == RunDefaults()


def test_load_config_from_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"inner": "cg", "max_workers": 2, "grid": [0.1, 1.0, 0.05]}))
    defaults = load_config(str(path))
    assert defaults.inner == "cg"
    assert defaults.max_workers == 2
    assert defaults.grid == (0.1, 1.0, 0.05)


@pytest.mark.parametrize("content", [
    "{not json",
    "[1, 2]",
    json.dumps({"tolerance": 2.0}),
    json.dumps({"inner": "lu"}),
    json.dumps({"grid": [0.1, 1.0]}),
    json.dumps({"unknown": 1}),
    json.dumps({"use_cache": "no"}),
])
def test_load_config_rejects_bad_files(tmp_path, content):
    path = tmp_path / "run.json"
    path.write_text(content)
    with pytest.raises(ConfigurationError):
        load_config(str(path))


def test_missing_explicit_config(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(str(tmp_path / "absent.json"))


def test_overrides_skip_none():
    defaults = apply_overrides(RunDefaults(), {"tolerance": None, "max_iterations": 10})
    assert defaults.tolerance == 1e-6
    assert defaults.max_iterations == 10


def test_ensure_directories(tmp_path):
    target = tmp_path / "a" / "b"
    ensure_directories(str(target))
    assert target.is_dir()
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(ConfigurationError):
        ensure_directories(str(blocker / "sub"))


def test_use_cache_from_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"use_cache": False}))
    assert load_config(str(path)).use_cache is False
    assert RunDefaults().use_cache is None
