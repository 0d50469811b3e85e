# tests/test_settings.py
from pathlib import Path

from polyzeta.settings import get_settings


def test_defaults(isolated_settings):
    assert isolated_settings.max_weight == 12
    assert isolated_settings.numeric_cap == 10_000_000
    assert isolated_settings.log_level == "INFO"


def test_data_dir_alias(monkeypatch):
    monkeypatch.delenv("POLYZETA_DATA_DIR", raising=False)
    monkeypatch.setenv("MZV_DATA_DIR", "/tmp/mzv")
    get_settings.cache_clear()
    assert get_settings().data_dir == Path("/tmp/mzv")


def test_prefixed_variable_wins(monkeypatch):
    monkeypatch.setenv("POLYZETA_DATA_DIR", "/tmp/own")
    monkeypatch.setenv("MZV_DATA_DIR", "/tmp/mzv")
    get_settings.cache_clear()
    assert get_settings().data_dir == Path("/tmp/own")


def test_log_level_is_upper(monkeypatch):
    monkeypatch.setenv("POLYZETA_LOG_LEVEL", "debug")
    get_settings.cache_clear()
    assert get_settings().log_level == "DEBUG"
