# tests/conftest.py
import pytest

from polyzeta.numeric import clear_cache
from polyzeta.settings import get_settings


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    """Configuración limpia con un directorio de datos temporal por prueba."""
    monkeypatch.setenv("POLYZETA_DATA_DIR", str(tmp_path / "data"))
    monkeypatch.delenv("MZV_DATA_DIR", raising=False)
    get_settings.cache_clear()
    yield get_settings()
    get_settings.cache_clear()


@pytest.fixture
def small_cap(monkeypatch):
    """Tope de términos bajo para forzar ToleranceUnreachable."""
    monkeypatch.setenv("POLYZETA_NUMERIC_CAP", "4096")
    get_settings.cache_clear()
    clear_cache()
    yield get_settings()
    clear_cache()


@pytest.fixture
def strict_tail(monkeypatch):
    """Detención que además exige cola integral < tol, con tope bajo."""
    monkeypatch.setenv("POLYZETA_NUMERIC_STRICT_TAIL", "true")
    monkeypatch.setenv("POLYZETA_NUMERIC_CAP", "4096")
    get_settings.cache_clear()
    clear_cache()
    yield get_settings()
    clear_cache()
