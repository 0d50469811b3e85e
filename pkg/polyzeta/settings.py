# polyzeta/settings.py
from functools import lru_cache
from pathlib import Path
import os

from pydantic_settings import BaseSettings, SettingsConfigDict


def _first(*keys: str) -> str | None:
    """Devuelve el primer valor no vacío encontrado en el entorno."""
    for k in keys:
        v = os.getenv(k)
        if v is not None and str(v).strip() != "":
            return v.strip()
    return None


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", env_prefix="POLYZETA_", extra="ignore")

    # Datos (caché de relaciones, exportaciones CSV)
    data_dir: Path = Path("data")

    # Barridos exhaustivos (reconcile, verify)
    max_weight: int = 12

    # Evaluador numérico
    numeric_cap: int = 10_000_000        # N máximo antes de "tolerancia inalcanzable"
    numeric_start_terms: int = 1024
    numeric_chunk: int = 1 << 16         # tamaño de bloque de las sumas anidadas
    numeric_agreement: float = 0.1       # estimaciones sucesivas deben diferir < tol·agreement
    numeric_min_tol: float = 1e-9
    numeric_strict_tail: bool = False    # además exige cola < tol para detenerse
    default_tol: float = 1e-6

    # Memo de productos (stuffle / shuffle)
    memo_size: int = 1 << 16

    log_level: str = "INFO"


@lru_cache
def get_settings() -> Settings:
    s = Settings()

    # ====== Aliases/fallbacks por compatibilidad ======
    # Directorio de datos (acepta POLYZETA_DATA_DIR o MZV_DATA_DIR)
    if _first("POLYZETA_DATA_DIR") is None:
        alias = _first("MZV_DATA_DIR")
        if alias:
            s.data_dir = Path(alias)

    s.log_level = (s.log_level or "INFO").upper()
    return s
