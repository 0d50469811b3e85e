# polyzeta/errors.py
"""
Jerarquía de errores del paquete.

- PolyzetaError y subclases: entradas inválidas (la CLI responde con código 2).
- InconsistencyError: violación de contrato interno (código 3).
- ToleranceUnreachable: el evaluador numérico llegó al tope de términos.
"""

from __future__ import annotations

from typing import Any


class PolyzetaError(ValueError):
    """Error base para entradas fuera de contrato."""


class ParseError(PolyzetaError):
    def __init__(self, message: str, token: str | None = None):
        super().__init__(message)
        self.token = token


class DivergentError(PolyzetaError):
    def __init__(self, composition: Any, message: str | None = None):
        super().__init__(message or f"entrada inicial 1: {composition} no es convergente")
        self.composition = composition


class WeightMismatchError(PolyzetaError):
    """Solo se comparan polyzetas del mismo peso."""


class NotAdmissibleError(PolyzetaError):
    def __init__(self, word: str):
        super().__init__(f"palabra no admisible (debe empezar en 0 y terminar en 1): {word!r}")
        self.word = word


class InconsistencyError(RuntimeError):
    """Fallo de consistencia interna (p. ej. un término divergente que no se canceló)."""


class ToleranceUnreachable(RuntimeError):
    def __init__(self, message: str, result: Any = None):
        super().__init__(message)
        self.result = result
