# polyzeta/numeric.py
"""
Evaluación en punto flotante de polyzetas convergentes: sumas anidadas
truncadas en n ≤ N (programación dinámica por bloques con numpy), corrección
de cola integral de primer orden y duplicación de N hasta que dos
estimaciones sucesivas coinciden.
"""

from __future__ import annotations

import logging
import math
from functools import lru_cache

import numpy as np
from pydantic import BaseModel, ConfigDict

from polyzeta.core import Composition, require_convergent
from polyzeta.errors import DivergentError, PolyzetaError, ToleranceUnreachable
from polyzeta.oracle import LinComb
from polyzeta.settings import get_settings

logger = logging.getLogger(__name__)


class EvalResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    tail_estimate: float
    terms_used: int
    error_estimate: float


class NestedSum:
    """
    Estado incremental de T_k(N) = Σ_{n ≤ N} n^{-s_k} · T_{k+1}(n − 1), con T_{d+1} ≡ 1.
    T_1(N) es la suma parcial de ζ(s_1, …, s_d).
    """

    def __init__(self, c: Composition, chunk: int):
        self.s = tuple(float(x) for x in c)
        self.chunk = chunk
        self.n = 0
        self._blocks: list[list[float]] = [[] for _ in self.s]
        self.carry = [0.0] * len(self.s)

    def advance_to(self, target: int) -> None:
        while self.n < target:
            hi = min(target, self.n + self.chunk)
            ns = np.arange(self.n + 1, hi + 1, dtype=np.float64)
            inner = np.ones_like(ns)
            for k in range(len(self.s) - 1, -1, -1):
                terms = np.power(ns, -self.s[k]) * inner
                running = np.cumsum(terms) + self.carry[k]
                # T_k(n − 1) alimenta el nivel exterior
                inner = np.concatenate(([self.carry[k]], running[:-1]))
                self._blocks[k].append(float(np.sum(terms)))
                self.carry[k] = math.fsum(self._blocks[k])
            self.n = hi

    @property
    def partial(self) -> float:
        return self.carry[0]

    def tail(self) -> float:
        """Aproximación integral de las regiones donde los índices exteriores superan N."""
        n = float(self.n)
        sigma = [x - 1.0 for x in self.s]
        total = []
        exponent = 0.0
        denom = 1.0
        for level in range(1, len(self.s) + 1):
            exponent += sigma[level - 1]
            denom *= exponent
            inner = self.carry[level] if level < len(self.s) else 1.0
            total.append(inner * n ** (-exponent) / denom)
        return math.fsum(total)


def _check_tol(tol: float) -> float:
    s = get_settings()
    if not tol > 0:
        raise PolyzetaError(f"tolerancia no positiva: {tol}")
    if tol < s.numeric_min_tol:
        raise PolyzetaError(f"tolerancia {tol:g} por debajo del mínimo soportado ({s.numeric_min_tol:g})")
    return float(tol)


@lru_cache(maxsize=4096)
def eval_mzv(c: Composition, tol: float | None = None) -> EvalResult:
    """
    ζ(c) ≈ suma parcial + cola integral. Duplica N hasta que dos estimaciones
    corregidas sucesivas difieren en menos de tol·agreement; tail_estimate es la
    corrección aplicada, no el error restante (ese es error_estimate).
    """
    c = c if isinstance(c, Composition) else Composition(c)
    require_convergent(c)
    s = get_settings()
    tol = _check_tol(s.default_tol if tol is None else tol)

    acc = NestedSum(c, s.numeric_chunk)
    n = s.numeric_start_terms
    acc.advance_to(n)
    tail = acc.tail()
    prev = acc.partial + tail
    while True:
        n *= 2
        if n > s.numeric_cap:
            best = EvalResult(value=prev, tail_estimate=tail, terms_used=acc.n, error_estimate=float("inf"))
            logger.warning("ζ(%s): tolerancia %g inalcanzable con N ≤ %d", c, tol, s.numeric_cap)
            raise ToleranceUnreachable(f"tolerancia {tol:g} inalcanzable para ζ({c}) con N ≤ {s.numeric_cap}", best)
        acc.advance_to(n)
        tail = acc.tail()
        estimate = acc.partial + tail
        diff = abs(estimate - prev)
        # modo estricto: además cola < tol
        if diff < tol * s.numeric_agreement and (not s.numeric_strict_tail or tail < tol):
            return EvalResult(value=estimate, tail_estimate=tail, terms_used=n, error_estimate=diff)
        prev = estimate


def eval_lincomb(x: LinComb, tol: float | None = None) -> float:
    """Σ coef · ζ(término); cada término con tolerancia tol, error agregado ≤ tol · Σ|coef|."""
    if x.is_zero():
        return 0.0
    if x.has_divergent():
        bad = x.divergent_terms()
        raise DivergentError(bad[0], f"términos divergentes en la combinación: {', '.join(str(c) for c in bad)}")
    return math.fsum(float(q) * eval_mzv(c, tol).value for c, q in x.items())


def clear_cache() -> None:
    eval_mzv.cache_clear()
