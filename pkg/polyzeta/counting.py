# polyzeta/counting.py
"""
Fórmulas cerradas de conteo: totales por peso, por (w, d, h), por colocación
fija de los unos, por (w, d); dimensión de Hoffman δ_w; y los conteos de las
seis familias del producto shuffle con ζ(2).
"""

from __future__ import annotations

from functools import lru_cache
from math import comb
from typing import Sequence

from pydantic import BaseModel

from polyzeta.core import ABForm, Composition
from polyzeta.errors import PolyzetaError
from polyzeta.ordering import enumerate_weight


class CountReport(BaseModel):
    weight: int
    table: dict[str, int]          # "d,h" -> n(w,d,h)
    depth_totals: dict[int, int]   # d -> n(w,d)
    total: int


class FamilyCounts(BaseModel):
    n_i_j: int
    n_j1_j2: int
    n_jj: int
    n_ii: int
    n_i1_i2: int
    n_j_i: int
    total: int


def _require_weight(w: int) -> None:
    if w < 2:
        raise PolyzetaError(f"peso {w} < 2")


def n_total(w: int) -> int:
    _require_weight(w)
    return 1 << (w - 2)


def n_fixed_ones(w: int, d: int, h: int, b: Sequence[int]) -> int:
    """Polyzetas de firma (w, d, h) cuyos unos siguen la colocación b."""
    b = tuple(b)
    if h < 1 or len(b) != h or any(x < 0 for x in b) or sum(b) != d - h or w - d - 1 < h - 1:
        raise PolyzetaError(f"datos inconsistentes: w={w}, d={d}, h={h}, b={b}")
    return comb(w - d - 1, h - 1)


def n_wdh(w: int, d: int, h: int) -> int:
    if not (1 <= h <= d <= w - 1):
        return 0
    if w - d - 1 < h - 1:
        return 0
    return comb(d - 1, d - h) * comb(w - d - 1, h - 1)


def _heights(w: int, d: int) -> range:
    return range(1, min(d, w - d) + 1)


def n_wd(w: int, d: int) -> int:
    return sum(n_wdh(w, d, h) for h in _heights(w, d))


@lru_cache(maxsize=None)
def hoffman_dim(w: int) -> int:
    _require_weight(w)
    if w <= 4:
        return 1
    return hoffman_dim(w - 2) + hoffman_dim(w - 3)


def hoffman_compositions(w: int) -> tuple[Composition, ...]:
    """Composiciones de w con entradas en {2, 3}, en orden ≺."""
    return tuple(c for c in enumerate_weight(w) if all(x in (2, 3) for x in c))


def count_report(w: int, depth: int | None = None, height: int | None = None) -> CountReport:
    _require_weight(w)
    depths = [depth] if depth is not None else list(range(1, w))
    table: dict[str, int] = {}
    totals: dict[int, int] = {}
    for d in depths:
        hs = [height] if height is not None else list(_heights(w, d))
        row = 0
        for h in hs:
            n = n_wdh(w, d, h)
            table[f"{d},{h}"] = n
            row += n
        totals[d] = row
    return CountReport(weight=w, table=table, depth_totals=totals, total=sum(totals.values()))


def format_count_table(w: int) -> str:
    """Una línea por profundidad: productos binomiales y su suma, luego el total."""
    lines = [f"w={w}"]
    for d in range(1, w):
        products = [
            (comb(d - 1, d - h), comb(w - d - 1, h - 1))
            for h in _heights(w, d)
        ]
        if 2 * d > w:
            # pasada la mitad, la fila d se escribe como la fila w − d
            products = [(y, x) for x, y in products]
        if len(products) == 1 and products[0] == (1, 1):
            expr = "1"
        else:
            expr = "+".join(f"{x}·{y}" for x, y in products)
        lines.append(f"  d={d}: {expr} = {n_wd(w, d)}")
    lines.append(f"  total = {n_total(w)}")
    return "\n".join(lines)


# ----------------------------
# Conteo de las seis familias de 01 ⧢ z
# ----------------------------

def family_term_counts(f: ABForm) -> FamilyCounts:
    a, b = f.a, f.b
    h = len(f)
    n_i_j = sum(a[i] * (b[j] + 2) for i in range(h) for j in range(i, h))
    n_j1_j2 = sum(b[j1] * (b[j2] + 2) for j1 in range(h) for j2 in range(j1 + 1, h))
    n_jj = sum((bj + 2) * (bj + 1) // 2 for bj in b)
    n_ii = 1 + sum(ai * (ai - 1) // 2 - 1 for ai in a)
    n_i1_i2 = sum(a[i1] * (a[i2] - 2) for i1 in range(h) for i2 in range(i1 + 1, h))
    n_j_i = sum(b[j] * (a[i] - 2) for j in range(h) for i in range(j + 1, h))
    total = n_i_j + n_j1_j2 + n_jj + n_ii + n_i1_i2 + n_j_i
    return FamilyCounts(
        n_i_j=n_i_j, n_j1_j2=n_j1_j2, n_jj=n_jj, n_ii=n_ii,
        n_i1_i2=n_i1_i2, n_j_i=n_j_i, total=total,
    )
