# polyzeta/ordering.py
"""
Orden total ≺ entre polyzetas convergentes de un mismo peso:
profundidad, luego altura, luego orden lexicográfico inverso (decreciente) sobre
los exponentes b, y por último lexicográfico (decreciente) sobre las entradas a.
"""

from __future__ import annotations

from enum import IntEnum
from functools import lru_cache
from typing import NamedTuple

from polyzeta.core import Composition, peel_word, require_convergent, to_ab
from polyzeta.errors import PolyzetaError, WeightMismatchError


class Order(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


class OrderKey(NamedTuple):
    depth: int
    height: int
    b: tuple[int, ...]
    a: tuple[int, ...]


def order_key(c: Composition) -> OrderKey:
    f = to_ab(c)
    return OrderKey(c.depth, f.height, f.b, f.a)


def sort_key(c: Composition) -> tuple:
    """Tupla creciente en ≺: b mayor en revlex y a mayor en lex van primero."""
    k = order_key(c)
    return (k.depth, k.height, tuple(-x for x in reversed(k.b)), tuple(-x for x in k.a))


def compare(c1: Composition, c2: Composition) -> Order:
    require_convergent(c1)
    require_convergent(c2)
    if c1.weight != c2.weight:
        raise WeightMismatchError(
            f"solo se comparan polyzetas del mismo peso: {c1} (w={c1.weight}) vs {c2} (w={c2.weight})"
        )
    k1, k2 = sort_key(c1), sort_key(c2)
    if k1 < k2:
        return Order.LESS
    if k1 > k2:
        return Order.GREATER
    return Order.EQUAL


@lru_cache(maxsize=32)
def enumerate_weight(w: int) -> tuple[Composition, ...]:
    """Las 2^(w−2) composiciones convergentes de peso w, en orden ≺."""
    if w < 2:
        raise PolyzetaError(f"peso {w} < 2: no hay polyzetas convergentes")
    inner = w - 2
    words = ("0" + format(mask, f"0{inner}b") + "1" if inner else "01" for mask in range(1 << inner))
    return tuple(sorted((peel_word(v) for v in words), key=sort_key))


@lru_cache(maxsize=32)
def _index_table(w: int) -> dict[Composition, int]:
    return {c: i for i, c in enumerate(enumerate_weight(w))}


def index_of(c: Composition) -> int:
    require_convergent(c)
    return _index_table(c.weight)[c]


def successors(c: Composition) -> tuple[Composition, Composition]:
    """Las dos formas de subir de peso: última entrada + 1, o agregar un 1."""
    return (
        Composition._trusted(c[:-1] + (c[-1] + 1,)),
        Composition._trusted(tuple(c) + (1,)),
    )
