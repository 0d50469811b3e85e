# polyzeta/closedforms.py
"""
Fórmulas cerradas (no recursivas) de los productos stuffle / shuffle de
ζ(1), ζ(2), ζ(3), ζ(2,1) con un polyzeta convergente (a_1, 1^{b_1}, …, a_h, 1^{b_h}),
y el arnés de conciliación contra el oráculo.

Cada familia de sumación es una sub-operación con nombre y con su
desplazamiento de firma (δd, δh): todo término emitido tiene firma
(w, d + δd, h + δh).

Para ζ(3) ⧢ z y para ambos productos con ζ(2,1) los enunciados cerrados
están incompletos; la versión entregada añade la familia "oracle-completion"
(diferencia exacta contra el oráculo) y el reporte la documenta.
"""

from __future__ import annotations

import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Iterable, Iterator, Sequence

from pydantic import BaseModel

from polyzeta import oracle
from polyzeta.core import ABForm, Composition, format_composition, from_ab, require_convergent, to_ab
from polyzeta.errors import InconsistencyError, PolyzetaError
from polyzeta.oracle import LinComb
from polyzeta.ordering import enumerate_weight
from polyzeta.settings import get_settings

logger = logging.getLogger(__name__)

# ================== ETIQUETAS ==================

LEFT_FACTORS: dict[str, Composition] = {
    "1": Composition((1,)),
    "2": Composition((2,)),
    "3": Composition((3,)),
    "21": Composition((2, 1)),
}


class Side(str, Enum):
    STUFFLE = "stuffle"
    SHUFFLE = "shuffle"
    DSR = "dsr"


@dataclass(frozen=True)
class FamilyTag:
    g: str
    side: Side

    @property
    def left(self) -> Composition:
        return LEFT_FACTORS[self.g]

    def __str__(self) -> str:
        return f"g=({format_composition(self.left, compress=False)}) {self.side.value}"


FAMILY_TAGS: tuple[FamilyTag, ...] = tuple(FamilyTag(g, s) for g in LEFT_FACTORS for s in Side)

# Productos cuyo enunciado cerrado se completa contra el oráculo.
COMPLETED: frozenset[tuple[str, Side]] = frozenset(
    {("3", Side.SHUFFLE), ("21", Side.STUFFLE), ("21", Side.SHUFFLE)}
)

COMPLETION = "oracle-completion"


def left_key(g: str | Iterable[int]) -> str:
    """Acepta "21", (2,1) o Composition((2,1)) y devuelve la clave canónica."""
    if isinstance(g, str):
        key = g.strip().replace(",", "").strip("()")
    else:
        key = "".join(str(x) for x in g)
    if key not in LEFT_FACTORS:
        raise PolyzetaError(f"factor izquierdo no soportado: {g!r} (use 1, 2, 3 o 21)")
    return key


# ================== FAMILIAS ==================

Term = tuple[int, tuple[int, ...]]


@dataclass(frozen=True)
class Family:
    name: str
    shift: tuple[int, int]
    emit: Callable[[ABForm], Iterator[Term]]
    sign: int = 1
    note: str = ""


def _splits(total: int, mins: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Tuplas con len(mins) partes, parte k ≥ mins[k], que suman total."""
    if len(mins) == 1:
        if total >= mins[0]:
            yield (total,)
        return
    for first in range(mins[0], total - sum(mins[1:]) + 1):
        for rest in _splits(total - first, mins[1:]):
            yield (first,) + rest


def _b(total: int, parts: int = 2) -> Iterator[tuple[int, ...]]:
    return _splits(total, (0,) * parts)


def _a(total: int, *mins: int) -> Iterator[tuple[int, ...]]:
    return _splits(total, mins or (2, 2))


def _ones(k: int) -> tuple[int, ...]:
    return (1,) * k


def _run(parts: Sequence[int], letters: Sequence[int]) -> tuple[int, ...]:
    """1^{p_0}, L_1, 1^{p_1}, L_2, …"""
    out = list(_ones(parts[0]))
    for letter, p in zip(letters, parts[1:]):
        out.append(letter)
        out.extend(_ones(p))
    return tuple(out)


def _build(f: ABForm, heads: dict | None = None, tails: dict | None = None,
           prefix: tuple = (), suffix: tuple = ()) -> tuple[int, ...]:
    """Reemplaza a_k por heads[k] y 1^{b_k} por tails[k]."""
    heads = heads or {}
    tails = tails or {}
    out = list(prefix)
    for k, (a, b) in enumerate(f):
        out.extend(heads.get(k, (a,)))
        out.extend(tails.get(k, _ones(b)))
    out.extend(suffix)
    return tuple(out)


def _lt(h: int) -> Iterator[tuple[int, int]]:
    return itertools.combinations(range(h), 2)


def _le(h: int) -> Iterator[tuple[int, int]]:
    return ((i, j) for i in range(h) for j in range(i, h))


def _lt3(h: int) -> Iterator[tuple[int, int, int]]:
    return itertools.combinations(range(h), 3)


# ---------- bloques comunes a varios factores ----------

def _prefix(g: tuple[int, ...]) -> Callable[[ABForm], Iterator[Term]]:
    def emit(f: ABForm) -> Iterator[Term]:
        yield 1, tuple(g) + from_ab(f)
    return emit


def _suffix(g: tuple[int, ...]) -> Callable[[ABForm], Iterator[Term]]:
    def emit(f: ABForm) -> Iterator[Term]:
        yield 1, tuple(from_ab(f)) + tuple(g)
    return emit


def _raise_a(k: int) -> Callable[[ABForm], Iterator[Term]]:
    def emit(f: ABForm) -> Iterator[Term]:
        for i, (a, _) in enumerate(f):
            yield 1, _build(f, heads={i: (a + k,)})
    return emit


def _one_becomes(letter: int) -> Callable[[ABForm], Iterator[Term]]:
    """Un 1 del bloque j pasa a `letter`: (…, 1^{b'}, letter, 1^{b''}, …), b'+b'' = b_j − 1."""
    def emit(f: ABForm) -> Iterator[Term]:
        for j, (_, b) in enumerate(f):
            for p in _b(b - 1):
                yield 1, _build(f, tails={j: _run(p, (letter,))})
    return emit


def _insert_in_run(letter: int, weight_by_tail: bool) -> Callable[[ABForm], Iterator[Term]]:
    """Se inserta `letter` dentro de 1^{b_j}: b'+b'' = b_j, coeficiente 1 o b''+1."""
    def emit(f: ABForm) -> Iterator[Term]:
        for j, (_, b) in enumerate(f):
            for p in _b(b):
                yield (p[1] + 1 if weight_by_tail else 1), _build(f, tails={j: _run(p, (letter,))})
    return emit


def _grow_runs(coef: Callable[[int], int]) -> Callable[[ABForm], Iterator[Term]]:
    def emit(f: ABForm) -> Iterator[Term]:
        for j, (_, b) in enumerate(f):
            c = coef(b)
            if c:
                yield c, _build(f, tails={j: _ones(b + 1)})
    return emit


def _split_a(extra: int, mins: tuple[int, int], coef: Callable[[int], int]) -> Callable[[ABForm], Iterator[Term]]:
    """a_i se parte en a', a'' con a'+a'' = a_i + extra."""
    def emit(f: ABForm) -> Iterator[Term]:
        for i, (a, _) in enumerate(f):
            for a1, a2 in _a(a + extra, *mins):
                c = coef(a1)
                if c:
                    yield c, _build(f, heads={i: (a1, a2)})
    return emit


def _negated(fams: Iterable[Family], label: str = "") -> tuple[Family, ...]:
    return tuple(replace(fam, name=label + fam.name, sign=-fam.sign) for fam in fams)


def _labelled(fams: Iterable[Family], label: str) -> tuple[Family, ...]:
    return tuple(replace(fam, name=label + fam.name) for fam in fams)


# ================== ζ(1) ==================

STUFFLE_1 = (
    Family("a_i+1", (0, 0), _raise_a(1)),
    Family("1->2", (0, 1), _one_becomes(2)),
    Family("(1,z)", (1, 0), _prefix((1,))),
    Family("(b_j+1)·1^{b_j+1}", (1, 0), _grow_runs(lambda b: b + 1)),
)

SHUFFLE_1 = (
    Family("(b_j+2)·1^{b_j+1}", (1, 0), _grow_runs(lambda b: b + 2)),
    Family("(1,z)", (1, 0), _prefix((1,))),
    Family("a_i',a_i''", (1, 1), _split_a(1, (2, 2), lambda a1: 1)),
)

DSR_1 = (
    Family("a_i+1", (0, 0), _raise_a(1), sign=-1),
    Family("1->2", (0, 1), _one_becomes(2), sign=-1),
    Family("1^{b_j+1}", (1, 0), _grow_runs(lambda b: 1)),
    Family("a_i',a_i''", (1, 1), _split_a(1, (2, 2), lambda a1: 1)),
)

# ================== ζ(2) ==================

STUFFLE_2 = (
    Family("a_i+2", (0, 0), _raise_a(2)),
    Family("1->3", (0, 1), _one_becomes(3)),
    Family("(2,z)", (1, 1), _prefix((2,))),
    Family("insert 2", (1, 1), _insert_in_run(2, weight_by_tail=False)),
)


def f_i_j(f: ABForm) -> Iterator[Term]:
    """F_{i|j}: un 0 sube a_i y un 1 se aglutina en el bloque j ≥ i."""
    a, b = f.a, f.b
    for i, j in _le(len(f)):
        yield a[i] * (b[j] + 2), _build(f, heads={i: (a[i] + 1,)}, tails={j: _ones(b[j] + 1)})


def f_j1_j2(f: ABForm) -> Iterator[Term]:
    """F_{j1|j2}: el 0 parte el bloque de unos j1, el 1 se aglutina en j2 > j1."""
    b = f.b
    for j1, j2 in _lt(len(f)):
        for p in _b(b[j1] - 1):
            yield b[j2] + 2, _build(f, tails={j1: _run(p, (2,)), j2: _ones(b[j2] + 1)})


def f_jj(f: ABForm) -> Iterator[Term]:
    """F_{jj}: 0 y 1 caen juntos dentro del mismo bloque de unos."""
    for j, (_, b) in enumerate(f):
        for p in _b(b):
            yield p[1] + 1, _build(f, tails={j: _run(p, (2,))})


def f_ii(f: ABForm) -> Iterator[Term]:
    """F_{ii}: (2, z) más la partición de a_i con a' ≥ 3, a'' ≥ 2."""
    yield 1, (2,) + from_ab(f)
    yield from _f_ii_splits(f)


def _f_ii_splits(f: ABForm) -> Iterator[Term]:
    for i, (a, _) in enumerate(f):
        for a1, a2 in _a(a + 2, 3, 2):
            yield a1 - 1, _build(f, heads={i: (a1, a2)})


def f_i1_i2(f: ABForm) -> Iterator[Term]:
    """F_{i1|i2}: el 0 sube a_{i1}, el 1 parte a_{i2} (i1 < i2)."""
    a = f.a
    for i1, i2 in _lt(len(f)):
        for a1, a2 in _a(a[i2] + 1):
            yield a[i1], _build(f, heads={i1: (a[i1] + 1,), i2: (a1, a2)})


def f_j_i(f: ABForm) -> Iterator[Term]:
    """F_{j|i}: el 0 parte los unos del bloque j, el 1 parte a_i (j < i)."""
    a, b = f.a, f.b
    for j, i in _lt(len(f)):
        for p in _b(b[j] - 1):
            for a1, a2 in _a(a[i] + 1):
                yield 1, _build(f, heads={i: (a1, a2)}, tails={j: _run(p, (2,))})


SHUFFLE_2 = (
    Family("F_i|j", (1, 0), f_i_j),
    Family("F_j1|j2", (1, 1), f_j1_j2),
    Family("F_jj", (1, 1), f_jj),
    Family("F_ii", (1, 1), f_ii, note="cota a_i ≥ 3 y partición (a_i', a_i'')"),
    Family("F_i1|i2", (1, 1), f_i1_i2),
    Family("F_j|i", (1, 2), f_j_i),
)

SIX_FAMILIES: dict[str, Callable[[ABForm], Iterator[Term]]] = {
    "F_i|j": f_i_j,
    "F_j1|j2": f_j1_j2,
    "F_jj": f_jj,
    "F_ii": f_ii,
    "F_i1|i2": f_i1_i2,
    "F_j|i": f_j_i,
}


def _f_jj_collapsed(f: ABForm) -> Iterator[Term]:
    # F_jj menos las inserciones del stuffle: queda b''
    for j, (_, b) in enumerate(f):
        for p in _b(b):
            if p[1]:
                yield p[1], _build(f, tails={j: _run(p, (2,))})


DSR_2 = (
    Family("a_i+2", (0, 0), _raise_a(2), sign=-1),
    Family("1->3", (0, 1), _one_becomes(3), sign=-1),
    Family("F_i|j", (1, 0), f_i_j),
    Family("F_j1|j2", (1, 1), f_j1_j2),
    Family("b''·insert 2", (1, 1), _f_jj_collapsed),
    Family("F_ii splits", (1, 1), _f_ii_splits),
    Family("F_i1|i2", (1, 1), f_i1_i2),
    Family("F_j|i", (1, 2), f_j_i),
)

# ================== ζ(3) ==================

STUFFLE_3 = (
    Family("a_i+3", (0, 0), _raise_a(3)),
    Family("1->4", (0, 1), _one_becomes(4)),
    Family("(3,z)", (1, 1), _prefix((3,))),
    Family("insert 3", (1, 1), _insert_in_run(3, weight_by_tail=False)),
)


def _zeta3_shuffle() -> tuple[Family, ...]:
    def split_a3(f):
        for i, (a, _) in enumerate(f):
            for a1, a2 in _a(a + 3, 4, 2):
                yield (a1 - 1) * (a1 - 2) // 2, _build(f, heads={i: (a1, a2)})

    def insert_3(f):
        for j, (_, b) in enumerate(f):
            for p in _b(b):
                yield p[1] + 1, _build(f, tails={j: _run(p, (3,))})

    def two_2_in_run(f):
        for j, (_, b) in enumerate(f):
            for p in _b(b - 1, 3):
                yield p[2] + 1, _build(f, tails={j: _run(p, (2, 2))})

    def a2_then_split(f):
        a = f.a
        for i1, i2 in _lt(len(f)):
            for a1, a2 in _a(a[i2] + 1):
                yield (a[i1] + 1) * a[i1] // 2, _build(f, heads={i1: (a[i1] + 2,), i2: (a1, a2)})

    def a2_then_run(f):
        a, b = f.a, f.b
        for i, j in _le(len(f)):
            yield (a[i] + 1) * a[i] // 2 * (b[j] + 2), _build(f, heads={i: (a[i] + 2,)}, tails={j: _ones(b[j] + 1)})

    def three_then_split(f):
        a, b = f.a, f.b
        for j, i in _lt(len(f)):
            for p in _b(b[j] - 1):
                for a1, a2 in _a(a[i] + 1):
                    yield 1, _build(f, heads={i: (a1, a2)}, tails={j: _run(p, (3,))})

    def two_2_then_split(f):
        a, b = f.a, f.b
        for j, i in _lt(len(f)):
            for p in _b(b[j] - 2, 3):
                for a1, a2 in _a(a[i] + 1):
                    yield 1, _build(f, heads={i: (a1, a2)}, tails={j: _run(p, (2, 2))})

    def three_then_run(f):
        b = f.b
        for j1, j2 in _lt(len(f)):
            for p in _b(b[j1] - 1):
                yield b[j2] + 1, _build(f, tails={j1: _run(p, (3,)), j2: _ones(b[j2] + 1)})

    def two_2_then_run(f):
        b = f.b
        for j1, j2 in _lt(len(f)):
            for p in _b(b[j1] - 2, 3):
                yield b[j2] + 2, _build(f, tails={j1: _run(p, (2, 2)), j2: _ones(b[j2] + 1)})

    def a1_then_split2(f):
        a = f.a
        for i1, i2 in _lt(len(f)):
            for a1, a2 in _a(a[i2] + 2, 3, 2):
                yield a[i1] * (a1 - 1), _build(f, heads={i1: (a[i1] + 1,), i2: (a1, a2)})

    def a1_then_insert_2(f):
        a, b = f.a, f.b
        for i, j in _le(len(f)):
            for p in _b(b[j]):
                yield a[i] * (p[1] + 1), _build(f, heads={i: (a[i] + 1,)}, tails={j: _run(p, (2,))})

    def two_then_split2(f):
        a, b = f.a, f.b
        for j, i in _lt(len(f)):
            for p in _b(b[j] - 1):
                for a1, a2 in _a(a[i] + 2, 3, 2):
                    yield a1 - 1, _build(f, heads={i: (a1, a2)}, tails={j: _run(p, (2,))})

    def two_then_insert_2(f):
        b = f.b
        for j1, j2 in _lt(len(f)):
            for p in _b(b[j1] - 1):
                for q in _b(b[j2]):
                    yield q[1] + 1, _build(f, tails={j1: _run(p, (2,)), j2: _run(q, (2,))})

    def a1_a1_split(f):
        a = f.a
        for i1, i2, i3 in _lt3(len(f)):
            for a1, a2 in _a(a[i3] + 1):
                yield a[i1] * a[i2], _build(f, heads={i1: (a[i1] + 1,), i2: (a[i2] + 1,), i3: (a1, a2)})

    def a1_a1_run(f):
        a, b = f.a, f.b
        h = len(f)
        for i1, i2 in _lt(h):
            for j in range(i2, h):
                yield a[i1] * a[i2] * (b[j] + 2), _build(
                    f, heads={i1: (a[i1] + 1,), i2: (a[i2] + 1,)}, tails={j: _ones(b[j] + 1)})

    def a1_two_split(f):
        a, b = f.a, f.b
        h = len(f)
        for i1, j in _le(h):
            for i2 in range(j + 1, h):
                for p in _b(b[j] - 1):
                    for a1, a2 in _a(a[i2] + 1):
                        yield a[i1], _build(f, heads={i1: (a[i1] + 1,), i2: (a1, a2)}, tails={j: _run(p, (2,))})

    def a1_two_run(f):
        a, b = f.a, f.b
        h = len(f)
        for i, j1 in _le(h):
            for j2 in range(j1 + 1, h):
                for p in _b(b[j1] - 1):
                    yield a[i] * (b[j2] + 2), _build(
                        f, heads={i: (a[i] + 1,)}, tails={j1: _run(p, (2,)), j2: _ones(b[j2] + 1)})

    def two_a1_split(f):
        a, b = f.a, f.b
        for j, i1, i2 in _lt3(len(f)):
            for p in _b(b[j] - 1):
                for a1, a2 in _a(a[i2] + 1):
                    yield 1, _build(f, heads={i1: (a[i1] + 1,), i2: (a1, a2)}, tails={j: _run(p, (2,))})

    def two_a1_run(f):
        a, b = f.a, f.b
        h = len(f)
        for j1, i in _lt(h):
            for j2 in range(i, h):
                for p in _b(b[j1] - 1):
                    yield a[i] * (b[j2] + 2), _build(
                        f, heads={i: (a[i] + 1,)}, tails={j1: _run(p, (2,)), j2: _ones(b[j2] + 1)})

    def two_two_split(f):
        a, b = f.a, f.b
        for j1, j2, i in _lt3(len(f)):
            for p in _b(b[j1] - 1):
                for q in _b(b[j2] - 1):
                    for a1, a2 in _a(a[i] + 1):
                        yield 1, _build(f, heads={i: (a1, a2)}, tails={j1: _run(p, (2,)), j2: _run(q, (2,))})

    def two_two_run(f):
        b = f.b
        for j1, j2, j3 in _lt3(len(f)):
            for p in _b(b[j1] - 1):
                for q in _b(b[j2] - 1):
                    yield b[j3] + 2, _build(
                        f, tails={j1: _run(p, (2,)), j2: _run(q, (2,)), j3: _ones(b[j3] + 1)})

    return (
        Family("(3,z)", (1, 1), _prefix((3,))),
        Family("a_i',a_i'' [a_i+3]", (1, 1), split_a3),
        Family("insert 3", (1, 1), insert_3),
        Family("2,2 in run", (1, 2), two_2_in_run, note="etiqueta de altura h+2"),
        Family("a_i1+2 | split a_i2", (1, 1), a2_then_split),
        Family("a_i+2 | 1^{b_j+1}", (1, 0), a2_then_run),
        Family("1->3 | split a_i", (1, 2), three_then_split),
        Family("2,2 | split a_i", (1, 3), two_2_then_split),
        Family("1->3 | 1^{b_j2+1}", (1, 1), three_then_run),
        Family("2,2 | 1^{b_j2+1}", (1, 2), two_2_then_run),
        Family("a_i1+1 | split a_i2 [+2]", (1, 1), a1_then_split2),
        Family("a_i+1 | insert 2", (1, 1), a1_then_insert_2),
        Family("1->2 | split a_i [+2]", (1, 2), two_then_split2),
        Family("1->2 | insert 2", (1, 2), two_then_insert_2),
        Family("a_i1+1 | a_i2+1 | split a_i3", (1, 1), a1_a1_split),
        Family("a_i1+1 | a_i2+1 | 1^{b_j+1}", (1, 0), a1_a1_run),
        Family("a_i1+1 | 1->2 | split a_i2", (1, 2), a1_two_split),
        Family("a_i+1 | 1->2 | 1^{b_j2+1}", (1, 1), a1_two_run),
        Family("1->2 | a_i1+1 | split a_i2", (1, 2), two_a1_split),
        Family("1->2 | a_i+1 | 1^{b_j2+1}", (1, 1), two_a1_run),
        Family("1->2 | 1->2 | split a_i", (1, 3), two_two_split),
        Family("1->2 | 1->2 | 1^{b_j3+1}", (1, 2), two_two_run),
    )


SHUFFLE_3 = _zeta3_shuffle()

# ================== ζ(2,1) ==================


def _zeta21_stuffle() -> tuple[Family, ...]:
    def a2_a1(f):
        a = f.a
        for i1, i2 in _lt(len(f)):
            yield 1, _build(f, heads={i1: (a[i1] + 2,), i2: (a[i2] + 1,)})

    def a2_one_to_2(f):
        a, b = f.a, f.b
        for i, j in _le(len(f)):
            for p in _b(b[j] - 1):
                yield 1, _build(f, heads={i: (a[i] + 2,)}, tails={j: _run(p, (2,))})

    def one_to_3_a1(f):
        a, b = f.a, f.b
        for j, i in _lt(len(f)):
            for p in _b(b[j] - 1):
                yield 1, _build(f, heads={i: (a[i] + 1,)}, tails={j: _run(p, (3,))})

    def one_to_3_one_to_2(f):
        b = f.b
        for j1, j2 in _lt(len(f)):
            for p in _b(b[j1] - 1):
                for q in _b(b[j2] - 1):
                    yield 1, _build(f, tails={j1: _run(p, (3,)), j2: _run(q, (2,))})

    def a2_run(f):
        a, b = f.a, f.b
        for i, j in _le(len(f)):
            yield b[j] + 1, _build(f, heads={i: (a[i] + 2,)}, tails={j: _ones(b[j] + 1)})

    def one_to_3_then_1(f):
        for j, (_, b) in enumerate(f):
            for p in _b(b - 1):
                yield p[1] + 1, _build(f, tails={j: _run((p[0], p[1] + 1), (3,))})

    def one_to_3_run(f):
        b = f.b
        for j1, j2 in _lt(len(f)):
            for p in _b(b[j1] - 1):
                yield b[j2] + 1, _build(f, tails={j1: _run(p, (3,)), j2: _ones(b[j2] + 1)})

    def lead_2_one_to_2(f):
        for j, (_, b) in enumerate(f):
            for p in _b(b - 1):
                yield 1, _build(f, tails={j: _run(p, (2,))}, prefix=(2,))

    def insert_2_one_to_2(f):
        for j, (_, b) in enumerate(f):
            for p in _b(b - 1, 3):
                yield 1, _build(f, tails={j: _run(p, (2, 2))})

    def insert_2_then_one_to_2(f):
        b = f.b
        for j1, j2 in _lt(len(f)):
            for p in _b(b[j1]):
                for q in _b(b[j2] - 1):
                    yield 1, _build(f, tails={j1: _run(p, (2,)), j2: _run(q, (2,))})

    def lead_2_a1(f):
        for i, (a, _) in enumerate(f):
            yield 1, _build(f, heads={i: (a + 1,)}, prefix=(2,))

    def insert_2_a1(f):
        a, b = f.a, f.b
        for j, i in _lt(len(f)):
            for p in _b(b[j]):
                yield 1, _build(f, heads={i: (a[i] + 1,)}, tails={j: _run(p, (2,))})

    def insert_2_insert_1(f):
        for j, (_, b) in enumerate(f):
            for p in _b(b, 3):
                yield 1, _build(f, tails={j: _ones(p[0]) + (2,) + _ones(p[1]) + _ones(p[2] + 1)})

    def insert_2_run(f):
        b = f.b
        for j1, j2 in _lt(len(f)):
            for p in _b(b[j1]):
                yield b[j2] + 1, _build(f, tails={j1: _run(p, (2,)), j2: _ones(b[j2] + 1)})

    return (
        Family("a_i1+2 | a_i2+1", (0, 0), a2_a1),
        Family("a_i+2 | 1->2", (0, 1), a2_one_to_2),
        Family("1->3 | a_i+1", (0, 1), one_to_3_a1),
        Family("1->3 | 1->2", (0, 2), one_to_3_one_to_2),
        Family("a_i+2 | 1^{b_j+1}", (1, 0), a2_run),
        Family("1->3 then 1", (1, 1), one_to_3_then_1, note="bloque final 1^{b''+1}"),
        Family("1->3 | 1^{b_j2+1}", (1, 1), one_to_3_run),
        Family("(2,…) | 1->2", (1, 2), lead_2_one_to_2),
        Family("insert 2 then 1->2", (1, 2), insert_2_one_to_2, note="b'+b''+b''' = b_j − 1"),
        Family("insert 2 | 1->2", (1, 2), insert_2_then_one_to_2),
        Family("(2,…) | a_i+1", (1, 1), lead_2_a1),
        Family("insert 2 | a_i+1", (1, 1), insert_2_a1),
        Family("insert 2, insert 1", (2, 1), insert_2_insert_1),
        Family("insert 2 | 1^{b_j2+1}", (2, 1), insert_2_run),
        Family("(2,1,z)", (2, 1), _prefix((2, 1))),
    )


def _zeta21_shuffle() -> tuple[Family, ...]:
    def split_a_one(f):
        for i, (a, _) in enumerate(f):
            for a1, a2 in _a(a + 2):
                yield a1 - 1, _build(f, heads={i: (a1, 1, a2)})

    def split_a_three(f):
        for i, (a, _) in enumerate(f):
            for a1, a2, a3 in _a(a + 3, 2, 2, 2):
                yield a1 - 1, _build(f, heads={i: (a1, a2, a3)})

    def two_then_11(f):
        for j, (_, b) in enumerate(f):
            for p in _b(b - 1):
                yield (p[1] + 3) * (p[1] + 2) // 2, _build(f, tails={j: _ones(p[0]) + (2,) + _ones(p[1] + 2)})

    def split2_split(f):
        a = f.a
        for i1, i2 in _lt(len(f)):
            for a1, a2 in _a(a[i1] + 2):
                for c1, c2 in _a(a[i2] + 1):
                    yield a1 - 1, _build(f, heads={i1: (a1, a2), i2: (c1, c2)})

    def split2_run(f):
        a, b = f.a, f.b
        for i, j in _le(len(f)):
            for a1, a2 in _a(a[i] + 2):
                yield (a1 - 1) * (b[j] + 2), _build(f, heads={i: (a1, a2)}, tails={j: _ones(b[j] + 1)})

    def two_1_split(f):
        a, b = f.a, f.b
        for j, i in _lt(len(f)):
            for p in _b(b[j] - 1):
                for a1, a2 in _a(a[i] + 1):
                    yield p[1] + 1, _build(f, heads={i: (a1, a2)}, tails={j: _ones(p[0]) + (2,) + _ones(p[1] + 1)})

    def two_1_run(f):
        b = f.b
        for j1, j2 in _lt(len(f)):
            for p in _b(b[j1] - 1):
                yield (p[1] + 2) * (b[j2] + 2), _build(
                    f, tails={j1: _ones(p[0]) + (2,) + _ones(p[1] + 1), j2: _ones(b[j2] + 1)})

    def a1_split_one(f):
        a = f.a
        for i1, i2 in _lt(len(f)):
            for a1, a2 in _a(a[i2] + 1):
                yield a[i1], _build(f, heads={i1: (a[i1] + 1,), i2: (a1, 1, a2)})

    def a1_split_three(f):
        a = f.a
        for i1, i2 in _lt(len(f)):
            for a1, a2, a3 in _a(a[i2] + 2, 2, 2, 2):
                yield a[i1], _build(f, heads={i1: (a[i1] + 1,), i2: (a1, a2, a3)})

    def a1_run2(f):
        a, b = f.a, f.b
        for i, j in _le(len(f)):
            yield a[i] * (b[j] + 3) * (b[j] + 2) // 2, _build(f, heads={i: (a[i] + 1,)}, tails={j: _ones(b[j] + 2)})

    def two_split_one(f):
        a, b = f.a, f.b
        for j, i in _lt(len(f)):
            for p in _b(b[j] - 1):
                for a1, a2 in _a(a[i] + 1):
                    yield 1, _build(f, heads={i: (a1, 1, a2)}, tails={j: _run(p, (2,))})

    def two_split_three(f):
        a, b = f.a, f.b
        for j, i in _lt(len(f)):
            for p in _b(b[j] - 1):
                for a1, a2, a3 in _a(a[i] + 2, 2, 2, 2):
                    yield 1, _build(f, heads={i: (a1, a2, a3)}, tails={j: _run(p, (2,))})

    def two_run2(f):
        b = f.b
        for j1, j2 in _lt(len(f)):
            for p in _b(b[j1] - 1):
                yield (b[j2] + 3) * (b[j2] + 2) // 2, _build(f, tails={j1: _run(p, (2,)), j2: _ones(b[j2] + 2)})

    def a1_split_split(f):
        a = f.a
        for i1, i2, i3 in _lt3(len(f)):
            for a1, a2 in _a(a[i2] + 1):
                for c1, c2 in _a(a[i3] + 1):
                    yield a[i1], _build(f, heads={i1: (a[i1] + 1,), i2: (a1, a2), i3: (c1, c2)})

    def a1_split_run(f):
        a, b = f.a, f.b
        h = len(f)
        for i1, i2 in _lt(h):
            for j in range(i2, h):
                for a1, a2 in _a(a[i2] + 1):
                    yield a[i1] * (b[j] + 2), _build(
                        f, heads={i1: (a[i1] + 1,), i2: (a1, a2)}, tails={j: _ones(b[j] + 1)})

    def a1_run_split(f):
        a, b = f.a, f.b
        h = len(f)
        for i1, j in _le(h):
            for i2 in range(j + 1, h):
                for a1, a2 in _a(a[i2] + 1):
                    yield a[i1] * (b[j] + 2), _build(
                        f, heads={i1: (a[i1] + 1,), i2: (a1, a2)}, tails={j: _ones(b[j] + 1)})

    def a1_run_run(f):
        a, b = f.a, f.b
        h = len(f)
        for i, j1 in _le(h):
            for j2 in range(j1 + 1, h):
                yield a[i] * (b[j1] + 2) * (b[j2] + 2), _build(
                    f, heads={i: (a[i] + 1,)}, tails={j1: _ones(b[j1] + 1), j2: _ones(b[j2] + 1)})

    def two_split_split(f):
        a, b = f.a, f.b
        for j, i1, i2 in _lt3(len(f)):
            for p in _b(b[j] - 1):
                for a1, a2 in _a(a[i1] + 1):
                    for c1, c2 in _a(a[i2] + 1):
                        yield 1, _build(f, heads={i1: (a1, a2), i2: (c1, c2)}, tails={j: _run(p, (2,))})

    def two_split_run(f):
        a, b = f.a, f.b
        h = len(f)
        for j1, i in _lt(h):
            for j2 in range(i, h):
                for p in _b(b[j1] - 1):
                    for a1, a2 in _a(a[i] + 1):
                        yield b[j2] + 2, _build(
                            f, heads={i: (a1, a2)}, tails={j1: _run(p, (2,)), j2: _ones(b[j2] + 1)})

    def two_run_split(f):
        a, b = f.a, f.b
        for j1, j2, i in _lt3(len(f)):
            for p in _b(b[j1] - 1):
                for a1, a2 in _a(a[i] + 1):
                    yield b[j2] + 2, _build(
                        f, heads={i: (a1, a2)}, tails={j1: _run(p, (2,)), j2: _ones(b[j2] + 1)})

    def two_run_run(f):
        b = f.b
        for j1, j2, j3 in _lt3(len(f)):
            for p in _b(b[j1] - 1):
                yield (b[j2] + 2) * (b[j3] + 2), _build(
                    f, tails={j1: _run(p, (2,)), j2: _ones(b[j2] + 1), j3: _ones(b[j3] + 1)})

    return (
        Family("a_i',1,a_i''", (2, 1), split_a_one),
        Family("a_i',a_i'',a_i'''", (2, 2), split_a_three, note="etiqueta de altura h+2"),
        Family("2,1^{b''+2}", (2, 1), two_then_11),
        Family("split a_i1 [+2] | split a_i2", (2, 2), split2_split,
               note="a_i1', a_i1'' ≥ 2 y a_i2' + a_i2'' = a_i2 + 1"),
        Family("split a_i [+2] | 1^{b_j+1}", (2, 1), split2_run, note="bloque 1^{b_j+1}"),
        Family("2,1^{b''+1} | split a_i", (2, 2), two_1_split),
        Family("2,1^{b''+1} | 1^{b_j2+1}", (2, 1), two_1_run),
        Family("a_i1+1 | a_i2',1,a_i2''", (2, 1), a1_split_one),
        Family("a_i1+1 | a_i2',a_i2'',a_i2'''", (2, 2), a1_split_three),
        Family("a_i+1 | 1^{b_j+2}", (2, 0), a1_run2),
        Family("1->2 | a_i',1,a_i''", (2, 2), two_split_one),
        Family("1->2 | a_i',a_i'',a_i'''", (2, 3), two_split_three),
        Family("1->2 | 1^{b_j2+2}", (2, 1), two_run2),
        Family("a_i1+1 | split a_i2 | split a_i3", (2, 2), a1_split_split),
        Family("a_i1+1 | split a_i2 | 1^{b_j+1}", (2, 1), a1_split_run),
        Family("a_i1+1 | 1^{b_j+1} | split a_i2", (2, 1), a1_run_split),
        Family("a_i+1 | 1^{b_j1+1} | 1^{b_j2+1}", (2, 0), a1_run_run),
        Family("1->2 | split a_i1 | split a_i2", (2, 3), two_split_split),
        Family("1->2 | split a_i | 1^{b_j2+1}", (2, 2), two_split_run),
        Family("1->2 | 1^{b_j2+1} | split a_i", (2, 2), two_run_split),
        Family("1->2 | 1^{b_j2+1} | 1^{b_j3+1}", (2, 1), two_run_run),
        Family("(z,2,1)", (2, 1), _suffix((2, 1))),
    )


STUFFLE_21 = _zeta21_stuffle()
SHUFFLE_21 = _zeta21_shuffle()

_STATED: dict[tuple[str, Side], tuple[Family, ...]] = {
    ("1", Side.STUFFLE): STUFFLE_1,
    ("1", Side.SHUFFLE): SHUFFLE_1,
    ("1", Side.DSR): DSR_1,
    ("2", Side.STUFFLE): STUFFLE_2,
    ("2", Side.SHUFFLE): SHUFFLE_2,
    ("2", Side.DSR): DSR_2,
    ("3", Side.STUFFLE): STUFFLE_3,
    ("3", Side.SHUFFLE): SHUFFLE_3,
    ("3", Side.DSR): _labelled(SHUFFLE_3, "⧢ ") + _negated(STUFFLE_3, "∗ "),
    ("21", Side.STUFFLE): STUFFLE_21,
    ("21", Side.SHUFFLE): SHUFFLE_21,
    ("21", Side.DSR): _labelled(SHUFFLE_21, "⧢ ") + _negated(STUFFLE_21, "∗ "),
}


def families(g: str | Iterable[int], side: Side | str) -> tuple[Family, ...]:
    return _STATED[(left_key(g), Side(side))]


def stated_readings() -> list[str]:
    """Familias cuya lectura fija un índice o una etiqueta del enunciado."""
    out = []
    for (g, side), fams in _STATED.items():
        if side is Side.DSR:
            continue
        for fam in fams:
            if fam.note:
                out.append(f"{FamilyTag(g, side)} · {fam.name}: {fam.note}")
    return out


# ================== EVALUACIÓN ==================


class AnnotatedTerm(BaseModel):
    family: str
    coeff: int
    composition: tuple[int, ...]
    tag: tuple[int, int, int]


def _as_ab(z: ABForm | Iterable[int]) -> ABForm:
    if isinstance(z, ABForm):
        return z
    c = z if isinstance(z, Composition) else Composition(z)
    return to_ab(c)


def _sum(fams: Iterable[Family], f: ABForm) -> LinComb:
    acc: defaultdict[tuple[int, ...], int] = defaultdict(int)
    for fam in fams:
        for coef, comp in fam.emit(f):
            acc[comp] += fam.sign * coef
    return LinComb(acc)


def annotated_terms(
    g: str | Iterable[int], side: Side | str, z: ABForm | Iterable[int], completion: bool = False,
) -> Iterator[AnnotatedTerm]:
    """
    Términos de cada familia con su firma esperada. Con completion=True se
    agregan al final los términos de la completación (familia COMPLETION),
    etiquetados con su propia firma.
    """
    f = _as_ab(z)
    key, side = left_key(g), Side(side)
    w = f.weight + LEFT_FACTORS[key].weight
    for fam in families(key, side):
        dd, dh = fam.shift
        for coef, comp in fam.emit(f):
            yield AnnotatedTerm(
                family=fam.name, coeff=fam.sign * coef, composition=comp,
                tag=(w, f.depth + dd, f.height + dh),
            )
    if not completion:
        return
    if side is Side.DSR:
        extra = _completion(key, Side.SHUFFLE, f) - _completion(key, Side.STUFFLE, f)
    else:
        extra = _completion(key, side, f)
    for comp, q in extra.items():
        yield AnnotatedTerm(
            family=COMPLETION, coeff=int(q), composition=tuple(comp),
            tag=(comp.weight, comp.depth, comp.height),
        )


def _oracle(key: str, side: Side, z: Composition) -> LinComb:
    g = LEFT_FACTORS[key]
    if side is Side.STUFFLE:
        return oracle.stuffle(g, z)
    if side is Side.SHUFFLE:
        return oracle.shuffle(g, z)
    return oracle.dsr(g, z)


def stated(g: str | Iterable[int], side: Side | str, z: ABForm | Iterable[int]) -> LinComb:
    """Suma de las familias del enunciado cerrado, sin completar."""
    return _sum(families(g, side), _as_ab(z))


def _completion(key: str, side: Side, f: ABForm) -> LinComb:
    """Diferencia oráculo − enunciado; cero fuera de COMPLETED."""
    if (key, side) not in COMPLETED:
        return LinComb()
    return _oracle(key, side, from_ab(f)) - _sum(_STATED[(key, side)], f)


def _completed(key: str, side: Side, f: ABForm) -> LinComb:
    return _sum(_STATED[(key, side)], f) + _completion(key, side, f)


def closed_stuffle(g: str | Iterable[int], z: ABForm | Iterable[int], completion: bool = True) -> LinComb:
    key, f = left_key(g), _as_ab(z)
    if not completion:
        return _sum(_STATED[(key, Side.STUFFLE)], f)
    return _completed(key, Side.STUFFLE, f)


def closed_shuffle(g: str | Iterable[int], z: ABForm | Iterable[int], completion: bool = True) -> LinComb:
    key, f = left_key(g), _as_ab(z)
    if not completion:
        return _sum(_STATED[(key, Side.SHUFFLE)], f)
    return _completed(key, Side.SHUFFLE, f)


def closed_dsr(g: str | Iterable[int], z: ABForm | Iterable[int], completion: bool = True) -> LinComb:
    key, f = left_key(g), _as_ab(z)
    if key in ("1", "2"):
        rel = _sum(_STATED[(key, Side.DSR)], f)
    else:
        rel = closed_shuffle(key, f, completion) - closed_stuffle(key, f, completion)
    if rel.has_divergent():
        raise InconsistencyError(f"términos divergentes residuales en la forma cerrada g={key}, z={from_ab(f)}")
    return rel


def closed(g: str | Iterable[int], side: Side | str, z: ABForm | Iterable[int], completion: bool = True) -> LinComb:
    side = Side(side)
    if side is Side.STUFFLE:
        return closed_stuffle(g, z, completion)
    if side is Side.SHUFFLE:
        return closed_shuffle(g, z, completion)
    return closed_dsr(g, z, completion)


# ================== CONCILIACIÓN ==================


class TermDelta(BaseModel):
    composition: str
    oracle: str
    stated: str


class DiscrepancyReport(BaseModel):
    composition: str
    blocks: list[tuple[int, int]]
    tag: str
    missing: list[TermDelta] = []
    extra: list[TermDelta] = []
    mismatched: list[TermDelta] = []
    family_masses: dict[str, str] = {}
    verdict: str


def _fmt(q) -> str:
    return str(q)


def discrepancy(g: str | Iterable[int], side: Side | str, z: Iterable[int]) -> DiscrepancyReport:
    key, side = left_key(g), Side(side)
    c = z if isinstance(z, Composition) else Composition(z)
    require_convergent(c)
    f = to_ab(c)
    truth = _oracle(key, side, c)
    printed = _sum(_STATED[(key, side)], f)

    missing, extra, mismatched = [], [], []
    for comp in sorted(truth.support() | printed.support(), key=lambda x: (x.convergent(), tuple(x))):
        qo, qs = truth.coeff(comp), printed.coeff(comp)
        if qo == qs:
            continue
        delta = TermDelta(composition=format_composition(comp, compress=False), oracle=_fmt(qo), stated=_fmt(qs))
        if qs == 0:
            missing.append(delta)
        elif qo == 0:
            extra.append(delta)
        else:
            mismatched.append(delta)

    masses: dict[str, str] = {}
    for fam in _STATED[(key, side)]:
        masses[fam.name] = _fmt(sum(fam.sign * coef for coef, _ in fam.emit(f)))

    if not (missing or extra or mismatched):
        verdict = "exact"
    elif (key, side) in COMPLETED or (side is Side.DSR and key in ("3", "21")):
        verdict = "reconciled"
    else:
        verdict = "mismatch"
    return DiscrepancyReport(
        composition=format_composition(c, compress=False), blocks=list(f), tag=str(FamilyTag(key, side)),
        missing=missing, extra=extra, mismatched=mismatched, family_masses=masses, verdict=verdict,
    )


def reconcile(g: str | Iterable[int], side: Side | str, max_weight: int, min_weight: int | None = None) -> list[DiscrepancyReport]:
    """
    Forma cerrada contra oráculo para todo z convergente con
    peso(z) + peso(g) ≤ max_weight. Reportes en orden de peso y luego ≺.
    """
    key, side = left_key(g), Side(side)
    bound = get_settings().max_weight
    if max_weight > bound:
        raise PolyzetaError(f"max_weight={max_weight} supera la cota configurada ({bound})")
    gw = LEFT_FACTORS[key].weight
    lo = max(2, (min_weight or 0) - gw)
    reports: list[DiscrepancyReport] = []
    for wz in range(lo, max_weight - gw + 1):
        for z in enumerate_weight(wz):
            rep = discrepancy(key, side, z)
            if rep.verdict == "mismatch":
                logger.warning("conciliación %s z=%s: %s", FamilyTag(key, side), rep.composition, rep.verdict)
            reports.append(rep)
    logger.info("conciliación %s hasta w=%d: %d casos", FamilyTag(key, side), max_weight, len(reports))
    return reports
