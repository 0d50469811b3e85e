# polyzeta/core.py
"""
Modelo de datos de los polyzetas.

- Composition: índice (s_1, …, s_d) de ζ(s_1, …, s_d); convergente si s_1 ≥ 2.
- ABForm: forma normal (a_1, 1^{b_1}, …, a_h, 1^{b_h}) con a_i ≥ 2, b_j ≥ 0.
- Word: codificación binaria 0^{a_1−1} 1 1^{b_1} … usada por el producto shuffle.
- Signature: (peso, profundidad, altura).

Todos los valores son inmutables; las funciones son puras.
"""

from __future__ import annotations

import itertools
import re
from typing import Iterable, NamedTuple

from polyzeta.errors import DivergentError, NotAdmissibleError, ParseError, PolyzetaError

# ----------------------------
# Tipos
# ----------------------------


class Composition(tuple):
    """Sucesión finita de enteros positivos. La composición vacía es la unidad de los productos."""

    __slots__ = ()

    def __new__(cls, entries: Iterable[int] = ()):
        items = tuple(int(x) for x in entries)
        for x in items:
            if x < 1:
                raise PolyzetaError(f"entrada no positiva {x} en {items}")
        return super().__new__(cls, items)

    @classmethod
    def _trusted(cls, items: tuple[int, ...]) -> "Composition":
        return tuple.__new__(cls, items)

    @property
    def weight(self) -> int:
        return sum(self)

    @property
    def depth(self) -> int:
        return len(self)

    @property
    def height(self) -> int:
        return sum(1 for x in self if x >= 2)

    def convergent(self) -> bool:
        return bool(self) and self[0] >= 2

    def __str__(self) -> str:
        return format_composition(self)

    def __repr__(self) -> str:
        return f"Composition(({format_composition(self, compress=False)}))"


class ABForm(tuple):
    """Bloques (a_i, b_i): a_i ≥ 2 seguido de b_i unos."""

    __slots__ = ()

    def __new__(cls, blocks: Iterable[tuple[int, int]]):
        items = tuple((int(a), int(b)) for a, b in blocks)
        if not items:
            raise PolyzetaError("forma a-b vacía (se requiere h ≥ 1)")
        for a, b in items:
            if a < 2 or b < 0:
                raise PolyzetaError(f"bloque inválido ({a},{b}): se requiere a ≥ 2, b ≥ 0")
        return super().__new__(cls, items)

    @classmethod
    def _trusted(cls, items: tuple[tuple[int, int], ...]) -> "ABForm":
        return tuple.__new__(cls, items)

    @property
    def a(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self)

    @property
    def b(self) -> tuple[int, ...]:
        return tuple(b for _, b in self)

    @property
    def height(self) -> int:
        return len(self)

    @property
    def weight(self) -> int:
        return sum(a + b for a, b in self)

    @property
    def depth(self) -> int:
        return sum(1 + b for _, b in self)


class Word(str):
    """Palabra sobre el alfabeto {0, 1}."""

    __slots__ = ()

    def __new__(cls, letters: str = ""):
        s = str(letters)
        if s.strip("01"):
            raise ParseError(f"letra no binaria en {s!r}", token=s)
        return super().__new__(cls, s)

    @classmethod
    def _trusted(cls, s: str) -> "Word":
        return str.__new__(cls, s)

    def admissible(self) -> bool:
        return len(self) > 0 and self[0] == "0" and self[-1] == "1"


class Signature(NamedTuple):
    weight: int
    depth: int
    height: int


# ----------------------------
# Texto
# ----------------------------

_TOKEN_RE = re.compile(r"^\s*([0-9]+)\s*(?:\^\s*([0-9]+))?\s*$")


def parse_composition(text: str) -> Composition:
    """
    Lee "3,1,4,1", "4,1^3" o "(5,1^0,3)". El sufijo ^k repite la entrada k veces;
    1^0 no aporta nada.
    """
    if text is None or not str(text).strip():
        raise ParseError("entrada vacía", token="")
    body = str(text).strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]

    entries: list[int] = []
    for raw in body.split(","):
        token = raw.strip()
        m = _TOKEN_RE.match(raw)
        if not m:
            raise ParseError(f"token mal formado: {token!r}", token=token)
        value = int(m.group(1))
        reps = int(m.group(2)) if m.group(2) is not None else 1
        if value < 1:
            raise ParseError(f"entrada no positiva: {token!r}", token=token)
        entries.extend([value] * reps)

    if not entries:
        raise ParseError(f"la composición {text!r} queda vacía", token=str(text).strip())
    return Composition._trusted(tuple(entries))


def format_composition(c: Iterable[int], compress: bool = True) -> str:
    items = tuple(c)
    if not items:
        return "()"
    if not compress:
        return ",".join(str(x) for x in items)
    parts: list[str] = []
    for value, group in itertools.groupby(items):
        n = len(list(group))
        if value == 1 and n >= 2:
            parts.append(f"1^{n}")
        else:
            parts.extend([str(value)] * n)
    return ",".join(parts)


# ----------------------------
# Firma y forma a-b
# ----------------------------

def require_convergent(c: Composition) -> None:
    if not c:
        raise DivergentError(c, "la composición vacía no es un polyzeta")
    if c[0] < 2:
        raise DivergentError(c)


def signature(c: Composition) -> Signature:
    require_convergent(c)
    return Signature(c.weight, c.depth, c.height)


def to_ab(c: Composition) -> ABForm:
    require_convergent(c)
    blocks: list[list[int]] = []
    for s in c:
        if s >= 2:
            blocks.append([s, 0])
        else:
            blocks[-1][1] += 1
    return ABForm._trusted(tuple((a, b) for a, b in blocks))


def from_ab(f: ABForm) -> Composition:
    return Composition._trusted(tuple(itertools.chain.from_iterable((a,) + (1,) * b for a, b in f)))


def is_hoffman(c: Iterable[int]) -> bool:
    """Todas las entradas en {2, 3}."""
    items = tuple(c)
    return bool(items) and all(x in (2, 3) for x in items)


# ----------------------------
# Palabras
# ----------------------------

def letters_of(c: Iterable[int]) -> str:
    """Regla por bloque 0^{s−1}1; vale también para composiciones divergentes."""
    return "".join("0" * (s - 1) + "1" for s in c)


def encode_word(c: Composition) -> Word:
    require_convergent(c)
    return Word._trusted(letters_of(c))


def peel_word(v: str) -> Composition:
    """
    Decodifica cualquier palabra que termine en 1. Los 1 iniciales se
    convierten en entradas 1 (términos divergentes de la regularización).
    """
    entries: list[int] = []
    zeros = 0
    for ch in v:
        if ch == "0":
            zeros += 1
        else:
            entries.append(zeros + 1)
            zeros = 0
    if zeros:
        raise NotAdmissibleError(str(v))
    return Composition._trusted(tuple(entries))


def decode_word(v: str) -> Composition:
    word = v if isinstance(v, Word) else Word(v)
    if not word.admissible():
        raise NotAdmissibleError(str(v))
    return peel_word(word)


_SWAP = str.maketrans("01", "10")


def word_dual(v: str) -> Word:
    """Lectura inversa intercambiando 0 ↔ 1."""
    return Word._trusted(str(v)[::-1].translate(_SWAP))


# ----------------------------
# Dualidad
# ----------------------------

def dual(c: Composition) -> Composition:
    """
    Se lee (a_1, 1^{b_1}, …, a_h, 1^{b_h}) al revés, cada 1^{b_j} pasa a b_j + 2
    y cada a_i pasa a 1^{a_i − 2}.
    """
    f = to_ab(c)
    out: list[int] = []
    for a, b in reversed(f):
        out.append(b + 2)
        out.extend([1] * (a - 2))
    return Composition._trusted(tuple(out))


def is_self_dual(c: Composition) -> bool:
    return dual(c) == c
