# polyzeta/oracle.py
"""
Oráculo de fuerza bruta: productos stuffle (cuasi-shuffle) sobre composiciones,
shuffle sobre palabras, extensión bilineal a combinaciones racionales y la
relación de doble shuffle (regularizada cuando el factor izquierdo es (1)).

Las recursiones están memoizadas por par de operandos, con orden canónico de
los operandos (ambos productos son conmutativos).
"""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Mapping, Union

from polyzeta.core import Composition, Word, format_composition, letters_of, peel_word, require_convergent
from polyzeta.errors import DivergentError, InconsistencyError, NotAdmissibleError, PolyzetaError
from polyzeta.ordering import sort_key
from polyzeta.settings import get_settings

logger = logging.getLogger(__name__)

_MEMO = get_settings().memo_size

# ================== COMBINACIONES LINEALES ==================


def _display_key(c: Composition) -> tuple:
    if c.convergent():
        return (0, sort_key(c))
    return (1, c.depth, tuple(c))


def _format_coeff(q: Fraction) -> str:
    mag = abs(q)
    if mag == 1:
        return ""
    if mag.denominator == 1:
        return f"{mag.numerator}*"
    return f"{mag.numerator}/{mag.denominator}*"


class LinComb:
    """Suma formal finita de composiciones con coeficientes racionales no nulos, todas del mismo peso."""

    __slots__ = ("_terms", "_weight")

    def __init__(self, terms: Union[Mapping, Iterable[tuple]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Composition, Fraction] = {}
        for comp, coeff in items:
            key = comp if isinstance(comp, Composition) else Composition(comp)
            acc[key] = acc.get(key, Fraction(0)) + Fraction(coeff)
        self._terms = {k: v for k, v in acc.items() if v}
        weights = {k.weight for k in self._terms}
        if len(weights) > 1:
            raise PolyzetaError(f"pesos mezclados en una combinación lineal: {sorted(weights)}")
        self._weight = weights.pop() if weights else None

    @classmethod
    def of(cls, c: Composition, coeff: int | Fraction = 1) -> "LinComb":
        return cls({c: coeff})

    @classmethod
    def from_terms(cls, *terms: tuple[int | Fraction, Iterable[int]]) -> "LinComb":
        """LinComb.from_terms((4, (3, 1)), (-1, (4,)))"""
        return cls((comp, coeff) for coeff, comp in terms)

    # --- consultas ---
    @property
    def weight(self) -> int | None:
        return self._weight

    def coeff(self, c: Iterable[int]) -> Fraction:
        return self._terms.get(Composition(c), Fraction(0))

    def items(self) -> list[tuple[Composition, Fraction]]:
        return sorted(self._terms.items(), key=lambda kv: _display_key(kv[0]))

    def support(self) -> frozenset[Composition]:
        return frozenset(self._terms)

    def mass(self) -> Fraction:
        return sum(self._terms.values(), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def divergent_terms(self) -> list[Composition]:
        return [c for c, _ in self.items() if not c.convergent()]

    def has_divergent(self) -> bool:
        return any(not c.convergent() for c in self._terms)

    def is_integral(self) -> bool:
        return all(q.denominator == 1 for q in self._terms.values())

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Composition]:
        return (c for c, _ in self.items())

    def __contains__(self, c: object) -> bool:
        return c in self._terms

    # --- aritmética ---
    def __add__(self, other: "LinComb") -> "LinComb":
        if not isinstance(other, LinComb):
            return NotImplemented
        acc = dict(self._terms)
        for c, q in other._terms.items():
            acc[c] = acc.get(c, Fraction(0)) + q
        return LinComb(acc)

    def __neg__(self) -> "LinComb":
        return LinComb({c: -q for c, q in self._terms.items()})

    def __sub__(self, other: "LinComb") -> "LinComb":
        if not isinstance(other, LinComb):
            return NotImplemented
        return self + (-other)

    def __mul__(self, k: int | Fraction) -> "LinComb":
        if not isinstance(k, (int, Fraction)):
            return NotImplemented
        return LinComb({c: q * k for c, q in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, LinComb):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    # --- texto / json ---
    def __str__(self) -> str:
        if not self._terms:
            return "0"
        out: list[str] = []
        for idx, (c, q) in enumerate(self.items()):
            body = f"{_format_coeff(q)}({format_composition(c, compress=False)})"
            if idx == 0:
                out.append(("-" if q < 0 else "") + body)
            else:
                out.append((" - " if q < 0 else " + ") + body)
        return "".join(out)

    def __repr__(self) -> str:
        return f"LinComb({self})"

    def to_json(self) -> dict:
        return {
            "terms": [
                {"coeff": {"num": str(q.numerator), "den": str(q.denominator)}, "composition": list(c)}
                for c, q in self.items()
            ]
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "LinComb":
        return cls(
            (tuple(t["composition"]), Fraction(int(t["coeff"]["num"]), int(t["coeff"]["den"])))
            for t in data.get("terms", [])
        )


Operand = Union[Composition, LinComb]

# ================== STUFFLE ==================


@lru_cache(maxsize=_MEMO)
def _stuffle(x: tuple, y: tuple) -> tuple:
    if not x:
        return ((y, 1),)
    if not y:
        return ((x, 1),)
    acc: defaultdict[tuple, int] = defaultdict(int)
    s, t = x[0], y[0]
    for tail, k in _stuffle_sorted(x[1:], y):
        acc[(s,) + tail] += k
    for tail, k in _stuffle_sorted(x, y[1:]):
        acc[(t,) + tail] += k
    for tail, k in _stuffle_sorted(x[1:], y[1:]):
        acc[(s + t,) + tail] += k
    return tuple(acc.items())


def _stuffle_sorted(x: tuple, y: tuple) -> tuple:
    x, y = tuple(x), tuple(y)
    return _stuffle(x, y) if x <= y else _stuffle(y, x)


def _as_composition(x: Iterable[int]) -> Composition:
    return x if isinstance(x, Composition) else Composition(x)


def _bilinear(op: Callable[[Composition, Composition], LinComb], x: Operand, y: Operand) -> LinComb:
    xs = x if isinstance(x, LinComb) else LinComb.of(_as_composition(x))
    ys = y if isinstance(y, LinComb) else LinComb.of(_as_composition(y))
    acc: defaultdict[Composition, Fraction] = defaultdict(Fraction)
    for cx, kx in xs.items():
        for cy, ky in ys.items():
            for c, k in op(cx, cy).items():
                acc[c] += kx * ky * k
    return LinComb(acc)


def stuffle(x: Operand, y: Operand) -> LinComb:
    """Producto cuasi-shuffle; (s)·x′ ∗ (t)·y′ = (s)(x′∗y) + (t)(x∗y′) + (s+t)(x′∗y′)."""
    if isinstance(x, LinComb) or isinstance(y, LinComb):
        return _bilinear(stuffle, x, y)
    return LinComb(_stuffle_sorted(_as_composition(x), _as_composition(y)))


# ================== SHUFFLE ==================


@lru_cache(maxsize=_MEMO)
def _shuffle(u: str, v: str) -> tuple:
    if not u:
        return ((v, 1),)
    if not v:
        return ((u, 1),)
    acc: defaultdict[str, int] = defaultdict(int)
    for tail, k in _shuffle_sorted(u[1:], v):
        acc[u[0] + tail] += k
    for tail, k in _shuffle_sorted(u, v[1:]):
        acc[v[0] + tail] += k
    return tuple(acc.items())


def _shuffle_sorted(u: str, v: str) -> tuple:
    u, v = str(u), str(v)
    return _shuffle(u, v) if u <= v else _shuffle(v, u)


def shuffle_words(u: str, v: str) -> Counter[Word]:
    """Intercalaciones de dos palabras con multiplicidad; masa total = C(|u|+|v|, |u|)."""
    Word(u), Word(v)
    return Counter({Word._trusted(w): k for w, k in _shuffle_sorted(u, v)})


def _check_shuffle_operand(x: Composition) -> None:
    if not x or tuple(x) == (1,):
        return
    require_convergent(x)


def shuffle(x: Operand, y: Operand) -> LinComb:
    """Codifica ambos factores, intercala las palabras y decodifica cada término."""
    if isinstance(x, LinComb) or isinstance(y, LinComb):
        return _bilinear(shuffle, x, y)
    x, y = _as_composition(x), _as_composition(y)
    _check_shuffle_operand(x)
    _check_shuffle_operand(y)
    acc: dict[Composition, int] = {}
    for w, k in _shuffle_sorted(letters_of(x), letters_of(y)):
        try:
            acc[peel_word(w)] = k
        except NotAdmissibleError as e:
            raise InconsistencyError(f"palabra no decodificable en {x} ⧢ {y}: {w!r}") from e
    return LinComb(acc)


# ================== DOBLE SHUFFLE ==================


def dsr(g: Composition, z: Composition) -> LinComb:
    """
    g ⧢ z − g ∗ z. Para g = (1) el único término divergente (1, z) se cancela;
    si sobrevive alguno es un fallo interno.
    """
    g, z = _as_composition(g), _as_composition(z)
    require_convergent(z)
    if not g.convergent() and tuple(g) != (1,):
        raise DivergentError(g, f"solo se regulariza el factor (1); recibido {g}")
    rel = shuffle(g, z) - stuffle(g, z)
    if rel.has_divergent():
        raise InconsistencyError(f"términos divergentes residuales en dsr({g}, {z}): {rel.divergent_terms()}")
    return rel
