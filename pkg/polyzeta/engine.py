# polyzeta/engine.py
"""
Motor de relaciones de doble shuffle.

- generate_relations: familias g ∈ {1, 2, 3, 21} (forma cerrada u oráculo) y,
  opcionalmente, relaciones de dualidad z − z°.
- assemble_matrix / exact_rref: matriz racional exacta sobre la base ordenada
  por ≺ y forma escalonada reducida (sympy DomainMatrix sobre QQ).
- hoffman_reduce: rango esperado 2^(w−2) − δ_w y columnas libres = composiciones {2,3}.
- verify_numeric: residuos numéricos relativos de cada relación.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable

from pydantic import BaseModel
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from polyzeta import oracle
from polyzeta.closedforms import LEFT_FACTORS, closed_dsr, left_key
from polyzeta.core import Composition, dual, format_composition, is_hoffman
from polyzeta.counting import hoffman_dim, n_total
from polyzeta.errors import InconsistencyError, PolyzetaError, ToleranceUnreachable
from polyzeta.numeric import eval_mzv
from polyzeta.oracle import LinComb
from polyzeta.ordering import Order, compare, enumerate_weight
from polyzeta.settings import get_settings

logger = logging.getLogger(__name__)

FAMILY_KEYS: tuple[str, ...] = ("1", "2", "3", "21")
DUALITY = "duality"

# Cambia cuando cambian las formas cerradas; invalida la caché de relaciones.
GENERATOR_VERSION = "polyzeta-dsr/1 closed(1,2 exact; 3,21 oracle-completed)"


class Mode(str, Enum):
    CLOSED = "closed"
    ORACLE = "oracle"


def parse_families(text: str | Iterable[str] | None) -> tuple[str, ...]:
    """ "1,2,3,21" → ("1", "2", "3", "21") en orden canónico; "" → ()."""
    if text is None:
        return FAMILY_KEYS
    items = text.split(",") if isinstance(text, str) else list(text)
    keys = {left_key(x) for x in items if str(x).strip()}
    return tuple(k for k in FAMILY_KEYS if k in keys)


# ================== RELACIONES ==================


@dataclass(frozen=True)
class Relation:
    body: LinComb
    family: str
    source: Composition

    def __post_init__(self):
        if self.body.has_divergent():
            raise InconsistencyError(f"relación {self.family} z={self.source} con términos divergentes")

    @property
    def provenance(self) -> str:
        if self.family == DUALITY:
            return f"duality {format_composition(self.source)}"
        return f"g=({format_composition(LEFT_FACTORS[self.family], compress=False)}) z={format_composition(self.source)}"


@dataclass
class RelationSet:
    weight: int
    relations: list[Relation]
    families: tuple[str, ...]
    duality: bool
    mode: Mode = Mode.CLOSED

    def __len__(self) -> int:
        return len(self.relations)

    def by_family(self) -> dict[str, list[Relation]]:
        out: dict[str, list[Relation]] = {}
        for rel in self.relations:
            out.setdefault(rel.family, []).append(rel)
        return out


def expected_relation_count(w: int, families: Iterable[str] = FAMILY_KEYS) -> int:
    total = 0
    for key in parse_families(list(families)):
        zw = w - LEFT_FACTORS[key].weight
        if zw >= 2:
            total += n_total(zw)
    return total


def duality_relations(w: int) -> list[Relation]:
    """Una relación z − z° por par no autodual, emitida en el miembro ≺-menor."""
    out = []
    for z in enumerate_weight(w):
        zd = dual(z)
        if compare(z, zd) is Order.LESS:
            out.append(Relation(LinComb({z: 1, zd: -1}), DUALITY, z))
    return out


def generate_relations(
    w: int,
    families: Iterable[str] | str | None = FAMILY_KEYS,
    include_duality: bool = False,
    mode: Mode | str = Mode.CLOSED,
) -> RelationSet:
    if w < 2:
        raise PolyzetaError(f"peso {w} < 2")
    keys = parse_families(families)
    mode = Mode(mode)
    relations: list[Relation] = []
    for key in keys:
        g = LEFT_FACTORS[key]
        zw = w - g.weight
        if zw < 2:
            logger.info("familia g=(%s) omitida en w=%d: no hay z de peso %d", format_composition(g, compress=False), w, zw)
            continue
        for z in enumerate_weight(zw):
            body = closed_dsr(key, z) if mode is Mode.CLOSED else oracle.dsr(g, z)
            relations.append(Relation(body, key, z))
    if include_duality:
        relations.extend(duality_relations(w))
    logger.info("w=%d familias=%s dualidad=%s modo=%s: %d relaciones",
                w, ",".join(keys) or "-", include_duality, mode.value, len(relations))
    return RelationSet(weight=w, relations=relations, families=keys, duality=include_duality, mode=mode)


def compare_modes(w: int, families: Iterable[str] | str | None = FAMILY_KEYS) -> list[str]:
    """Relaciones donde la forma cerrada y el oráculo no coinciden (vacío si todo coincide)."""
    closed = generate_relations(w, families, mode=Mode.CLOSED)
    truth = generate_relations(w, families, mode=Mode.ORACLE)
    return [
        a.provenance for a, b in zip(closed.relations, truth.relations)
        if a.body != b.body or a.source != b.source
    ]


# ================== MATRIZ ==================


def _fraction_text(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass
class RationalMatrix:
    weight: int
    columns: tuple[Composition, ...]
    rows: list[dict[int, Fraction]]
    labels: list[str] = field(default_factory=list)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.columns))

    def entry(self, r: int, c: int) -> Fraction:
        return self.rows[r].get(c, Fraction(0))

    def to_domain_matrix(self) -> DomainMatrix:
        data = {
            r: {c: QQ(q.numerator, q.denominator) for c, q in row.items()}
            for r, row in enumerate(self.rows) if row
        }
        return DomainMatrix(data, self.shape, QQ)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([format_composition(c) for c in self.columns])
        n_rows, n_cols = self.shape
        for r in range(n_rows):
            writer.writerow([_fraction_text(self.entry(r, c)) for c in range(n_cols)])
        return buf.getvalue()


def column_order(w: int, hoffman_last: bool = False) -> tuple[Composition, ...]:
    cols = enumerate_weight(w)
    if not hoffman_last:
        return cols
    return tuple(c for c in cols if not is_hoffman(c)) + tuple(c for c in cols if is_hoffman(c))


def assemble_matrix(rs: RelationSet, hoffman_last: bool = False) -> RationalMatrix:
    columns = column_order(rs.weight, hoffman_last)
    index = {c: i for i, c in enumerate(columns)}
    rows: list[dict[int, Fraction]] = []
    for rel in rs.relations:
        row = {}
        for c, q in rel.body.items():
            if c not in index:
                raise InconsistencyError(f"término {c} fuera de la base de peso {rs.weight} ({rel.provenance})")
            row[index[c]] = q
        rows.append(row)
    return RationalMatrix(rs.weight, columns, rows, [rel.provenance for rel in rs.relations])


# ================== REDUCCIÓN ==================


class HoffmanReport(BaseModel):
    weight: int
    families: list[str]
    duality: bool
    mode: str
    relations: int
    rank: int
    expected_rank: int
    free_columns: list[str]
    hoffman_columns: list[str]
    families_rank: int
    duality_rank: int
    ranks_diverge: bool
    ok: bool
    failures: list[str] = []


@dataclass
class ReductionResult:
    weight: int
    rank: int
    columns: tuple[Composition, ...]
    pivot_columns: tuple[Composition, ...]
    free_columns: tuple[Composition, ...]
    reduction: dict[Composition, LinComb]
    hoffman: HoffmanReport | None = None

    def table_lines(self) -> list[str]:
        return [f"({format_composition(c, compress=False)}) = {self.reduction[c]}" for c in self.pivot_columns]


def _to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def exact_rref(m: RationalMatrix) -> ReductionResult:
    """
    Forma escalonada reducida exacta. Cada fila pivote r con pivote p da
    x_p = −Σ_{c libre} R[r, c] · x_c.
    """
    n_rows, n_cols = m.shape
    if n_rows == 0 or not any(m.rows):
        return ReductionResult(m.weight, 0, m.columns, (), m.columns, {})

    reduced, pivots = m.to_domain_matrix().rref()
    sparse = reduced.to_sparse().rep
    pivots = tuple(pivots)
    reduction: dict[Composition, LinComb] = {}
    for r, p in enumerate(pivots):
        row = sparse.get(r, {})
        reduction[m.columns[p]] = LinComb(
            {m.columns[c]: -_to_fraction(v) for c, v in row.items() if c != p}
        )
    pivot_set = set(pivots)
    return ReductionResult(
        weight=m.weight,
        rank=len(pivots),
        columns=m.columns,
        pivot_columns=tuple(m.columns[p] for p in pivots),
        free_columns=tuple(c for i, c in enumerate(m.columns) if i not in pivot_set),
        reduction=reduction,
    )


def matrix_rank(w: int, relations: list[Relation]) -> int:
    """Rango exacto de un subconjunto de relaciones de peso w."""
    m = assemble_matrix(RelationSet(w, relations, (), False))
    if not any(m.rows):
        return 0
    return m.to_domain_matrix().rank()


def _paired_ranks(rs: RelationSet, rank: int) -> tuple[int, int]:
    """(rango solo familias, rango con dualidad); uno de los dos ya es `rank`."""
    family_rels = [rel for rel in rs.relations if rel.family != DUALITY]
    if rs.duality:
        return matrix_rank(rs.weight, family_rels), rank
    return rank, matrix_rank(rs.weight, family_rels + duality_relations(rs.weight))


def substitute(x: LinComb, reduction: dict[Composition, LinComb]) -> LinComb:
    """Reemplaza cada composición dependiente por su expresión en las columnas libres."""
    acc = LinComb()
    for c, q in x.items():
        acc = acc + (reduction[c] * q if c in reduction else LinComb.of(c, q))
    return acc


def hoffman_reduce(
    w: int,
    families: Iterable[str] | str | None = FAMILY_KEYS,
    include_duality: bool = False,
    mode: Mode | str = Mode.CLOSED,
    relations: RelationSet | None = None,
) -> ReductionResult:
    """generate → assemble(hoffman_last) → exact_rref, con reporte estructurado del criterio de Hoffman."""
    if w < 4:
        raise PolyzetaError(f"hoffman_reduce requiere w ≥ 4 (recibido {w})")
    rs = relations if relations is not None else generate_relations(w, families, include_duality, mode)
    result = exact_rref(assemble_matrix(rs, hoffman_last=True))

    expected = n_total(w) - hoffman_dim(w)
    hoffman_cols = tuple(c for c in enumerate_weight(w) if is_hoffman(c))
    failures: list[str] = []
    if result.rank != expected:
        failures.append(f"rango {result.rank} ≠ esperado {expected}")
    for c in result.free_columns:
        if not is_hoffman(c):
            failures.append(f"columna libre no Hoffman: ({format_composition(c, compress=False)})")
    for c in hoffman_cols:
        if c in result.reduction:
            failures.append(f"columna Hoffman dependiente: ({format_composition(c, compress=False)})")

    families_rank, duality_rank = _paired_ranks(rs, result.rank)
    if families_rank != duality_rank:
        logger.info("w=%d: rango de familias %d ≠ rango con dualidad %d", w, families_rank, duality_rank)

    result.hoffman = HoffmanReport(
        weight=w,
        families=list(rs.families),
        duality=rs.duality,
        mode=rs.mode.value,
        relations=len(rs),
        rank=result.rank,
        expected_rank=expected,
        free_columns=[format_composition(c, compress=False) for c in result.free_columns],
        hoffman_columns=[format_composition(c, compress=False) for c in hoffman_cols],
        ok=not failures,
        failures=failures,
        families_rank=families_rank,
        duality_rank=duality_rank,
        ranks_diverge=families_rank != duality_rank,
    )
    if failures:
        logger.warning("w=%d: criterio de Hoffman no satisfecho: %s", w, "; ".join(failures))
    return result


# ================== VERIFICACIÓN NUMÉRICA ==================


class NumericFailure(BaseModel):
    relation: str
    provenance: str
    residual: float
    ratio: float


class NumericReport(BaseModel):
    weight: int
    tol: float
    checked: int
    worst: dict[str, float]
    failures: list[NumericFailure] = []
    unreachable: list[str] = []
    ok: bool


def _term_value(c: Composition, tol: float, unreachable: set[str]) -> float:
    try:
        return eval_mzv(c, tol).value
    except ToleranceUnreachable as e:
        unreachable.add(format_composition(c, compress=False))
        return e.result.value


def verify_numeric(rs: RelationSet, tol: float) -> NumericReport:
    """|Σ coef·ζ(t)| ≤ tol · Σ |coef|·|ζ(t)| para cada relación; peor cociente por familia."""
    s = get_settings()
    term_tol = max(tol * 0.1, s.numeric_min_tol)
    unreachable: set[str] = set()
    worst: dict[str, float] = {}
    failures: list[NumericFailure] = []
    for rel in rs.relations:
        parts = [(float(q), _term_value(c, term_tol, unreachable)) for c, q in rel.body.items()]
        residual = math.fsum(q * v for q, v in parts)
        scale = math.fsum(abs(q) * abs(v) for q, v in parts)
        ratio = abs(residual) / scale if scale else 0.0
        worst[rel.family] = max(worst.get(rel.family, 0.0), ratio)
        if ratio > tol:
            failures.append(NumericFailure(
                relation=str(rel.body), provenance=rel.provenance, residual=residual, ratio=ratio,
            ))
    for name in sorted(unreachable):
        logger.warning("ζ(%s): se usó la mejor estimación disponible", name)
    return NumericReport(
        weight=rs.weight, tol=tol, checked=len(rs), worst=worst,
        failures=failures, unreachable=sorted(unreachable), ok=not failures,
    )
