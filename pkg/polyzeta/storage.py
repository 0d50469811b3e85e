# polyzeta/storage.py
"""
Caché de conjuntos de relaciones en disco (JSON) y exportación CSV de matrices.

Ruta: <data_dir>/relations/w{w}-f{familias}-{dual|nodual}-{modo}.json
Un archivo con otro esquema u otro hash de generador se ignora y se regenera.
"""

from __future__ import annotations

import hashlib
import json
import logging
from fractions import Fraction
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from polyzeta.core import Composition
from polyzeta.engine import GENERATOR_VERSION, Mode, RationalMatrix, Relation, RelationSet, generate_relations, parse_families
from polyzeta.errors import InconsistencyError
from polyzeta.oracle import LinComb
from polyzeta.settings import get_settings

logger = logging.getLogger(__name__)

SCHEMA = 1


class Rational(BaseModel):
    num: str
    den: str


class TermRecord(BaseModel):
    coeff: Rational
    composition: list[int]


class RelationRecord(BaseModel):
    family: str
    source: list[int]
    terms: list[TermRecord]


class RelationFile(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(SCHEMA, alias="schema")
    weight: int
    flags: dict[str, str | bool | list[str]]
    generator: str
    hash: str
    relations: list[RelationRecord]


def generator_hash(version: str = GENERATOR_VERSION) -> str:
    return hashlib.sha256(version.encode("utf-8")).hexdigest()


def cache_path(w: int, families, duality: bool, mode: Mode | str, data_dir: Path | str | None = None) -> Path:
    base = Path(data_dir) if data_dir is not None else get_settings().data_dir
    fams = "-".join(parse_families(families)) or "none"
    tag = "dual" if duality else "nodual"
    return base / "relations" / f"w{w}-f{fams}-{tag}-{Mode(mode).value}.json"


# ----------------------------
# RelationSet <-> RelationFile
# ----------------------------

def to_file(rs: RelationSet) -> RelationFile:
    records = []
    for rel in rs.relations:
        terms = [
            TermRecord(coeff=Rational(num=str(q.numerator), den=str(q.denominator)), composition=list(c))
            for c, q in rel.body.items()
        ]
        records.append(RelationRecord(family=rel.family, source=list(rel.source), terms=terms))
    return RelationFile(
        schema_version=SCHEMA,
        weight=rs.weight,
        flags={"families": list(rs.families), "duality": rs.duality, "mode": rs.mode.value},
        generator=GENERATOR_VERSION,
        hash=generator_hash(),
        relations=records,
    )


def from_file(data: RelationFile) -> RelationSet:
    relations = []
    for rec in data.relations:
        body = LinComb(
            (tuple(t.composition), Fraction(int(t.coeff.num), int(t.coeff.den))) for t in rec.terms
        )
        relations.append(Relation(body, rec.family, Composition(rec.source)))
    flags = data.flags
    return RelationSet(
        weight=data.weight,
        relations=relations,
        families=tuple(flags.get("families", [])),
        duality=bool(flags.get("duality", False)),
        mode=Mode(flags.get("mode", Mode.CLOSED.value)),
    )


def dump_json(rs: RelationSet) -> str:
    return json.dumps(to_file(rs).model_dump(mode="json", by_alias=True), ensure_ascii=False, indent=2)


def save_relations(rs: RelationSet, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_json(rs) + "\n", encoding="utf-8")
    return path


def load_relations(path: Path) -> RelationSet | None:
    """None si falta el archivo, no se puede leer o fue generado por otra versión."""
    if not path.exists():
        return None
    try:
        data = RelationFile.model_validate_json(path.read_text(encoding="utf-8"))
    except (ValidationError, ValueError) as e:
        logger.warning("caché ilegible %s: %s", path, e)
        return None
    if data.schema_version != SCHEMA or data.hash != generator_hash():
        logger.info("caché obsoleta %s (schema=%s): se regenera", path, data.schema_version)
        return None
    try:
        return from_file(data)
    except (InconsistencyError, ValueError, ZeroDivisionError) as e:
        logger.warning("caché con relaciones inválidas %s: %s", path, e)
        return None


def get_or_generate(
    w: int,
    families=None,
    duality: bool = False,
    mode: Mode | str = Mode.CLOSED,
    data_dir: Path | str | None = None,
    use_cache: bool = True,
) -> RelationSet:
    """Lee el conjunto de relaciones de la caché o lo genera y lo guarda."""
    fams = parse_families(families)
    path = cache_path(w, fams, duality, mode, data_dir)
    if use_cache:
        cached = load_relations(path)
        if cached is not None:
            logger.info("caché: %s", path)
            return cached
    rs = generate_relations(w, fams, duality, mode)
    if use_cache:
        save_relations(rs, path)
        logger.info("caché escrita: %s", path)
    return rs


def write_matrix_csv(m: RationalMatrix, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(m.to_csv(), encoding="utf-8")
    return path
