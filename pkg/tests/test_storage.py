# tests/test_storage.py
import json

import pytest

from polyzeta.engine import generate_relations
from polyzeta.storage import (
    SCHEMA, cache_path, generator_hash, get_or_generate, load_relations, save_relations,
)


def test_cache_path_layout(isolated_settings):
    path = cache_path(6, "21,1,2,3", False, "closed")
    assert path == isolated_settings.data_dir / "relations" / "w6-f1-2-3-21-nodual-closed.json"
    assert cache_path(6, "1", True, "oracle", data_dir="x").name == "w6-f1-dual-oracle.json"


def test_get_or_generate_writes_and_reads(isolated_settings):
    rs = get_or_generate(6)
    path = cache_path(6, None, False, "closed")
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["schema"] == SCHEMA
    assert data["weight"] == 6
    assert data["hash"] == generator_hash()
    assert data["flags"] == {"families": ["1", "2", "3", "21"], "duality": False, "mode": "closed"}
    assert len(data["relations"]) == 16

    again = get_or_generate(6)
    assert [r.body for r in again.relations] == [r.body for r in rs.relations]
    assert [r.source for r in again.relations] == [r.source for r in rs.relations]


def test_stale_cache_is_ignored(tmp_path):
    path = tmp_path / "rels.json"
    save_relations(generate_relations(5, "1"), path)
    data = json.loads(path.read_text(encoding="utf-8"))
    data["hash"] = "0" * 64
    path.write_text(json.dumps(data), encoding="utf-8")
    assert load_relations(path) is None


def test_unreadable_cache_is_ignored(tmp_path):
    path = tmp_path / "rels.json"
    path.write_text("{not json", encoding="utf-8")
    assert load_relations(path) is None
    assert load_relations(tmp_path / "missing.json") is None


def test_fractions_survive_the_file(tmp_path):
    rs = generate_relations(5, "", include_duality=True)
    path = save_relations(rs, tmp_path / "dual.json")
    loaded = load_relations(path)
    assert loaded.duality
    assert [r.body for r in loaded.relations] == [r.body for r in rs.relations]


@pytest.mark.parametrize("bad_terms", [
    [{"coeff": {"num": "1", "den": "1"}, "composition": [1, 4]}],
    [{"coeff": {"num": "1", "den": "1"}, "composition": [3]}, {"coeff": {"num": "1", "den": "1"}, "composition": [4]}],
    [{"coeff": {"num": "1", "den": "0"}, "composition": [3, 2]}],
])
def test_cache_with_invalid_relations_is_regenerated(isolated_settings, bad_terms):
    path = cache_path(5, "1", False, "closed")
    save_relations(generate_relations(5, "1"), path)
    data = json.loads(path.read_text(encoding="utf-8"))
    data["relations"][0]["terms"] = bad_terms
    path.write_text(json.dumps(data), encoding="utf-8")
    assert load_relations(path) is None

    rs = get_or_generate(5, "1")
    assert len(rs) == 4
    assert load_relations(path) is not None
