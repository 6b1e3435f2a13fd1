import json
from fractions import Fraction

import pytest

from cache_store import (
    cache_filename,
    cache_path,
    cache_roundtrip,
    check_memo_entries,
    clear_cache,
    inspect_cache,
    load_memo,
    load_or_build_table,
    load_table,
    save_memo,
    save_table,
    warm_cache,
)
from characters import CharacterTable
from config import CacheCorruptError, MemoConflictError, WalkParams
from partitions import CycleType, Partition
from run_iwalk import main
from spectrum import build_table


@pytest.fixture
def params():
    return WalkParams(n=6, p=Fraction(2, 3))


def test_filename_encodes_n_and_p(params):
    assert cache_filename(params) == "eigen_n6_p2-3.json"
    assert cache_filename(WalkParams(n=4, p=0)) == "eigen_n4_p0-1.json"


def test_roundtrip_is_exact(params, tmp_path):
    table = build_table(params)
    assert cache_roundtrip(table, tmp_path) == table


def test_cache_dir_from_env(params, isolated_cache):
    assert cache_path(params).parent == isolated_cache


def test_renamed_file_is_rejected(params, tmp_path):
    path = save_table(build_table(params), tmp_path)
    renamed = path.with_name("eigen_n6_p1-2.json")
    path.rename(renamed)
    with pytest.raises(CacheCorruptError):
        load_table(renamed)


def test_foreign_filename_is_rejected(tmp_path):
    path = tmp_path / "notes.json"
    path.write_text("{}", encoding="utf-8")
    with pytest.raises(CacheCorruptError):
        load_table(path)


@pytest.mark.parametrize("payload", [
    "{not json",
    '{"n": 6, "p": "2/3"}',
    '{"n": 6, "p": "2/3", "psi": {"6": "one"}}',
    '{"n": 6, "p": "2/3", "psi": {"4,1": "1/2"}}',
])
def test_malformed_contents_are_rejected(params, tmp_path, payload):
    path = tmp_path / cache_filename(params)
    path.write_text(payload, encoding="utf-8")
    with pytest.raises(CacheCorruptError):
        load_table(path)


def test_corrupt_file_is_recomputed(params, tmp_path, capsys):
    path = tmp_path / cache_filename(params)
    path.write_text("{not json", encoding="utf-8")

    table = load_or_build_table(params, tmp_path)

    assert table == build_table(params)
    assert "corrupt cache file" in capsys.readouterr().err
    assert load_table(path) == table


def test_verbose_reports_miss_then_hit(params, tmp_path, capsys):
    load_or_build_table(params, tmp_path, verbose=True)
    first = capsys.readouterr()
    load_or_build_table(params, tmp_path, verbose=True)
    second = capsys.readouterr()

    assert "cache miss" in first.err
    assert "cache hit" in second.err
    assert first.out == second.out == ""


def test_memo_roundtrip(tmp_path):
    source = CharacterTable()
    expected = source.value(Partition.of(4, 2), CycleType.parse("2:3", 6))
    source.involution_value(Partition.of(3, 3), 2)
    save_memo(tmp_path, source)

    target = CharacterTable()
    assert load_memo(tmp_path, target) > 0
    assert target.value(Partition.of(4, 2), CycleType.parse("2:3", 6)) == expected


def test_memo_conflict_raises():
    target = CharacterTable()
    target.load({"3,1|1:2,2:1": "1"})
    with pytest.raises(MemoConflictError):
        target.load({"3,1|1:2,2:1": "7"})


def test_missing_memo_loads_nothing(tmp_path):
    assert load_memo(tmp_path, CharacterTable()) == 0


def test_inspect_and_clear(tmp_path):
    warm_cache([4, 6], Fraction(1, 2), tmp_path)
    (tmp_path / "eigen_n8_p1-2.json").write_text("[]", encoding="utf-8")

    rows = {row["file"]: row for row in inspect_cache(tmp_path)}
    assert rows["eigen_n4_p1-2.json"]["valid"]
    assert rows["eigen_n4_p1-2.json"]["entries"] == 5
    assert rows["eigen_n6_p1-2.json"]["entries"] == 11
    assert not rows["eigen_n8_p1-2.json"]["valid"]

    assert clear_cache(tmp_path) == 3
    assert inspect_cache(tmp_path) == []


def _write_table_file(directory, n: int, p: str, psi: dict) -> None:
    num, den = p.split("/")
    path = directory / f"eigen_n{n}_p{num}-{den}.json"
    path.write_text(json.dumps({"n": n, "p": p, "psi": psi}), encoding="utf-8")


def test_incomplete_table_is_rejected(tmp_path):
    _write_table_file(tmp_path, 4, "1/2", {"4": "1/1"})
    with pytest.raises(CacheCorruptError, match="missing 4 partitions"):
        load_table(tmp_path / "eigen_n4_p1-2.json")


def test_tampered_table_is_rejected(tmp_path):
    psi = build_table(WalkParams(n=4, p=Fraction(1, 2))).to_json_dict()["psi"]
    psi["2,2"] = "1/5"
    _write_table_file(tmp_path, 4, "1/2", psi)
    with pytest.raises(CacheCorruptError, match="closed form"):
        load_table(tmp_path / "eigen_n4_p1-2.json")


@pytest.mark.parametrize("psi", [
    {"4": "1/1"},
    {"4": "1/1", "3,1": "1/3", "2,2": "1/5", "2,1,1": "0/1", "1,1,1,1": "0/1"},
])
def test_bad_table_is_recomputed_by_cli(isolated_cache, capsys, psi):
    _write_table_file(isolated_cache, 4, "1/2", psi)
    assert main(["eigen", "--n", "4", "--p", "1/2"]) == 0
    out = capsys.readouterr()
    assert json.loads(out.out)["psi"] == {
        "4": "1/1", "3,1": "1/3", "2,2": "1/2", "2,1,1": "0/1", "1,1,1,1": "0/1",
    }
    assert "corrupt cache file" in out.err


@pytest.mark.parametrize("entries", [
    {"2,2|2:2": "0"},
    {"2,2|2:2": "two"},
    {"2,2": "2"},
    {"2,2|1:1,2:1": "2"},
    ["2,2|2:2", "2"],
])
def test_bad_memo_is_discarded(tmp_path, capsys, entries):
    (tmp_path / "characters_memo.json").write_text(json.dumps(entries), encoding="utf-8")
    target = CharacterTable()
    assert load_memo(tmp_path, target) == 0
    assert "corrupt memo" in capsys.readouterr().err
    assert target.value(Partition.of(2, 2), CycleType.parse("2:2", 4)) == 2


def test_check_memo_entries_accepts_true_values():
    check_memo_entries({"2,2|2:2": "2", "3,1|1:1,3:1": "0", "4,2|2:3": "3"})
    with pytest.raises(CacheCorruptError):
        check_memo_entries({"3,1|1:1,3:1": "1"})


def test_bad_memo_does_not_reach_eigenvalues(isolated_cache, capsys):
    assert main(["eigen", "--n", "4", "--p", "1/2"]) == 0
    capsys.readouterr()
    for path in isolated_cache.glob("eigen_*.json"):
        path.unlink()
    (isolated_cache / "characters_memo.json").write_text(json.dumps({"2,2|2:2": "0"}), encoding="utf-8")

    assert main(["eigen", "--n", "4", "--p", "1/2"]) == 0
    out = capsys.readouterr()
    assert json.loads(out.out)["psi"]["2,2"] == "1/2"
    assert "corrupt memo" in out.err
    assert json.loads((isolated_cache / "characters_memo.json").read_text(encoding="utf-8"))["2,2|2:2"] == "2"
