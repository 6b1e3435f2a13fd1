"""
On-disk cache for eigenvalue tables and the character memo.

One JSON file per (n, p): eigen_n{n}_p{num}-{den}.json. A file is trusted only
if it parses, its contents agree with its name, every partition of n is present
and the table passes its invariants; anything else is recomputed with a warning.
Memo entries are re-derived by Murnaghan-Nakayama before they are admitted;
one bad entry discards the whole memo file.
"""
import json
import re
import time
from fractions import Fraction
from pathlib import Path

from rich.console import Console

from characters import TABLE, CharacterTable
from config import CacheCorruptError, IdentityCheckError, MemoConflictError, WalkParams, format_rational, get_cache_dir
from export_results import write_json
from partitions import CycleType, Partition
from spectrum import EigenvalueTable, build_table

console = Console(stderr=True)

MEMO_FILE = "characters_memo.json"
_NAME = re.compile(r"^eigen_n(\d+)_p(\d+)-(\d+)\.json$")


def cache_filename(params: WalkParams) -> str:
    p = params.p
    return f"eigen_n{params.n}_p{p.numerator}-{p.denominator}.json"


def cache_path(params: WalkParams, cache_dir: Path | None = None) -> Path:
    return Path(cache_dir or get_cache_dir()) / cache_filename(params)


def save_table(table: EigenvalueTable, cache_dir: Path | None = None) -> Path:
    return write_json(table.to_json_dict(), cache_path(table.params, cache_dir))


def load_table(path: Path) -> EigenvalueTable:
    """Read a cached table; CacheCorruptError on a name mismatch, a missing partition or a broken invariant."""
    path = Path(path)
    match = _NAME.match(path.name)
    if not match:
        raise CacheCorruptError(f"not an eigenvalue cache file: {path.name}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        table = EigenvalueTable.from_json_dict(data)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise CacheCorruptError(f"{path.name}: {e}") from e

    n, num, den = (int(g) for g in match.groups())
    if table.params.n != n or table.params.p != Fraction(num, den):
        raise CacheCorruptError(
            f"{path.name}: contents are n={table.params.n}, p={format_rational(table.params.p)}"
        )
    try:
        table.check_invariants()
    except IdentityCheckError as e:
        raise CacheCorruptError(f"{path.name}: {e}") from e
    return table


def cache_roundtrip(table: EigenvalueTable, cache_dir: Path) -> EigenvalueTable:
    """Write then read back; the result must equal the input exactly."""
    return load_table(save_table(table, cache_dir))


def load_or_build_table(
    params: WalkParams,
    cache_dir: Path | None = None,
    verbose: bool = False,
    unsafe: bool = False,
) -> EigenvalueTable:
    path = cache_path(params, cache_dir)
    start = time.perf_counter()

    if path.exists():
        try:
            table = load_table(path)
            if verbose:
                console.print(f"[dim]cache hit {path.name} ({time.perf_counter() - start:.3f}s)[/]")
            return table
        except CacheCorruptError as e:
            console.print(f"[yellow]⚠ Ignoring corrupt cache file, recomputing: {e}[/]")

    table = build_table(params, unsafe=unsafe)
    save_table(table, cache_dir)
    if verbose:
        console.print(f"[dim]cache miss {path.name}, built in {time.perf_counter() - start:.3f}s[/]")
    return table


def warm_cache(n_values, p, cache_dir: Path | None = None, unsafe: bool = False) -> list[Path]:
    paths = []
    for n in n_values:
        params = WalkParams(n=n, p=p)
        load_or_build_table(params, cache_dir, unsafe=unsafe)
        paths.append(cache_path(params, cache_dir))
        console.print(f"[green]✓ {cache_filename(params)}[/]")
    return paths


# --- Character memo ---

def save_memo(cache_dir: Path | None = None, table: CharacterTable = TABLE) -> Path:
    return write_json(table.dump(), Path(cache_dir or get_cache_dir()) / MEMO_FILE)


def check_memo_entries(entries) -> None:
    """Raise CacheCorruptError unless every "lambda|alpha" entry equals a fresh MN value."""
    if not isinstance(entries, dict):
        raise CacheCorruptError("memo must be a JSON object")
    reference = CharacterTable()
    for key, v in entries.items():
        try:
            lam_text, alpha_text = key.split("|")
            lam = Partition.parse(lam_text)
            alpha = CycleType.parse(alpha_text, lam.n)
            value = int(v)
        except (TypeError, ValueError) as e:
            raise CacheCorruptError(f"bad memo entry {key!r}: {e}") from e
        expected = reference.value(lam, alpha)
        if value != expected:
            raise CacheCorruptError(f"memo entry {key} = {value}, expected {expected}")


def load_memo(cache_dir: Path | None = None, table: CharacterTable = TABLE) -> int:
    """Seed the character memo from disk; returns the number of entries loaded (0 if absent or discarded)."""
    path = Path(cache_dir or get_cache_dir()) / MEMO_FILE
    if not path.exists():
        return 0
    try:
        with open(path, "r", encoding="utf-8") as f:
            entries = json.load(f)
        check_memo_entries(entries)
        return table.load(entries)
    except (OSError, json.JSONDecodeError, CacheCorruptError, MemoConflictError) as e:
        console.print(f"[yellow]⚠ Ignoring corrupt memo {path.name}, recomputing: {e}[/]")
        return 0


# --- Maintenance ---

def inspect_cache(cache_dir: Path | None = None) -> list[dict]:
    rows = []
    for path in sorted(Path(cache_dir or get_cache_dir()).glob("*.json")):
        row = {"file": path.name, "bytes": path.stat().st_size, "n": None, "p": None, "entries": None, "valid": True}
        if path.name == MEMO_FILE:
            try:
                row["entries"] = len(json.loads(path.read_text(encoding="utf-8")))
            except (OSError, json.JSONDecodeError):
                row["valid"] = False
        else:
            try:
                table = load_table(path)
                row.update(n=table.params.n, p=format_rational(table.params.p), entries=len(table.values))
            except CacheCorruptError:
                row["valid"] = False
        rows.append(row)
    return rows


def clear_cache(cache_dir: Path | None = None) -> int:
    removed = 0
    for path in Path(cache_dir or get_cache_dir()).glob("*.json"):
        path.unlink()
        removed += 1
    return removed
