"""
Result emission - JSON and CSV

Every file is written atomically: a temp file in the target directory,
then os.replace. Rationals are expected to arrive already as "num/den".
"""
import csv
import io
import json
import os
import tempfile
from pathlib import Path

from pydantic import BaseModel
from rich.console import Console

console = Console(stderr=True)


def atomic_write_text(path: Path, text: str) -> Path:
    """Write text to path via a sibling temp file and os.replace."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def to_jsonable(data):
    if isinstance(data, BaseModel):
        return data.model_dump(mode="json")
    if hasattr(data, "to_json_dict"):
        return data.to_json_dict()
    if isinstance(data, list):
        return [to_jsonable(x) for x in data]
    return data


def render_json(data) -> str:
    return json.dumps(to_jsonable(data), indent=2, ensure_ascii=False) + "\n"


def render_csv(rows: list[dict], headers: list[str] | None = None) -> str:
    headers = headers or (list(rows[0].keys()) if rows else [])
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=headers, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def write_json(data, path: Path) -> Path:
    return atomic_write_text(path, render_json(data))


def emit(data, fmt: str = "json", out: Path | None = None, rows: list[dict] | None = None,
         headers: list[str] | None = None) -> None:
    """
    Send a result to --out or stdout.

    fmt="csv" uses `rows` (falling back to `data` when it is already a list of dicts).
    """
    if fmt == "csv":
        text = render_csv(rows if rows is not None else data, headers)
    else:
        text = render_json(data)

    if out is None:
        print(text, end="")
        return
    atomic_write_text(out, text)
    console.print(f"[green]✓ Wrote {out}[/]")
