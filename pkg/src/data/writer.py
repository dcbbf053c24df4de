"""
Output artifacts of a run: CSV curves, gnuplot data blocks and the run manifest.

All files are written atomically (temporary file in the target directory, then
replace). Numbers use fixed scientific notation with 10 significant digits so that
identical runs produce identical bytes.
"""

import hashlib
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from datetime import UTC, datetime
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any

import pandas as pd

from config import CSV_FLOAT_FORMAT, MANIFEST_FILENAME
from utils.logging import get_logger

logger = get_logger(__name__)

PACKAGE_NAME = "multiscatter"


class WriterError(Exception):
    """Base exception for output writing errors."""

    pass


def package_version() -> str:
    """Installed package version, or 'dev' when running from a source tree."""
    try:
        return version(PACKAGE_NAME)
    except PackageNotFoundError:
        return "dev"


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _atomic_write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except OSError as e:
        Path(tmp_name).unlink(missing_ok=True)
        raise WriterError(f"cannot write {path}: {e}") from e
    return path


def write_csv(df: pd.DataFrame, path: Path) -> Path:
    """Write a result frame as CSV with stable column order and %.9e floats."""
    text = df.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n", na_rep="nan")
    _atomic_write_text(path, text)
    logger.debug("Wrote %s (%d rows)", path, len(df))
    return path


def _format_value(value: Any) -> str:
    if isinstance(value, int | float) and not isinstance(value, bool):
        return CSV_FLOAT_FORMAT % value
    return str(value)


def write_gnuplot(
    df: pd.DataFrame, path: Path, x_column: str, series_columns: list[str]
) -> Path:
    """
    Write one whitespace-separated block per series for gnuplot's `index`.

    Blocks are separated by two blank lines; each starts with a comment naming the series
    and the numeric columns.
    """
    missing = [c for c in [x_column, *series_columns] if c not in df.columns]
    if missing:
        raise WriterError(f"columns not in result frame: {missing}")
    value_columns = [
        c
        for c in df.columns
        if c != x_column and c not in series_columns and pd.api.types.is_numeric_dtype(df[c])
    ]
    columns = [x_column, *value_columns]

    blocks = []
    groups = df.groupby(series_columns, sort=False) if series_columns else [((), df)]
    for key, group in groups:
        key = key if isinstance(key, tuple) else (key,)
        label = " ".join(f"{c}={v}" for c, v in zip(series_columns, key, strict=True))
        lines = [f"# {label}".rstrip(), "# " + " ".join(columns)]
        for row in group[columns].itertuples(index=False):
            lines.append(" ".join(_format_value(v) for v in row))
        blocks.append("\n".join(lines))

    _atomic_write_text(path, "\n\n\n".join(blocks) + "\n")
    return path


@dataclass
class RunManifest:
    """Everything needed to reproduce a run and verify its outputs."""

    command: str
    config: dict[str, Any]
    seed: int
    version: str = field(default_factory=package_version)
    wall_time_s: float = 0.0
    created_at: str = field(default_factory=lambda: datetime.now(UTC).isoformat())
    outputs: dict[str, str] = field(default_factory=dict)

    def add_output(self, path: Path) -> None:
        self.outputs[path.name] = sha256_file(path)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunManifest":
        try:
            return cls(**data)
        except TypeError as e:
            raise WriterError(f"malformed manifest: {e}") from e

    def write(self, out_dir: Path, filename: str = MANIFEST_FILENAME) -> Path:
        text = json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str) + "\n"
        return _atomic_write_text(out_dir / filename, text)


def load_manifest(path: Path) -> RunManifest:
    try:
        with open(path, encoding="utf-8") as f:
            return RunManifest.from_dict(json.load(f))
    except (OSError, json.JSONDecodeError) as e:
        raise WriterError(f"cannot read manifest {path}: {e}") from e


def write_result(
    df: pd.DataFrame,
    out_dir: Path,
    stem: str,
    x_column: str,
    series_columns: list[str],
    manifest: RunManifest | None = None,
) -> list[Path]:
    """CSV plus gnuplot .dat for one result frame; digests are added to the manifest."""
    paths = [
        write_csv(df, out_dir / f"{stem}.csv"),
        write_gnuplot(df, out_dir / f"{stem}.dat", x_column, series_columns),
    ]
    if manifest is not None:
        for path in paths:
            manifest.add_output(path)
    logger.info("Wrote %s", ", ".join(str(p) for p in paths))
    return paths
