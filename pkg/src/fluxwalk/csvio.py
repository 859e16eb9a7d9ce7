"""Atomic CSV output with round-trip-exact float formatting."""

from __future__ import annotations

import csv
import os
import tempfile
from pathlib import Path


def format_value(value) -> str:
    """Render a cell: floats at 17 significant digits (lossless for doubles),
    everything else via str."""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_csv(path, header, rows) -> None:
    """Write one CSV atomically: a temp file in the target directory is
    renamed into place only after every row is on disk, so a failed run
    never leaves a partial or empty output file."""
    target = Path(path)
    directory = target.parent if str(target.parent) else Path(".")
    fd, tmp_name = tempfile.mkstemp(dir=directory, prefix=target.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_value(cell) for cell in row])
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp_name, target)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    """Read back a CSV as (header, rows of strings)."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        return header, [row for row in reader]
