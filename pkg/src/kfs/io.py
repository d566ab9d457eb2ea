"""File formats: vectors files, flat config files, CSV tables and run manifests."""

from __future__ import annotations

import configparser
import csv
import io
import json
import os
import platform
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

QUASI_ORTH_COLUMNS = ["kernel", "n", "delta", "trials", "frequency", "ci_lo", "ci_hi"]
SEPARABILITY_COLUMNS = ["kernel", "n", "set_size", "trials", "frequency", "ci_lo", "ci_hi"]
VERIFY_COLUMNS = [
    "kernel", "n", "k", "delta", "epsilon", "event", "trials", "frequency", "ci_lo", "ci_hi",
    "bound_raw", "bound_clamped", "vacuous", "pass",
]  # fmt: skip
BETA_COLUMNS = ["kernel", "n", "radius", "volume_est", "beta_hat", "beta_ci_lo", "beta_ci_hi"]
BOUNDS_COLUMNS = [
    "bound", "kernel", "n", "k", "delta", "epsilon", "theta", "Delta", "A", "r", "C", "C_star",
    "beta", "normalized", "raw", "clamped", "vacuous",
]  # fmt: skip


def fmt(value) -> str:
    """CSV cell text; floats use repr so they round-trip exactly."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def render_csv(columns: Sequence[str], rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def write_atomic(path, text: str) -> None:
    """Write via a temporary file in the same directory, so a failed run leaves nothing behind."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def read_vectors(path) -> np.ndarray:
    """One vector per line, comma-separated decimals; blank lines and ``#`` comments are skipped."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(v) for v in line.split(",")])
        except ValueError as e:
            raise ValueError(f"{path}:{lineno}: not a comma-separated vector ({e})") from None
    if not rows:
        raise ValueError(f"{path}: no vectors")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"{path}: vectors have differing dimensions {sorted(widths)}")
    return np.array(rows, dtype=float)


def read_config(path) -> dict[str, str]:
    """Flat ``key = value`` file (``#`` comments). Keys are normalised to underscores."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    text = Path(path).read_text()
    parser.read_string("[kfs]\n" + text, source=str(path))
    return {k.replace("-", "_"): v for k, v in parser["kfs"].items()}


def manifest_path(out) -> Path:
    out = Path(out)
    return out.with_name(out.stem + ".manifest.json")


def environment() -> dict:
    import kfs
    import scipy

    return {
        "kfs": kfs.__version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def write_manifest(out, payload: dict) -> Path:
    path = manifest_path(out)
    write_atomic(path, json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")
    return path
