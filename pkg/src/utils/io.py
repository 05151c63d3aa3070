# src/utils/io.py
from __future__ import annotations

import json
import sys
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any, TextIO

import numpy as np
import pandas as pd

from .errors import InputError

# repr-exact floats in CSV; json.dump already writes shortest round-trip reprs
CSV_FLOAT_FORMAT = "%.17g"


def ensure_dir(path: str | Path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _open_target(path: str | Path | None) -> tuple[TextIO, bool]:
    if path is None or str(path) == "-":
        return sys.stdout, False
    p = Path(path)
    ensure_dir(p.parent)
    return p.open("w", encoding="utf-8", newline=""), True


def export_frame_csv(df: pd.DataFrame, path: str | Path | None) -> str:
    """Write `df` as CSV (header row included) to `path`, or stdout when None/'-'."""
    fh, owned = _open_target(path)
    try:
        df.to_csv(fh, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    finally:
        if owned:
            fh.close()
    return "-" if not owned else str(path)


def save_json(obj: Any, path: str | Path | None) -> str:
    if is_dataclass(obj) and not isinstance(obj, type):
        obj = asdict(obj)
    fh, owned = _open_target(path)
    try:
        json.dump(obj, fh, ensure_ascii=False, indent=2, allow_nan=True)
        fh.write("\n")
    finally:
        if owned:
            fh.close()
    return "-" if not owned else str(path)


def load_forcing_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """
    Read a sampled forcing g(t).

    Accepted columns: `t` plus either `g` (real) or `re`/`im`.
    Otherwise the first column is t, the second Re g, an optional third Im g.
    """
    p = Path(path)
    if not p.exists():
        raise InputError(f"forcing file not found: {p}")
    df = pd.read_csv(p)
    if df.shape[1] < 2:
        raise InputError(f"forcing file needs at least two columns: {p}")
    if "t" in df.columns:
        t = df["t"].to_numpy(dtype=float)
        if "g" in df.columns:
            g = df["g"].to_numpy(dtype=complex)
        else:
            re_col = df["re"] if "re" in df.columns else df.iloc[:, 1]
            re = re_col.to_numpy(dtype=float)
            im = df["im"].to_numpy(dtype=float) if "im" in df.columns else np.zeros_like(re)
            g = re + 1j * im
    else:
        t = df.iloc[:, 0].to_numpy(dtype=float)
        im = df.iloc[:, 2].to_numpy(dtype=float) if df.shape[1] > 2 else 0.0
        g = df.iloc[:, 1].to_numpy(dtype=float) + 1j * im
    return t, np.asarray(g, dtype=complex)
