"""Result files written by the commands.

CSV files use '.' decimals, LF line endings and 17 significant digits so
that reruns are byte-identical and diff cleanly. JSON files are written
with sorted keys; non-finite floats become null.
"""

from __future__ import annotations

import csv
import json
import math
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from .config import CSV_DIGITS
from .fronts import FrontTrack
from .model import StatePair
from .waves import WaveProfile

SUMMARY_FILE = "summary.json"
CERTIFICATE_FILE = "certificate.json"
FRONTS_FILE = "fronts.csv"
REGION_FILE = "region.csv"
PROFILE_FILE = "profile.csv"
INTERFACES_FILE = "interfaces.csv"
WAVE_FILE = "wave.json"
TRICHOTOMY_FILE = "trichotomy.csv"


def format_float(x: float | None) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return f"{float(x):.{CSV_DIGITS}g}"


def _cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    if value is None:
        return ""
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def to_jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        return x if math.isfinite(x) else None
    if hasattr(value, "value") and isinstance(value.value, str):
        return value.value
    return value


def write_json(path: Path, data: dict[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(to_jsonable(data), indent=2, sort_keys=True, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8", newline="\n")
    return path


def write_fronts(out_dir: Path, u_track: FrontTrack, v_track: FrontTrack) -> Path:
    rows = zip(u_track.times, u_track.positions, v_track.positions, strict=True)
    return write_csv(out_dir / FRONTS_FILE, ("t", "x_u", "x_v"), rows)


def field_file_name(t: float) -> str:
    return f"field_t{t:g}.csv"


def write_field(out_dir: Path, s: StatePair) -> Path:
    rows = zip(s.grid.x, s.u, s.v, strict=True)
    return write_csv(out_dir / field_file_name(s.t), ("x", "u", "v"), rows)


def write_profile(out_dir: Path, w: WaveProfile) -> Path:
    rows = zip(w.xi, w.phi, w.psi, strict=True)
    return write_csv(out_dir / PROFILE_FILE, ("xi", "phi", "psi"), rows)


def write_region(out_dir: Path, rows: Iterable[Sequence[Any]]) -> Path:
    return write_csv(
        out_dir / REGION_FILE, ("c1", "c2", "class", "measured_c1", "measured_c2"), rows
    )


def write_interfaces(out_dir: Path, rows: Iterable[tuple[float, float, str]]) -> Path:
    return write_csv(out_dir / INTERFACES_FILE, ("t", "x", "interface_id"), rows)


def write_summary(out_dir: Path, summary: dict[str, Any]) -> Path:
    return write_json(out_dir / SUMMARY_FILE, summary)


def write_certificate(out_dir: Path, certificate: dict[str, Any]) -> Path:
    return write_json(out_dir / CERTIFICATE_FILE, certificate)


def write_wave_report(out_dir: Path, report: dict[str, Any]) -> Path:
    return write_json(out_dir / WAVE_FILE, report)


def write_trichotomy(
    out_dir: Path, param: str, rows: Iterable[Sequence[Any]]
) -> Path:
    header = (param, "case", "c1_star", "c2_star")
    return write_csv(out_dir / TRICHOTOMY_FILE, header, rows)
