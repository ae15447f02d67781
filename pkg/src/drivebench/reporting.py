"""Report serialization: fixed-format JSON, CSV helpers, atomic writes.

All floating-point output is written with exactly six decimal places so
repeated runs and golden files are byte-identical; the standard json
encoder cannot fix decimal places, hence the small emitter here.
"""
from __future__ import annotations

import math
import os
import tempfile
from pathlib import Path

from .metrics import MetricsReport, ModeTotals
from .roads import TripComposition
from .spectrum import Spectrum


def _emit(value, parts: list[str], indent: int, level: int) -> None:
    pad = " " * (indent * level)
    inner = " " * (indent * (level + 1))
    if value is None:
        parts.append("null")
    elif isinstance(value, bool):
        parts.append("true" if value else "false")
    elif isinstance(value, int):
        parts.append(str(value))
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"cannot serialize non-finite number {value!r}")
        parts.append(f"{value:.6f}")
    elif isinstance(value, str):
        parts.append(_escape(value))
    elif isinstance(value, dict):
        if not value:
            parts.append("{}")
            return
        parts.append("{\n")
        for i, (key, item) in enumerate(value.items()):
            parts.append(f"{inner}{_escape(str(key))}: ")
            _emit(item, parts, indent, level + 1)
            parts.append(",\n" if i < len(value) - 1 else "\n")
        parts.append(pad + "}")
    elif isinstance(value, (list, tuple)):
        if not value:
            parts.append("[]")
            return
        parts.append("[\n")
        for i, item in enumerate(value):
            parts.append(inner)
            _emit(item, parts, indent, level + 1)
            parts.append(",\n" if i < len(value) - 1 else "\n")
        parts.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def _escape(text: str) -> str:
    out = ['"']
    for ch in text:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def dumps(document, indent: int = 2) -> str:
    """Serialize to JSON with all floats at six decimal places."""
    parts: list[str] = []
    _emit(document, parts, indent, 0)
    parts.append("\n")
    return "".join(parts)


def atomic_write_bytes(path, data: bytes) -> None:
    """Write via a temp file and rename, so readers never see partial output."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def totals_to_obj(totals: ModeTotals) -> dict:
    return {
        "auto_distance": totals.auto_distance,
        "manual_distance": totals.manual_distance,
        "auto_uptime": totals.auto_uptime,
        "manual_uptime": totals.manual_uptime,
        "n_interventions": totals.n_interventions,
    }


def report_to_obj(report: MetricsReport) -> dict:
    return {
        "group_key": report.group_key,
        "no_interventions": report.no_interventions,
        "mdbi": report.mdbi,
        "mtbi": report.mtbi,
        "mdbi_a": report.mdbi_a,
        "mtbi_a": report.mtbi_a,
        "mdbi_m": report.mdbi_m,
        "mtbi_m": report.mtbi_m,
        "totals": totals_to_obj(report.totals),
    }


def composition_to_obj(composition: TripComposition) -> dict:
    return {
        "distances": {rt: composition.distances[rt] for rt in sorted(composition.distances)},
        "fractions": {rt: composition.fractions[rt] for rt in sorted(composition.fractions)},
        "matched_distance": composition.matched_distance,
        "unmatched_distance": composition.unmatched_distance,
        "private_distance": composition.private_distance,
    }


def spectrum_to_csv(spec: Spectrum) -> str:
    lines = ["freq_hz,magnitude"]
    for freq, magnitude in zip(spec.frequencies(), spec.magnitudes):
        lines.append(f"{freq:.6f},{magnitude:.6f}")
    return "\n".join(lines) + "\n"
