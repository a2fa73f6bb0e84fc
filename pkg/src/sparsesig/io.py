"""File formats: complex CSV series, 16-bit WAV, 8-bit PGM images, JSON.

All writers are deterministic: fixed field order, shortest-roundtrip float
formatting, sorted JSON keys, no timestamps.
"""

from __future__ import annotations

import json
import wave
from pathlib import Path

import numpy as np

from .errors import InvalidArgument, ParseError

_CSV_HEADER = "index,re,im"
SCHEMA_VERSION = 1


def write_csv(path, values: np.ndarray, indices=None) -> None:
    """Series as index,re,im rows; floats use repr (exact round trip)."""
    values = np.asarray(values)
    if values.ndim != 1:
        raise InvalidArgument("write_csv expects a 1D series")
    if indices is None:
        indices = np.arange(values.shape[0])
    indices = np.asarray(indices, dtype=int)
    if indices.shape[0] != values.shape[0]:
        raise InvalidArgument("indices and values disagree in length")
    lines = [_CSV_HEADER]
    for i, v in zip(indices, values):
        c = complex(v)
        lines.append(f"{int(i)},{c.real!r},{c.imag!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read an index,re,im series; returns (indices, complex values)."""
    raw = Path(path).read_bytes()
    text = raw.decode("ascii", errors="replace")
    offset = 0
    indices, values = [], []
    for lineno, line in enumerate(text.split("\n")):
        stripped = line.strip()
        if lineno == 0:
            if stripped != _CSV_HEADER:
                raise ParseError(f"expected header {_CSV_HEADER!r}", offset)
        elif stripped:
            parts = stripped.split(",")
            if len(parts) != 3:
                raise ParseError(f"expected 3 fields, got {len(parts)}", offset)
            try:
                indices.append(int(parts[0]))
                values.append(complex(float(parts[1]), float(parts[2])))
            except ValueError as exc:
                raise ParseError(f"bad numeric field: {exc}", offset) from None
        offset += len(line.encode("ascii", errors="replace")) + 1
    return np.asarray(indices, dtype=int), np.asarray(values, dtype=complex)


def write_wav(path, values: np.ndarray, rate: int = 8000) -> None:
    """Mono 16-bit PCM; expects real values in [-1, 1] (clipped if not)."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 1:
        raise InvalidArgument("write_wav expects a 1D series")
    clipped = np.clip(values, -1.0, 1.0)
    pcm = np.round(clipped * 32767.0).astype("<i2")
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(1)
        fh.setsampwidth(2)
        fh.setframerate(rate)
        fh.writeframes(pcm.tobytes())


def read_wav(path) -> tuple[np.ndarray, int]:
    with wave.open(str(path), "rb") as fh:
        if fh.getnchannels() != 1 or fh.getsampwidth() != 2:
            raise ParseError("expected mono 16-bit PCM")
        rate = fh.getframerate()
        pcm = np.frombuffer(fh.readframes(fh.getnframes()), dtype="<i2")
    return pcm.astype(float) / 32767.0, rate


def write_pgm(path, tfr_values: np.ndarray) -> None:
    """Binary P5 image of a TFR, log-scaled to 8 bits, rows = frequency."""
    vals = np.abs(np.asarray(tfr_values, dtype=float))
    if vals.ndim != 2:
        raise InvalidArgument("write_pgm expects a 2D grid")
    img = vals.T                              # rows become frequency bins
    peak = img.max()
    if peak > 0:
        db = 10.0 * np.log10(img / peak + 1e-12)
        lo = -120.0
        scaled = np.clip((db - lo) / -lo, 0.0, 1.0)
    else:
        scaled = np.zeros_like(img)
    byte = np.round(scaled * 255.0).astype(np.uint8)
    h, w = byte.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(byte.tobytes())


def read_pgm(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if not raw.startswith(b"P5"):
        raise ParseError("not a binary PGM file", 0)
    fields = []
    pos = 2
    while len(fields) < 3:
        while pos < len(raw) and raw[pos:pos + 1].isspace():
            pos += 1
        start = pos
        while pos < len(raw) and not raw[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ParseError("truncated PGM header", start)
        fields.append(raw[start:pos])
    pos += 1
    try:
        w, h, maxval = (int(f) for f in fields)
    except ValueError:
        raise ParseError("bad PGM header field", 2) from None
    if maxval != 255:
        raise ParseError(f"expected maxval 255, got {maxval}", 2)
    data = np.frombuffer(raw[pos:pos + w * h], dtype=np.uint8)
    if data.size != w * h:
        raise ParseError("truncated PGM payload", pos)
    return data.reshape(h, w)


def write_json(path, payload: dict) -> None:
    doc = {"schema": SCHEMA_VERSION}
    doc.update(payload)
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2,
                                     default=_json_default) + "\n",
                          encoding="ascii")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return {"re": obj.real.tolist(), "im": obj.imag.tolist()}
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def read_json(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="ascii"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad JSON: {exc.msg}", exc.pos) from None
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA_VERSION:
        raise ParseError(f"expected schema {SCHEMA_VERSION}")
    return doc
