"""Frame and log serialization: PGM images, trial CSV, summary JSON."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .townsim import TrialMetrics, metrics_summary


def percept_to_u8(values: np.ndarray, display_scale: float = 4.0) -> np.ndarray:
    """Map percept brightness to display gray levels.

    Brightness units are small (a steady drive of u tops out near 0.18 u),
    so frames are scaled by a fixed display gain before quantization; the
    gain is part of the config so dumps stay comparable across runs.
    """
    scaled = np.clip(np.asarray(values, dtype=float) * display_scale, 0.0, 1.0)
    return np.round(scaled * 255.0).astype(np.uint8)


def write_pgm(path: str | Path, image: np.ndarray) -> Path:
    """Write a grayscale image as binary PGM (P5, maxval 255)."""
    img = np.asarray(image)
    if img.dtype != np.uint8:
        raise ValueError("write_pgm expects uint8 pixels; convert first")
    if img.ndim != 2:
        raise ValueError("write_pgm expects a 2-d image")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii")
    path.write_bytes(header + img.tobytes())
    return path


def read_pgm(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    if not data.startswith(b"P5"):
        raise ValueError(f"{path}: not a binary PGM file")
    # header tokens may be separated by any whitespace or comment lines
    tokens: list[bytes] = []
    i = 2
    while len(tokens) < 3:
        while i < len(data) and data[i:i + 1].isspace():
            i += 1
        if data[i:i + 1] == b"#":
            while i < len(data) and data[i] != 0x0A:
                i += 1
            continue
        start = i
        while i < len(data) and not data[i:i + 1].isspace():
            i += 1
        tokens.append(data[start:i])
    i += 1  # single whitespace byte after maxval
    w, h, maxval = (int(t) for t in tokens)
    if maxval != 255:
        raise ValueError(f"{path}: unsupported maxval {maxval}")
    pixels = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=i)
    return pixels.reshape(h, w).copy()


def montage(frames: list[np.ndarray], columns: int = 5, pad: int = 2,
            fill: int = 0) -> np.ndarray:
    """Tile equally sized u8 frames into one contact-sheet image."""
    if not frames:
        raise ValueError("montage needs at least one frame")
    h, w = frames[0].shape
    for fr in frames:
        if fr.shape != (h, w):
            raise ValueError("montage frames must share one shape")
    cols = min(columns, len(frames))
    rows = -(-len(frames) // cols)
    sheet = np.full((rows * h + (rows + 1) * pad,
                     cols * w + (cols + 1) * pad), fill, dtype=np.uint8)
    for k, fr in enumerate(frames):
        r, c = divmod(k, cols)
        y = pad + r * (h + pad)
        x = pad + c * (w + pad)
        sheet[y:y + h, x:x + w] = fr
    return sheet


TRIAL_FIELDS = ("block", "strategy", "trial", "layout", "goal_side", "seed",
                "outcome", "completion_time", "collisions_total",
                "collisions_stationary", "collisions_moving")


def write_trials_csv(path: str | Path, rows: list[dict]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=TRIAL_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in TRIAL_FIELDS})
    return path


def summarize_by_strategy(rows: list[dict]) -> dict:
    """Per-strategy aggregates over a batch's trial rows."""
    out: dict[str, dict] = {}
    for strategy in dict.fromkeys(row["strategy"] for row in rows):
        metrics = [TrialMetrics(
            outcome=row["outcome"],
            completion_time=row["completion_time"],
            collisions_total=row["collisions_total"],
            collisions_stationary=row["collisions_stationary"],
            collisions_moving=row["collisions_moving"],
        ) for row in rows if row["strategy"] == strategy]
        out[strategy] = metrics_summary(metrics)
    return out


def write_json(path: str | Path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path
