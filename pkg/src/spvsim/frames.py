"""Scene frame processing: downscale/smooth, edge extraction, strategies.

A LabeledFrame couples the camera intensity image with a per-pixel
semantic class map. The class table is fixed package-wide:

    0 background, 1 structure, 2 pedestrian, 3 bicycle, 4 ground, 5 goal

Processing order in the pipeline: downscale to the working resolution
(area-averaged intensity, nearest-neighbor labels), grayscale is implicit
(the renderer emits single-channel intensity), 3x3 binomial smoothing on
intensity only, then one of three encoding strategies turns the frame into
an activation image:

* Control        - 3x3 Sobel magnitude of the full frame
* SemanticEdges  - 7x7 Sobel magnitude of the selected-class mask
* SemanticRaster - 7x7 Sobel of a single class, cycling through the
                   selected classes with a fixed dwell per class

Edge magnitudes are normalized by the kernel's max response to a unit
step and clipped to [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import ndimage

CLASS_IDS = {
    "background": 0,
    "structure": 1,
    "pedestrian": 2,
    "bicycle": 3,
    "ground": 4,
    "goal": 5,
}
CLASS_NAMES = {v: k for k, v in CLASS_IDS.items()}

STRATEGY_KINDS = ("Control", "SemanticEdges", "SemanticRaster")

# separable 7x7 pair: binomial-like smoother x polynomial derivative
_SMOOTH7 = np.array([1.0, 6.0, 15.0, 20.0, 15.0, 6.0, 1.0])
_DERIV7 = np.array([-1.0, -4.0, -5.0, 0.0, 5.0, 4.0, 1.0])
_SMOOTH3 = np.array([1.0, 2.0, 1.0])
_DERIV3 = np.array([-1.0, 0.0, 1.0])


@dataclass
class LabeledFrame:
    """Single-channel intensity in [0, 1] plus per-pixel class labels."""

    intensity: np.ndarray  # (H, W) float
    labels: np.ndarray     # (H, W) uint8

    @property
    def shape(self) -> tuple[int, int]:
        return self.intensity.shape


@dataclass(frozen=True)
class StrategyConfig:
    kind: str = "Control"
    classes: tuple[str, ...] = ("bicycle", "pedestrian", "structure")
    dwell_s: float = 0.2
    control_kernel: int = 3
    semantic_kernel: int = 7
    sampling: str = "nearest"  # electrode sampling: nearest | bilinear

    def __post_init__(self) -> None:
        if self.kind not in STRATEGY_KINDS:
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        if self.dwell_s <= 0:
            raise ValueError("dwell_s must be positive")
        if not self.classes:
            raise ValueError("strategy needs at least one class")
        for c in self.classes:
            if c not in CLASS_IDS:
                raise ValueError(f"unknown semantic class {c!r}")
        if self.sampling not in ("nearest", "bilinear"):
            raise ValueError(f"unknown sampling mode {self.sampling!r}")


def _overlap_weights(n_src: int, n_dst: int) -> np.ndarray:
    """Row-normalized box-overlap weights for exact area-average resampling."""
    w = np.zeros((n_dst, n_src))
    scale = n_src / n_dst
    for i in range(n_dst):
        lo, hi = i * scale, (i + 1) * scale
        j0, j1 = int(np.floor(lo)), int(np.ceil(hi))
        for j in range(j0, min(j1, n_src)):
            w[i, j] = min(hi, j + 1) - max(lo, j)
    return w / scale


def downscale_gray_smooth(frame: LabeledFrame, out_size: int = 200) -> LabeledFrame:
    """Resample to out_size x out_size and smooth the intensity channel.

    Intensity is area-averaged (exact box overlap, handles non-integer
    ratios); labels take the nearest source pixel. Smoothing is the
    separable 3x3 binomial [1,2,1]/4 per axis with edge replication.
    """
    h, w = frame.shape
    if h < out_size or w < out_size:
        raise ValueError(f"source frame {h}x{w} smaller than target {out_size}")
    img = frame.intensity
    labels = frame.labels
    if (h, w) != (out_size, out_size):
        wr = _overlap_weights(h, out_size)
        wc = _overlap_weights(w, out_size)
        img = wr @ img @ wc.T
        rows = np.minimum((np.arange(out_size) + 0.5) * (h / out_size), h - 1).astype(int)
        cols = np.minimum((np.arange(out_size) + 0.5) * (w / out_size), w - 1).astype(int)
        labels = labels[rows][:, cols]
    smoothed = _smooth3(img)
    return LabeledFrame(intensity=smoothed, labels=np.ascontiguousarray(labels))


def _smooth3(img: np.ndarray) -> np.ndarray:
    p = np.pad(img, 1, mode="edge")
    horiz = (p[:, :-2] + 2.0 * p[:, 1:-1] + p[:, 2:]) * 0.25
    return (horiz[:-2] + 2.0 * horiz[1:-1] + horiz[2:]) * 0.25


@lru_cache(maxsize=None)
def _step_norm(kernel_size: int) -> float:
    """Max Sobel magnitude response to a unit step, used for normalization."""
    smooth, deriv = _kernel_pair(kernel_size)
    step = np.zeros(4 * kernel_size)
    step[step.size // 2:] = 1.0
    resp = np.correlate(step, deriv, mode="same")
    return float(np.abs(resp).max() * smooth.sum())


def _kernel_pair(kernel_size: int) -> tuple[np.ndarray, np.ndarray]:
    if kernel_size == 3:
        return _SMOOTH3, _DERIV3
    if kernel_size == 7:
        return _SMOOTH7, _DERIV7
    raise ValueError(f"unsupported Sobel kernel size {kernel_size}")


def sobel_magnitude(img: np.ndarray, kernel_size: int = 3) -> np.ndarray:
    """Normalized gradient magnitude in [0, 1], edge-replicated borders.

    Magnitude is scaled by the kernel's max response to a unit step; the
    sqrt combination can exceed that on diagonal steps, so the result is
    clipped at 1.
    """
    smooth, deriv = _kernel_pair(kernel_size)
    gx = ndimage.correlate1d(img, deriv, axis=1, mode="nearest")
    gx = ndimage.correlate1d(gx, smooth, axis=0, mode="nearest")
    gy = ndimage.correlate1d(img, deriv, axis=0, mode="nearest")
    gy = ndimage.correlate1d(gy, smooth, axis=1, mode="nearest")
    mag = np.hypot(gx, gy)
    mag /= _step_norm(kernel_size)
    return np.clip(mag, 0.0, 1.0, out=mag)


def semantic_mask(frame: LabeledFrame, classes: tuple[str, ...] | list[str]) -> np.ndarray:
    """Intensity where the label is one of ``classes``, zero elsewhere."""
    ids = [CLASS_IDS[c] for c in classes]
    keep = np.isin(frame.labels, ids)
    return np.where(keep, frame.intensity, 0.0)


def active_class(cfg: StrategyConfig, t: float) -> str:
    """Class shown by SemanticRaster at time t (seconds from trial start).

    The slot index is floor(t / dwell) mod n_classes, computed on a
    microsecond-quantized clock so frame times that are exact slot
    boundaries never land one float ulp short.
    """
    t_us = int(round(t * 1e6))
    dwell_us = int(round(cfg.dwell_s * 1e6))
    return cfg.classes[(t_us // dwell_us) % len(cfg.classes)]


def apply_strategy(frame: LabeledFrame, cfg: StrategyConfig, t: float) -> np.ndarray:
    """Turn a processed frame into the stimulation activation image."""
    if cfg.kind == "Control":
        return sobel_magnitude(frame.intensity, cfg.control_kernel)
    if cfg.kind == "SemanticEdges":
        return sobel_magnitude(semantic_mask(frame, cfg.classes), cfg.semantic_kernel)
    return sobel_magnitude(semantic_mask(frame, (active_class(cfg, t),)),
                           cfg.semantic_kernel)
