"""Electrode eligibility rastering and activation sampling.

Only half the array is stimulated each frame: electrode (r, c) is eligible
on frame k iff (r + c + k) is even. Consecutive frames are complementary,
so no electrode waits more than one frame, and no two eligible electrodes
are ever 4-adjacent within a frame (a charge-density safety rule).

``sample_electrodes`` reads the strategy's activation image at each
electrode's gaze-shifted position in the camera frame: retinal um ->
degrees -> plus gaze -> pixel in the 60 deg field. Electrodes that land
outside the frame contribute nothing.
"""

from __future__ import annotations

import numpy as np

from .retina import AxonMapParams, ElectrodeArray

ActivationVector = np.ndarray  # (n_electrodes,) float, >= 0


def checkerboard_mask(array: ElectrodeArray, frame_index: int) -> np.ndarray:
    """Boolean eligibility per electrode for the given frame index."""
    r, c = array.electrode_rc()
    return (r + c + frame_index) % 2 == 0


def sample_electrodes(
    image: np.ndarray,
    array: ElectrodeArray,
    params: AxonMapParams,
    gaze_deg: tuple[float, float] = (0.0, 0.0),
    eligible: np.ndarray | None = None,
    *,
    fov_deg: float = 60.0,
    mode: str = "nearest",
) -> ActivationVector:
    """Per-electrode activation from the processed camera frame.

    ``image`` is (H, W) with row 0 at the top; the camera spans ``fov_deg``
    horizontally (vertical span scales with aspect). Gaze is (yaw, pitch)
    in degrees, positive right/up, clamped to keep the direction inside
    the field of view.
    """
    h, w = image.shape
    px_per_deg = w / fov_deg
    half_yaw = fov_deg / 2.0
    half_pitch = h / px_per_deg / 2.0
    yaw = float(np.clip(gaze_deg[0], -half_yaw, half_yaw))
    pitch = float(np.clip(gaze_deg[1], -half_pitch, half_pitch))

    ex_deg = array.positions_um[:, 0] / params.um_per_degree
    ey_deg = array.positions_um[:, 1] / params.um_per_degree
    col = (w - 1) / 2.0 + (ex_deg + yaw) * px_per_deg
    row = (h - 1) / 2.0 - (ey_deg + pitch) * px_per_deg

    out = np.zeros(array.n_electrodes)
    if mode == "nearest":
        ci = np.rint(col).astype(int)
        ri = np.rint(row).astype(int)
        inside = (ci >= 0) & (ci < w) & (ri >= 0) & (ri < h)
        out[inside] = image[ri[inside], ci[inside]]
    elif mode == "bilinear":
        c0 = np.floor(col).astype(int)
        r0 = np.floor(row).astype(int)
        fc = col - c0
        fr = row - r0
        inside = (c0 >= 0) & (c0 < w - 1) & (r0 >= 0) & (r0 < h - 1)
        c0w = c0[inside]
        r0w = r0[inside]
        fcw = fc[inside]
        frw = fr[inside]
        out[inside] = (
            image[r0w, c0w] * (1 - frw) * (1 - fcw)
            + image[r0w, c0w + 1] * (1 - frw) * fcw
            + image[r0w + 1, c0w] * frw * (1 - fcw)
            + image[r0w + 1, c0w + 1] * frw * fcw
        )
    else:
        raise ValueError(f"unknown sampling mode {mode!r}")
    if eligible is not None:
        out[~eligible] = 0.0
    return out
