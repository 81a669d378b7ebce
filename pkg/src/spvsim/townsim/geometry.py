"""Plan-view shapes and ray casts for the town square."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Circle:
    cx: float
    cy: float
    r: float

    def distance(self, p: np.ndarray) -> float:
        """Distance from point to the solid disc; 0 inside."""
        return max(float(np.hypot(p[0] - self.cx, p[1] - self.cy)) - self.r, 0.0)

    def closest_point(self, p: np.ndarray) -> np.ndarray:
        v = np.asarray(p, dtype=float) - (self.cx, self.cy)
        d = float(np.hypot(*v))
        if d == 0.0:
            return np.array([self.cx + self.r, self.cy])
        return np.array([self.cx, self.cy]) + v * (min(d, self.r) / d)

    def contains(self, p: np.ndarray) -> bool:
        return np.hypot(p[0] - self.cx, p[1] - self.cy) <= self.r


@dataclass(frozen=True)
class Box:
    cx: float
    cy: float
    w: float
    h: float

    @property
    def x0(self) -> float:
        return self.cx - self.w / 2.0

    @property
    def x1(self) -> float:
        return self.cx + self.w / 2.0

    @property
    def y0(self) -> float:
        return self.cy - self.h / 2.0

    @property
    def y1(self) -> float:
        return self.cy + self.h / 2.0

    def closest_point(self, p: np.ndarray) -> np.ndarray:
        return np.array([min(max(p[0], self.x0), self.x1),
                         min(max(p[1], self.y0), self.y1)])

    def distance(self, p: np.ndarray) -> float:
        q = self.closest_point(p)
        return float(np.hypot(p[0] - q[0], p[1] - q[1]))

    def contains(self, p: np.ndarray) -> bool:
        return self.x0 <= p[0] <= self.x1 and self.y0 <= p[1] <= self.y1


Shape = Circle | Box


def ray_circle(origin: np.ndarray, dirs: np.ndarray, shape: Circle) -> np.ndarray:
    """First hit parameter along unit rays, inf where the ray misses."""
    oc = origin - (shape.cx, shape.cy)
    b = dirs @ oc  # dirs are unit vectors
    c = oc @ oc - shape.r ** 2
    disc = b * b - c
    t = np.full(dirs.shape[0], np.inf)
    ok = disc >= 0
    sq = np.sqrt(np.where(ok, disc, 0.0))
    t_near = -b - sq
    t_far = -b + sq
    hit = ok & (t_far > 0)
    t[hit] = np.where(t_near[hit] > 0, t_near[hit], 0.0)
    return t


def ray_box(origin: np.ndarray, dirs: np.ndarray, shape: Box) -> np.ndarray:
    """Slab-method ray/box intersection; inf where the ray misses."""
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / dirs
        tx1 = (shape.x0 - origin[0]) * inv[:, 0]
        tx2 = (shape.x1 - origin[0]) * inv[:, 0]
        ty1 = (shape.y0 - origin[1]) * inv[:, 1]
        ty2 = (shape.y1 - origin[1]) * inv[:, 1]
    # rays parallel to a slab: replace nan from 0 * inf with the slab test
    txn = np.fmin(tx1, tx2)
    txf = np.fmax(tx1, tx2)
    tyn = np.fmin(ty1, ty2)
    tyf = np.fmax(ty1, ty2)
    para_x = dirs[:, 0] == 0.0
    para_y = dirs[:, 1] == 0.0
    inside_x = (origin[0] >= shape.x0) & (origin[0] <= shape.x1)
    inside_y = (origin[1] >= shape.y0) & (origin[1] <= shape.y1)
    txn = np.where(para_x, np.where(inside_x, -np.inf, np.inf), txn)
    txf = np.where(para_x, np.where(inside_x, np.inf, -np.inf), txf)
    tyn = np.where(para_y, np.where(inside_y, -np.inf, np.inf), tyn)
    tyf = np.where(para_y, np.where(inside_y, np.inf, -np.inf), tyf)
    t_near = np.maximum(txn, tyn)
    t_far = np.minimum(txf, tyf)
    t = np.full(dirs.shape[0], np.inf)
    hit = (t_far >= t_near) & (t_far > 0)
    t[hit] = np.where(t_near[hit] > 0, t_near[hit], 0.0)
    return t


def ray_shape(origin: np.ndarray, dirs: np.ndarray, shape: Shape) -> np.ndarray:
    if isinstance(shape, Circle):
        return ray_circle(origin, dirs, shape)
    return ray_box(origin, dirs, shape)
