"""A segment of fixed length sliding with its ends on two lines.

In q-frame coordinates ``(t_i, t_j)`` the admissible positions form the
ellipse ``t_i^2 + t_j^2 - 2 c t_i t_j = d_eff^2`` whose axes sit at 45
degrees; ``segment_position`` walks it with a single angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EdgeTooShort
from .geometry import PairGeometry

EDGE_TOL = 1e-12

__all__ = [
    "EllipseParams",
    "RangeInterval",
    "effective_length",
    "ellipse_params",
    "segment_position",
    "range_interval",
    "segment_points",
]


@dataclass(frozen=True)
class EllipseParams:
    a: float
    b: float
    c: float
    d_eff: float

    @property
    def half_range(self) -> float:
        """Largest ``|t|`` reached on either line, ``sqrt(a^2 + b^2)``."""
        return math.hypot(self.a, self.b)


@dataclass(frozen=True)
class RangeInterval:
    center_t: float
    half_length: float

    @property
    def length(self) -> float:
        return 2.0 * self.half_length

    @property
    def low(self) -> float:
        return self.center_t - self.half_length

    @property
    def high(self) -> float:
        return self.center_t + self.half_length


def effective_length(d: float, gap: float) -> float:
    """``sqrt(d^2 - gap^2)``; raises EdgeTooShort unless ``d > gap``."""
    if d - gap <= EDGE_TOL * max(1.0, d):
        raise EdgeTooShort(f"edge length {d!r} does not exceed line gap {gap!r}")
    return math.sqrt((d - gap) * (d + gap))


def ellipse_params(d: float, pair: PairGeometry) -> EllipseParams:
    d_eff = effective_length(d, pair.dist)
    c = pair.c
    return EllipseParams(
        a=d_eff / math.sqrt(2.0 * (1.0 - c)),
        b=d_eff / math.sqrt(2.0 * (1.0 + c)),
        c=c,
        d_eff=d_eff,
    )


def segment_position(theta, e: EllipseParams):
    """q-frame coordinates ``(t_i, t_j)`` at angle *theta* (vectorised)."""
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    t_i = e.a * cos_t - e.b * sin_t
    t_j = e.a * cos_t + e.b * sin_t
    if np.ndim(theta) == 0:
        return float(t_i), float(t_j)
    return t_i, t_j


def segment_points(theta, e: EllipseParams, pair: PairGeometry):
    """Ambient end points of the segment on ``pair.line_i`` / ``line_j``."""
    t_i, t_j = segment_position(theta, e)
    t_i, t_j = np.asarray(t_i), np.asarray(t_j)
    p_i = pair.q_i + t_i[..., None] * pair.line_i.direction
    p_j = pair.q_j + t_j[..., None] * pair.line_j.direction
    return p_i, p_j


def range_interval(e: EllipseParams, pair: PairGeometry, which: str = "i") -> RangeInterval:
    """Interval swept on one line, centred on that line's foot (anchor frame)."""
    if which not in ("i", "j"):
        raise ValueError("which must be 'i' or 'j'")
    center = pair.t_foot_i if which == "i" else pair.t_foot_j
    return RangeInterval(center_t=center, half_length=e.d_eff / pair.sin_alpha)
