"""Shared domain types, court geometry, and unit conventions.

Canonical units everywhere in the library: feet for distances, degrees for
angles, seconds for time.  Reporting layers convert depth / left-right to
inches where that matches common shooting-lab conventions.

The canonical local frame puts the rim center at the origin of the
horizontal plane at 10 ft height, with +x pointing from the rim toward the
attacking half (shooters have positive local x).  Tracking coordinates are
treated as ball-center positions throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# NBA full court, feet. Origin at a corner, x along the sideline.
COURT_LENGTH_FT = 94.0
COURT_WIDTH_FT = 50.0
# Rim center sits 63 inches from the baseline, on the court's long axis.
RIM_CENTER_FROM_BASELINE_FT = 5.25

RIM_HEIGHT_FT = 10.0
RIM_RADIUS_FT = 0.75          # 18 in diameter
BALL_RADIUS_FT = 0.3938       # 9.45 in diameter (regulation men's ball)
RELEASE_HEIGHT_PRIOR_FT = 7.0

HOOP_ENDS = ("left", "right")

# Court-frame rim centers per end.
_RIM_XY = {
    "left": (RIM_CENTER_FROM_BASELINE_FT, COURT_WIDTH_FT / 2.0),
    "right": (COURT_LENGTH_FT - RIM_CENTER_FROM_BASELINE_FT, COURT_WIDTH_FT / 2.0),
}

# Opaque identifiers; unique within a season dataset.
PlayerId = str
GameId = str


class UnknownHoopEndError(ValueError):
    """Raised when a hoop-end tag is not one of 'left' / 'right'."""


@dataclass(frozen=True)
class CourtGeometry:
    """Rim-local geometry constants shared by every pipeline stage."""

    rim_center: tuple[float, float, float] = (0.0, 0.0, RIM_HEIGHT_FT)
    rim_radius_ft: float = RIM_RADIUS_FT
    ball_radius_ft: float = BALL_RADIUS_FT
    release_height_prior_ft: float = RELEASE_HEIGHT_PRIOR_FT

    def __post_init__(self) -> None:
        if not (self.rim_radius_ft > self.ball_radius_ft > 0.0):
            raise ValueError("need rim_radius > ball_radius > 0")
        if self.rim_center[2] != RIM_HEIGHT_FT:
            raise ValueError("rim center height must be exactly 10.0 ft")


DEFAULT_GEOMETRY = CourtGeometry()


@dataclass(frozen=True)
class ShotFactors:
    """Depth, left-right, and entry angle of one shot at the rim plane.

    depth_ft:       signed distance past the front rim along the shot path at
                    the rim-plane crossing (rim center corresponds to 0.75 ft).
    left_right_ft:  signed perpendicular offset of the path from rim center;
                    positive means the shooter's right.
    entry_angle_deg: angle below horizontal of the descending crossing, (0, 90].
    """

    depth_ft: float
    left_right_ft: float
    entry_angle_deg: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.depth_ft) and math.isfinite(self.left_right_ft)):
            raise ValueError("depth and left_right must be finite")
        if not 0.0 < self.entry_angle_deg <= 90.0:
            raise ValueError(f"entry angle {self.entry_angle_deg} outside (0, 90]")

    @property
    def depth_in(self) -> float:
        return feet_to_inches(self.depth_ft)

    @property
    def left_right_in(self) -> float:
        return feet_to_inches(self.left_right_ft)


def rim_center_xy(hoop_end: str) -> tuple[float, float]:
    """Court-frame (x, y) of the rim center for a hoop end tag."""
    try:
        return _RIM_XY[hoop_end]
    except KeyError:
        raise UnknownHoopEndError(f"unknown hoop_end {hoop_end!r}; expected one of {HOOP_ENDS}") from None


def to_local_frame(point: tuple[float, float, float], hoop_end: str) -> tuple[float, float, float]:
    """Map a court-frame ball point into the canonical rim-local frame.

    The map is a rigid motion (pure translation for the left end, a 180-degree
    rotation about the rim for the right end), so both ends share one
    handedness and the rim center always maps to (0, 0, 10).
    """
    rx, ry = rim_center_xy(hoop_end)
    x, y, z = point
    if hoop_end == "left":
        return (x - rx, y - ry, z)
    return (rx - x, ry - y, z)


def from_local_frame(point: tuple[float, float, float], hoop_end: str) -> tuple[float, float, float]:
    """Inverse of :func:`to_local_frame`."""
    rx, ry = rim_center_xy(hoop_end)
    x, y, z = point
    if hoop_end == "left":
        return (x + rx, y + ry, z)
    return (rx - x, ry - y, z)


def feet_to_inches(x_ft: float) -> float:
    return x_ft * 12.0


def inches_to_feet(x_in: float) -> float:
    return x_in / 12.0


def degrees_to_radians(a_deg: float) -> float:
    return a_deg * math.pi / 180.0


def radians_to_degrees(a_rad: float) -> float:
    return a_rad * 180.0 / math.pi
