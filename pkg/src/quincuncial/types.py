"""Coordinate types shared by every projection in the package."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi


class DomainError(ValueError):
    """Input lies outside the domain of a projection or construction."""


def normalize_lon(lam: float) -> float:
    """Reduce a longitude to [0, 2pi)."""
    out = math.fmod(lam, TWO_PI)
    if out < 0.0:
        out += TWO_PI
    # fmod of a tiny negative value can round up to exactly 2pi
    if out >= TWO_PI:
        out = 0.0
    return out


def normalize_lon_array(lam):
    """Array version of normalize_lon."""
    out = np.mod(np.asarray(lam, dtype=float), TWO_PI)
    return np.where(out >= TWO_PI, 0.0, out)


@dataclass(frozen=True)
class GeoCoord:
    """Spherical position in radians.

    ``lam`` is reduced to [0, 2pi) on construction so the octant index
    floor(2*lam/pi) is always one of 0..3.
    """

    phi: float
    lam: float

    def __post_init__(self):
        phi = float(self.phi)
        lam = float(self.lam)
        if not (math.isfinite(phi) and math.isfinite(lam)):
            raise DomainError(f"non-finite coordinate ({phi!r}, {lam!r})")
        if abs(phi) > HALF_PI:
            raise DomainError(f"latitude {phi!r} outside [-pi/2, pi/2]")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "lam", normalize_lon(lam))

    @classmethod
    def from_degrees(cls, phi_deg: float, lam_deg: float) -> "GeoCoord":
        return cls(math.radians(phi_deg), math.radians(lam_deg))

    def to_degrees(self) -> tuple[float, float]:
        return math.degrees(self.phi), math.degrees(self.lam)


@dataclass(frozen=True)
class MapPoint:
    """Position on the square map, both coordinates in [-1, 1].

    The north pole sits at the origin and the equator/prime meridian
    intersection at (0, 1), so with image rows running down the +y axis
    the prime meridian points to the bottom of the picture.
    """

    x: float
    y: float

    def __iter__(self):
        yield self.x
        yield self.y


def angular_distance(phi1, lam1, phi2, lam2):
    """Great-circle distance in radians (haversine form, array friendly)."""
    sdphi = np.sin(0.5 * (np.asarray(phi2) - phi1))
    sdlam = np.sin(0.5 * (np.asarray(lam2) - lam1))
    a = sdphi**2 + np.cos(phi1) * np.cos(phi2) * sdlam**2
    return 2.0 * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))
