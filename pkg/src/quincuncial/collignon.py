"""Collignon quincuncial projection.

One interrupted Collignon triangle per octant, arranged in the same
quincuncial square (and same orientation and area scale 1/pi) as the
main projection.  Both directions are closed form.
"""

from __future__ import annotations

import math

import numpy as np

from .projection import SQUARE_SLACK, octant_index
from .types import (HALF_PI, TWO_PI, DomainError, GeoCoord, MapPoint,
                    normalize_lon_array)

SQRT2 = math.sqrt(2.0)
# (x_t, y_t) = (sx*x + tx*y, sy*x + ty*y) per octant
_ROT = np.array([
    [1.0, -1.0, 1.0, 1.0],
    [-1.0, -1.0, 1.0, -1.0],
    [-1.0, 1.0, -1.0, -1.0],
    [1.0, 1.0, -1.0, 1.0],
])


def forward_array(phi, lam, q=None, full=False):
    """Project latitude/longitude arrays (radians); ``q`` optionally forces
    the octant for points on a bounding meridian."""
    phi = np.asarray(phi, dtype=float)
    lam = normalize_lon_array(lam)
    phi, lam = np.broadcast_arrays(phi, lam)
    if q is None:
        q = octant_index(lam)
        lam0 = lam - HALF_PI * q - 0.25 * math.pi
    else:
        q = np.broadcast_to(np.asarray(q, dtype=np.intp), phi.shape)
        lam0 = np.mod(lam - HALF_PI * q - 0.25 * math.pi + math.pi, TWO_PI) - math.pi
    w = np.cos(0.5 * np.abs(phi) + 0.25 * math.pi)
    x = -2.0 * SQRT2 / math.pi * lam0 * w
    y = np.where(phi < 0.0, 1.0 - w / SQRT2, w / SQRT2)
    rot = _ROT[q]
    x_t = rot[..., 0] * x + rot[..., 1] * y
    y_t = rot[..., 2] * x + rot[..., 3] * y
    # same last-bit guard as the main projection; + 0.0 drops negative zeros
    x_t = np.clip(x_t, -1.0, 1.0) + 0.0
    y_t = np.clip(y_t, -1.0, 1.0) + 0.0
    if full:
        return dict(q=q, lambda0=lam0, w=w, x=x, y=y, x_t=x_t, y_t=y_t)
    return x_t, y_t


def inverse_array(x_t, y_t):
    """Invert ``forward_array``.

    The four rotations are orthogonal up to a factor 2, so each octant's
    (x, y) is recovered as half the transposed rotation applied to
    (x_t, y_t); y then fixes the hemisphere and |phi|, and x the longitude.
    """
    x_t = np.asarray(x_t, dtype=float)
    y_t = np.asarray(y_t, dtype=float)
    x_t, y_t = np.broadcast_arrays(x_t, y_t)
    bad = ~((np.abs(x_t) <= 1.0 + SQUARE_SLACK) & (np.abs(y_t) <= 1.0 + SQUARE_SLACK))
    if np.any(bad):
        i = np.flatnonzero(bad.ravel())[0]
        raise DomainError(
            f"map point ({x_t.ravel()[i]!r}, {y_t.ravel()[i]!r}) lies outside [-1, 1]^2")
    x_t = np.clip(x_t, -1.0, 1.0)
    y_t = np.clip(y_t, -1.0, 1.0)

    # the octant q=0 face centre is at (-1/2, 1/2); the others follow by quarter turns
    q = np.where((x_t <= 0.0) & (y_t >= 0.0), 0,
                 np.where((x_t < 0.0) & (y_t < 0.0), 1,
                          np.where((x_t >= 0.0) & (y_t < 0.0), 2, 3)))
    rot = _ROT[q]
    x = 0.5 * (rot[..., 0] * x_t + rot[..., 2] * y_t)
    y = 0.5 * (rot[..., 1] * x_t + rot[..., 3] * y_t)

    south = y > 0.5
    w = SQRT2 * np.where(south, 1.0 - y, y)
    w = np.clip(w, 0.0, SQRT2 / 2.0)
    abs_phi = 2.0 * (np.arccos(w) - 0.25 * math.pi)
    phi = np.where(south, -abs_phi, abs_phi)
    with np.errstate(divide="ignore", invalid="ignore"):
        lam0 = np.where(w > 0.0, -math.pi * x / (2.0 * SQRT2 * w), 0.0)
    lam0 = np.clip(lam0, -0.25 * math.pi, 0.25 * math.pi)
    lam = normalize_lon_array(lam0 + HALF_PI * q + 0.25 * math.pi)
    return phi, lam


def collignon_forward(p: GeoCoord) -> MapPoint:
    x, y = forward_array(p.phi, p.lam)
    return MapPoint(float(x), float(y))


def collignon_inverse(m: MapPoint) -> GeoCoord:
    phi, lam = inverse_array(m.x, m.y)
    return GeoCoord(float(phi), float(lam))
