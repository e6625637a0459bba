"""Square equal-area quincuncial projection, forward and inverse.

Each octant of the sphere is split about its mirror axis into two
hexadecants, and each hexadecant into three sub-triangles meeting at a
dividing point of latitude ``phi0``.  Points are carried between the
spherical and Euclidean sub-triangles with a slice-and-dice construction
that preserves area ratios, then the equilateral faces are squished into
right isosceles triangles and arranged around the north pole.

The array functions are the workhorses; ``forward``/``inverse`` are thin
scalar wrappers over them.  All arithmetic is float64.  Where the textbook
formulas divide by a quantity that vanishes at a corner or at the dividing
point, the equivalent atan2/haversine forms are used instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .constants import DEFAULT_PHI0, ProjectionConstants, SubTriangle, derive_constants
from .types import (HALF_PI, TWO_PI, DomainError, GeoCoord, MapPoint,
                    normalize_lon_array)

SQRT3 = math.sqrt(3.0)
SQRT6 = math.sqrt(6.0)
SQRT_HALF = math.sqrt(0.5)
# cos/sin of zeta = pi/4 + q*pi/2, exact to the last bit for q = 0..3
COS_ZETA = np.array([SQRT_HALF, -SQRT_HALF, -SQRT_HALF, SQRT_HALF])
SIN_ZETA = np.array([SQRT_HALF, SQRT_HALF, -SQRT_HALF, -SQRT_HALF])

SINGULAR_EPS = 1e-12
SQUARE_SLACK = 1e-12


@lru_cache(maxsize=None)
def default_constants() -> ProjectionConstants:
    return derive_constants(DEFAULT_PHI0)


def _constants(k):
    return default_constants() if k is None else k


@dataclass(frozen=True)
class OctantFrame:
    """Where a point sits relative to its octant's dividing point."""

    q: int
    lambda0: float
    zeta: float
    mirror: float
    hemi: float
    phi_c: float
    lambda_c: float
    theta: float
    r: float


@dataclass(frozen=True)
class SliceDiceScratch:
    """Intermediate values of one slice-and-dice evaluation."""

    x: float
    y: float
    gamma: float
    epsilon: float
    slice_ratio: float
    dice_ratio: float
    cos_xy: float
    u_prime: float
    v_prime: float
    x_prime: float
    y_prime: float
    r_prime: float
    alpha_prime: float
    theta_prime: float
    x_c: float
    y_c: float
    y_h: float


def octant_index(lam):
    """q = floor(2*lam/pi) for lam in [0, 2pi), clipped against rounding."""
    lam = normalize_lon_array(lam)
    return np.clip(np.floor(lam / HALF_PI), 0, 3).astype(np.intp)


def _select(tri, lower, middle, upper):
    return np.where(tri == 0, lower, np.where(tri == 1, middle, upper))


def _polar_about_dividing_point(phi_c, dlam, k):
    """Angle theta (0 towards the equator) and distance r from the dividing point."""
    s0, c0 = math.sin(k.phi0), math.cos(k.phi0)
    cphi, sphi = np.cos(phi_c), np.sin(phi_c)
    adl = np.abs(dlam)
    n1 = cphi * np.sin(adl)
    n2 = s0 * cphi * np.cos(adl) - c0 * sphi
    dot = s0 * sphi + c0 * cphi * np.cos(adl)
    theta = np.arctan2(n1, n2)
    r = np.arctan2(np.hypot(n1, n2), dot)
    return theta, r


def face_point(theta, r, tri, k, full=False):
    """Map polar coordinates about the dividing point onto the Euclidean face.

    ``tri`` selects the sub-triangle branch explicitly, which lets callers
    evaluate both branches on a seam.  Returns (r', theta') in the octant's
    polar frame, or a dict of every intermediate when ``full`` is set.
    """
    tab = k.table
    tri = np.asarray(tri)
    c = tab["c"][tri]
    G = tab["G"][tri]
    F = tab["F"][tri]
    a_p = tab["a_prime"][tri]
    c_p = tab["c_prime"][tri]

    beta = _select(tri, k.psi0 - theta, theta - k.psi0, math.pi - theta)
    beta = np.maximum(beta, 0.0)

    sin_r, cos_r = np.sin(r), np.cos(r)
    sin_c, cos_c = np.sin(c), np.cos(c)
    # distance x from the slicing vertex F to the point, via haversines
    hav_x = np.sin(0.5 * (r - c)) ** 2 + sin_r * sin_c * np.sin(0.5 * beta) ** 2
    sin_half_x = np.sqrt(np.clip(hav_x, 0.0, 1.0))
    gamma = np.arctan2(np.sin(beta) * sin_r, sin_c * cos_r - cos_c * sin_r * np.cos(beta))
    gamma = np.maximum(gamma, 0.0)
    sin_G, cos_G = np.sin(G), np.cos(G)
    eps = np.arccos(np.clip(sin_G * np.sin(gamma) * cos_c - cos_G * np.cos(gamma), -1.0, 1.0))

    slice_ratio = np.clip((gamma + G + eps - math.pi) / (F + G - HALF_PI), 0.0, 1.0)
    xy = np.arcsin(np.clip(sin_G * sin_c / np.sin(eps), 0.0, 1.0))
    dice_ratio = np.clip(sin_half_x / np.sin(0.5 * xy), 0.0, 1.0)

    # Euclidean sub-triangle with D' at the origin and D'H' along +x
    u_p = a_p * slice_ratio
    fx = c_p * tab["cos_G_prime"][tri]
    fy = c_p * tab["sin_G_prime"][tri]
    px = fx + dice_ratio * (u_p - fx)
    py = fy * (1.0 - dice_ratio)
    r_p = np.hypot(px, py)
    alpha_p = np.arctan2(py, px)
    theta_p = tab["edge_angle"][tri] + tab["edge_sign"][tri] * alpha_p

    if not full:
        return r_p, theta_p
    x = 2.0 * np.arcsin(sin_half_x)
    xy_len = np.hypot(u_p - fx, fy)
    return dict(
        beta=beta, c=c, G=G, F=F, a_prime=a_p, c_prime=c_p, G_prime=tab["G_prime"][tri],
        x=x, y=xy - x, gamma=gamma, epsilon=eps,
        slice_ratio=slice_ratio, dice_ratio=dice_ratio, cos_xy=np.cos(xy),
        u_prime=u_p, v_prime=a_p - u_p,
        x_prime=dice_ratio * xy_len, y_prime=(1.0 - dice_ratio) * xy_len,
        r_prime=r_p, alpha_prime=alpha_p, theta_prime=theta_p,
    )


def _face_to_map(x_c, y_c, south, q, k):
    y_h = np.where(south, -y_c, y_c) - 3.0
    cz, sz = COS_ZETA[q], SIN_ZETA[q]
    # rotate/squish, then turn 180 degrees so (0, 0) on the sphere lands at (0, 1)
    x_m = -(x_c * cz - y_h * sz / SQRT3) / SQRT6
    y_m = -(x_c * sz + y_h * cz / SQRT3) / SQRT6
    # absorb last-bit overshoot at the corners; + 0.0 turns -0.0 into 0.0
    x_m = np.clip(x_m, -1.0, 1.0) + 0.0
    y_m = np.clip(y_m, -1.0, 1.0) + 0.0
    return x_m, y_m, y_h


def forward_array(phi, lam, k: ProjectionConstants | None = None, q=None, full=False):
    """Project latitude/longitude arrays (radians) onto the square.

    ``q`` forces the octant used for each point; it is only meaningful for
    points on an octant's bounding meridian, where it picks which side of
    an interruption the image is taken from.
    """
    k = _constants(k)
    phi = np.asarray(phi, dtype=float)
    lam = normalize_lon_array(lam)
    phi, lam = np.broadcast_arrays(phi, lam)
    if q is None:
        q = octant_index(lam)
    else:
        q = np.broadcast_to(np.asarray(q, dtype=np.intp), phi.shape)

    dlam = lam - 0.25 * math.pi - HALF_PI * q
    dlam = np.mod(dlam + math.pi, TWO_PI) - math.pi
    phi_c = np.abs(phi)
    theta, r = _polar_about_dividing_point(phi_c, dlam, k)
    tri = np.where(theta <= k.psi0, 0, np.where(theta <= k.psi0 + k.psi1, 1, 2))

    parts = face_point(theta, r, tri, k, full=full)
    r_p, theta_p = (parts["r_prime"], parts["theta_prime"]) if full else parts

    mirror = np.sign(dlam)
    x_c = mirror * r_p * np.sin(theta_p)
    y_c = k.h_prime - r_p * np.cos(theta_p)

    at_pole = phi_c >= HALF_PI - SINGULAR_EPS
    at_divide = r <= SINGULAR_EPS
    x_c = np.where(at_pole | at_divide, 0.0, x_c)
    y_c = np.where(at_pole, 3.0, np.where(at_divide, k.h_prime, y_c))

    x_m, y_m, y_h = _face_to_map(x_c, y_c, phi < 0.0, q, k)
    if not full:
        return x_m, y_m
    parts.update(q=q, lambda0=HALF_PI * q, zeta=0.25 * math.pi + HALF_PI * q,
                 mirror=mirror, hemi=np.where(phi < 0.0, -1.0, 1.0), phi_c=phi_c,
                 lambda_c=lam - 0.25 * math.pi, theta=theta, r=r, tri=tri,
                 x_c=x_c, y_c=y_c, y_h=y_h, x_m=x_m, y_m=y_m)
    return parts


def _check_square(x, y):
    bad = ~((np.abs(x) <= 1.0 + SQUARE_SLACK) & (np.abs(y) <= 1.0 + SQUARE_SLACK))
    if np.any(bad):
        i = np.flatnonzero(bad.ravel())[0]
        raise DomainError(
            f"map point ({x.ravel()[i]!r}, {y.ravel()[i]!r}) lies outside [-1, 1]^2")


def map_quadrant(x, y):
    """Octant index owning a map point; half-open, mutually exclusive.

    The quadrant edges are the square's diagonals through the pole images,
    so seam points are assigned by the sign tests below and never twice.
    """
    # undo the 180 degree turn applied in forward
    xi, yi = -x, -y
    return np.where((xi >= 0.0) & (yi <= 0.0), 0,
                    np.where((xi > 0.0) & (yi > 0.0), 1,
                             np.where((xi <= 0.0) & (yi > 0.0), 2, 3)))


def inverse_array(x, y, k: ProjectionConstants | None = None, full=False):
    """Latitude/longitude (radians) of map points in [-1, 1]^2."""
    k = _constants(k)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    _check_square(x, y)
    x = np.clip(x, -1.0, 1.0)
    y = np.clip(y, -1.0, 1.0)

    q = map_quadrant(x, y)
    cz, sz = COS_ZETA[q], SIN_ZETA[q]
    xi, yi = -x, -y
    x_c = SQRT6 * (xi * cz + yi * sz)
    y_c = 3.0 * math.sqrt(2.0) * (yi * cz - xi * sz)
    south = y_c < -3.0
    y_h = np.where(south, -6.0 - y_c, y_c)

    dy = k.h_prime - 3.0 - y_h
    r_p = np.hypot(x_c, dy)
    theta_p = np.arctan2(np.abs(x_c), dy)
    tri = np.where(theta_p <= k.psi0_prime, 0,
                   np.where(theta_p <= k.psi0_prime + k.psi1_prime, 1, 2))

    tab = k.table
    c = tab["c"][tri]
    b = tab["b"][tri]
    G = tab["G"][tri]
    F = tab["F"][tri]
    G_p = tab["G_prime"][tri]
    a_p = tab["a_prime"][tri]
    c_p = tab["c_prime"][tri]
    alpha_p = np.clip(tab["edge_sign"][tri] * (theta_p - tab["edge_angle"][tri]), 0.0, G_p)

    px = r_p * np.cos(alpha_p)
    py = r_p * np.sin(alpha_p)
    fx = c_p * tab["cos_G_prime"][tri]
    fy = c_p * tab["sin_G_prime"][tri]
    # dice ratio x'/(x'+y'): the ray F'P'Q' drops linearly to the edge D'H'
    dice_ratio = np.clip(1.0 - py / fy, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        u_p = np.where(dice_ratio > SINGULAR_EPS, fx + (px - fx) / dice_ratio, 0.0)
    u_p = np.clip(u_p, 0.0, a_p)
    v_p = a_p - u_p

    # reverse slice: area of the far slice fixes the angle delta at F
    area = v_p / a_p * (F + G - HALF_PI)
    delta = np.arctan2(np.sin(area), np.cos(area) - np.cos(b))
    gamma = np.maximum(F - delta, 0.0)
    xy = np.arctan2(np.sin(b), np.cos(b) * np.cos(delta))
    # reverse dice: 1 - cos x = t^2 (1 - cos(x+y))
    x_s = 2.0 * np.arcsin(np.clip(dice_ratio * np.sin(0.5 * xy), 0.0, 1.0))

    sin_x, cos_x = np.sin(x_s), np.cos(x_s)
    sin_c, cos_c = np.sin(c), np.cos(c)
    hav_r = np.sin(0.5 * (x_s - c)) ** 2 + sin_x * sin_c * np.sin(0.5 * gamma) ** 2
    r = 2.0 * np.arcsin(np.sqrt(np.clip(hav_r, 0.0, 1.0)))
    beta = np.arctan2(np.sin(gamma) * sin_x, sin_c * cos_x - cos_c * sin_x * np.cos(gamma))
    alpha = _select(tri, k.psi0 - beta, k.psi0 + beta, math.pi - beta)

    # step r along azimuth alpha (measured from due south) away from the dividing point
    s0, c0 = math.sin(k.phi0), math.cos(k.phi0)
    sin_r, cos_r = np.sin(r), np.cos(r)
    ca, sa = np.cos(alpha), np.sin(alpha)
    vx = cos_r * c0 + sin_r * ca * s0
    vy = sin_r * sa
    vz = cos_r * s0 - sin_r * ca * c0
    phi_h = np.arctan2(vz, np.hypot(vx, vy))
    dlam = np.arctan2(vy, vx)

    at_pole = (np.abs(x_c) <= SINGULAR_EPS) & (np.abs(y_h) <= SINGULAR_EPS)
    at_divide = r_p <= SINGULAR_EPS
    phi_h = np.where(at_pole, HALF_PI, np.where(at_divide, k.phi0, phi_h))
    dlam = np.where(at_pole | at_divide, 0.0, dlam)

    phi = np.where(south, -phi_h, phi_h)
    lam = 0.25 * math.pi + HALF_PI * q + np.sign(x_c) * dlam
    lam = normalize_lon_array(lam)
    if not full:
        return phi, lam
    return dict(
        q=q, x_c=x_c, y_c=y_c, y_h=y_h, hemi=np.where(south, -1.0, 1.0),
        r_prime=r_p, theta_prime=theta_p, tri=tri, alpha_prime=alpha_p,
        dice_ratio=dice_ratio, u_prime=u_p, v_prime=v_p, delta=delta, gamma=gamma,
        cos_xy=np.cos(xy), x=x_s, r=r, beta=beta, alpha=alpha, phi_h=phi_h,
        phi=phi, lam=lam,
    )


def forward(p: GeoCoord, k: ProjectionConstants | None = None) -> MapPoint:
    x, y = forward_array(p.phi, p.lam, k)
    return MapPoint(float(x), float(y))


def inverse(m: MapPoint, k: ProjectionConstants | None = None) -> GeoCoord:
    phi, lam = inverse_array(m.x, m.y, k)
    return GeoCoord(float(phi), float(lam))


def trace(p: GeoCoord, k: ProjectionConstants | None = None):
    """Forward-map one point and return its octant frame, sub-triangle
    geometry and slice-and-dice intermediates."""
    k = _constants(k)
    d = forward_array(p.phi, p.lam, k, full=True)
    s = {name: float(v) for name, v in d.items()}
    frame = OctantFrame(
        q=int(s["q"]), lambda0=s["lambda0"], zeta=s["zeta"], mirror=s["mirror"],
        hemi=s["hemi"], phi_c=s["phi_c"], lambda_c=s["lambda_c"], theta=s["theta"], r=s["r"])
    geom = k.geometry(SubTriangle(int(s["tri"])))
    scratch = SliceDiceScratch(**{f: s[f] for f in SliceDiceScratch.__dataclass_fields__})
    return frame, geom, scratch
