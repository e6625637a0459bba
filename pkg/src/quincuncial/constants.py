"""Fixed angles and lengths of the octant subdivision.

Every quantity here depends only on the latitude ``phi0`` of the dividing
point, so it is computed once and shared by the forward and inverse maps.

Euclidean face layout (one hexadecant, before squishing)::

    A' pole                 (0, 3)
    D' dividing point       (0, h')
    B' equator midpoint     (0, 0)
    C' octant corner        (sqrt(3), 0)
    E' foot of D' on A'C'

The spherical hexadecant ABC is split by D into BCD, CDE and ADE, each
with a right angle at B or E.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .types import DomainError

SQRT3 = math.sqrt(3.0)
DEFAULT_PHI0 = 3.0 * math.pi / 8.0


class SubTriangle(enum.IntEnum):
    """Sub-triangle of a hexadecant, ordered by angle around the dividing point."""

    LOWER = 0  # BCD, touches the equator
    MIDDLE = 1  # CDE
    UPPER = 2  # ADE, touches the pole


@dataclass(frozen=True)
class SubTriangleGeom:
    """Fixed shape of one spherical/Euclidean sub-triangle pair.

    Vertex roles: G is the dividing point, F the vertex the slicing rays
    start from (octant corner C, or the pole A for the upper triangle) and
    H the right-angled vertex. ``c``/``c_prime`` are the hypotenuse DF,
    ``b`` the leg FH, ``a_prime`` the Euclidean leg D'H'.
    """

    id: SubTriangle
    c: float
    b: float
    G: float
    G_prime: float
    F: float
    a_prime: float
    c_prime: float


@dataclass(frozen=True)
class ProjectionConstants:
    phi0: float
    psi0: float
    psi1: float
    rho: float
    h_prime: float
    xi_prime: float
    psi0_prime: float
    psi1_prime: float
    psi2_prime: float
    rho_prime: float

    def geometry(self, tri: SubTriangle) -> SubTriangleGeom:
        return self._geometries[SubTriangle(tri)]

    @cached_property
    def _geometries(self) -> dict:
        phi0 = self.phi0
        hp = self.h_prime
        c_side = math.acos(math.cos(phi0) / math.sqrt(2.0))
        c_top = 0.5 * math.pi - phi0
        dc_prime = math.sqrt(hp * hp + 3.0)
        de_prime = dc_prime * math.sin(math.pi / 3.0 - self.rho_prime) / math.sin(self.xi_prime)
        ce = math.atan(math.sqrt(2.0) * math.tan(phi0))
        return {
            SubTriangle.LOWER: SubTriangleGeom(
                SubTriangle.LOWER, c_side, 0.25 * math.pi, self.psi0,
                self.psi0_prime, self.rho, hp, dc_prime),
            SubTriangle.MIDDLE: SubTriangleGeom(
                SubTriangle.MIDDLE, c_side, ce, self.psi1,
                self.psi1_prime, 0.5 * math.pi - self.rho, de_prime, dc_prime),
            SubTriangle.UPPER: SubTriangleGeom(
                SubTriangle.UPPER, c_top, 0.5 * math.pi - ce, self.psi0,
                self.psi2_prime, 0.25 * math.pi, de_prime, 3.0 - hp),
        }

    @cached_property
    def table(self) -> dict[str, np.ndarray]:
        """Per-sub-triangle geometry as length-3 arrays, indexed by SubTriangle."""
        geoms = [self.geometry(t) for t in SubTriangle]
        fields = ("c", "b", "G", "G_prime", "F", "a_prime", "c_prime")
        out = {f: np.array([getattr(g, f) for g in geoms]) for f in fields}
        out["sin_G_prime"] = np.sin(out["G_prime"])
        out["cos_G_prime"] = np.cos(out["G_prime"])
        # Euclidean sub-triangle: angle of the edge D'H' measured in the
        # octant polar frame, and the direction theta' runs relative to it.
        out["edge_angle"] = np.array([0.0, self.psi0_prime + self.psi1_prime,
                                      self.psi0_prime + self.psi1_prime])
        out["edge_sign"] = np.array([1.0, -1.0, 1.0])
        return out


def derive_constants(phi0: float = DEFAULT_PHI0) -> ProjectionConstants:
    """Compute every phi0-dependent constant of the projection.

    Raises DomainError when ``phi0`` is outside (0, pi/2) or when the
    resulting Euclidean subdivision is degenerate.
    """
    phi0 = float(phi0)
    if not (0.0 < phi0 < 0.5 * math.pi):
        raise DomainError(f"phi0={phi0!r} must lie in (0, pi/2)")

    cos_phi0 = math.cos(phi0)
    psi0 = math.asin(1.0 / math.sqrt(2.0 - cos_phi0 * cos_phi0))
    psi1 = math.pi - 2.0 * psi0
    rho = math.asin(2.0 * math.sin(phi0) / math.sqrt(3.0 - math.cos(2.0 * phi0)))

    h_prime = 12.0 / math.pi * (psi0 + rho - 0.5 * math.pi)
    if not (0.0 < h_prime < 3.0):
        raise DomainError(f"phi0={phi0!r} puts the dividing point outside the face (h'={h_prime!r})")

    # atan2 keeps xi' on the correct branch when it exceeds pi/2
    num = math.pi * (h_prime - 3.0) ** 2
    den = SQRT3 * (math.pi * (h_prime * h_prime - 2.0 * h_prime + 45.0)
                   - 96.0 * psi0 - 48.0 * rho)
    xi_prime = math.atan2(num, den)

    psi0_prime = math.atan(SQRT3 / h_prime)
    rho_prime = math.atan(h_prime / SQRT3)
    psi1_prime = 7.0 * math.pi / 6.0 - psi0_prime - xi_prime
    psi2_prime = xi_prime - math.pi / 6.0

    if not (psi1_prime > 0.0 and psi2_prime > 0.0):
        raise DomainError(f"phi0={phi0!r} yields a degenerate Euclidean subdivision")

    return ProjectionConstants(
        phi0=phi0, psi0=psi0, psi1=psi1, rho=rho,
        h_prime=h_prime, xi_prime=xi_prime,
        psi0_prime=psi0_prime, psi1_prime=psi1_prime, psi2_prime=psi2_prime,
        rho_prime=rho_prime,
    )
