"""Named projections behind one array interface, for callers that can
work with either map."""

from __future__ import annotations

from dataclasses import dataclass

from . import collignon, projection
from .constants import DEFAULT_PHI0, ProjectionConstants, derive_constants

NAMES = ("new", "collignon")


@dataclass(frozen=True)
class Projection:
    name: str
    k: ProjectionConstants | None = None

    def forward(self, phi, lam, q=None):
        if self.name == "collignon":
            return collignon.forward_array(phi, lam, q=q)
        return projection.forward_array(phi, lam, self.k, q=q)

    def inverse(self, x, y):
        if self.name == "collignon":
            return collignon.inverse_array(x, y)
        return projection.inverse_array(x, y, self.k)

    def __call__(self, phi, lam):
        return self.forward(phi, lam)


def get_projection(name: str = "new", phi0: float | None = None) -> Projection:
    """Look up a projection; ``phi0`` only applies to the new projection."""
    if name not in NAMES:
        raise ValueError(f"unknown projection {name!r}; choose from {', '.join(NAMES)}")
    if name == "collignon":
        return Projection("collignon")
    k = derive_constants(DEFAULT_PHI0 if phi0 is None else phi0)
    return Projection("new", k)
