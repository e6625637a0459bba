"""Tissot indicatrix, Fibonacci-lattice distortion statistics, and the
search for the dividing-point latitude that minimizes mean distortion.

Projection functions passed in here take numpy arrays of latitude and
longitude in radians and return a tuple of map x, y arrays, e.g.
``quincuncial.projection.forward_array``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .constants import derive_constants
from .projection import forward_array
from .types import HALF_PI, TWO_PI, GeoCoord

ProjectFn = Callable[[np.ndarray, np.ndarray], tuple]

DEFAULT_STEP = 1e-5
GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


class FlaggedSampleError(ArithmeticError):
    """Derivatives at this point are not finite (stencil hit an interruption)."""


@dataclass(frozen=True)
class TissotSample:
    h: float
    k: float
    sin_eta: float
    omega: float
    s: float


@dataclass(frozen=True)
class DistortionStats:
    n: int
    mean: float
    stddev: float
    max: float
    dropped: int = 0

    def as_row(self) -> dict:
        return dict(n=self.n, mean=self.mean, stddev=self.stddev, max=self.max,
                    dropped=self.dropped)


def _interruption_gap(phi, lam):
    """Signed offset of each longitude from the nearest quadrant meridian,
    only for the southern hemisphere where those meridians are cut."""
    off = np.mod(lam, HALF_PI)
    off = np.where(off > 0.5 * HALF_PI, off - HALF_PI, off)
    return np.where(phi < 0.0, off, np.inf)


def tissot_array(project: ProjectFn, phi, lam, step: float = DEFAULT_STEP,
                 one_sided: bool = True) -> dict:
    """Indicatrix quantities at many points by finite differences.

    Central differences are used wherever the stencil stays on one side of
    every interruption.  With ``one_sided`` the remaining points switch to
    forward or backward differences away from the cut (and away from the
    poles for the latitude derivative).  Returns arrays h, k, sin_eta,
    omega, s and a boolean ``fallback`` mask.
    """
    phi = np.asarray(phi, dtype=float)
    lam = np.asarray(lam, dtype=float)
    phi, lam = np.broadcast_arrays(phi, lam)

    gap = _interruption_gap(phi, lam)
    # offsets (lo, hi) of the longitude stencil, in units of step
    lam_lo = np.full(phi.shape, -1.0)
    lam_hi = np.full(phi.shape, 1.0)
    phi_lo = np.full(phi.shape, -1.0)
    phi_hi = np.full(phi.shape, 1.0)
    fallback = np.zeros(phi.shape, dtype=bool)
    if one_sided:
        above = (gap >= 0.0) & (gap < step)
        below = (gap < 0.0) & (-gap < step)
        lam_lo = np.where(above, 0.0, lam_lo)
        lam_hi = np.where(below, 0.0, lam_hi)
        near_n = phi + step > HALF_PI
        near_s = phi - step < -HALF_PI
        phi_hi = np.where(near_n, 0.0, phi_hi)
        phi_lo = np.where(near_s, 0.0, phi_lo)
        fallback = above | below | near_n | near_s

    xa, ya = project(phi + phi_hi * step, lam)
    xb, yb = project(phi + phi_lo * step, lam)
    xc, yc = project(phi, lam + lam_hi * step)
    xd, yd = project(phi, lam + lam_lo * step)
    dphi = (phi_hi - phi_lo) * step
    dlam = (lam_hi - lam_lo) * step
    x_phi = (xa - xb) / dphi
    y_phi = (ya - yb) / dphi
    x_lam = (xc - xd) / dlam
    y_lam = (yc - yd) / dlam

    with np.errstate(divide="ignore", invalid="ignore"):
        cos_phi = np.cos(phi)
        h = np.hypot(x_phi, y_phi)
        k = np.hypot(x_lam, y_lam) / cos_phi
        sin_eta = (y_phi * x_lam - x_phi * y_lam) / (h * k * cos_phi)
        hk2 = 2.0 * h * k * sin_eta
        ratio = (h * h + k * k - hk2) / (h * h + k * k + hk2)
        omega = 2.0 * np.arcsin(np.sqrt(np.clip(ratio, 0.0, 1.0)))
        omega = np.where(np.isfinite(ratio), omega, np.nan)
        s = h * k * sin_eta
    return dict(h=h, k=k, sin_eta=sin_eta, omega=omega, s=s, fallback=fallback)


def tissot(project: ProjectFn, p: GeoCoord, step: float = DEFAULT_STEP) -> TissotSample:
    """Indicatrix at one point using central differences.

    The caller keeps ``p`` at least ``step`` away from interruptions;
    a non-finite result raises FlaggedSampleError.
    """
    if not step > 0.0:
        raise ValueError("step must be positive")
    t = tissot_array(project, p.phi, p.lam, step, one_sided=False)
    vals = {name: float(t[name]) for name in ("h", "k", "sin_eta", "omega", "s")}
    if not all(math.isfinite(v) for v in vals.values()):
        raise FlaggedSampleError(f"non-finite indicatrix at {p}")
    return TissotSample(**vals)


def fibonacci_lattice_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Latitudes and longitudes of an n-point Fibonacci lattice.

    Latitudes stratify the sphere into n equal-area bands (offset i + 1/2);
    longitudes advance by the golden angle 2*pi/Phi.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    i = np.arange(n, dtype=float)
    phi = np.arcsin(1.0 - 2.0 * (i + 0.5) / n)
    lam = np.mod(TWO_PI * i / GOLDEN, TWO_PI)
    return phi, lam


def fibonacci_lattice(n: int) -> list[GeoCoord]:
    phi, lam = fibonacci_lattice_arrays(n)
    return [GeoCoord(a, b) for a, b in zip(phi.tolist(), lam.tolist())]


def _summarize(values: np.ndarray, dropped: int) -> DistortionStats:
    vals = values.tolist()
    n = len(vals)
    if n == 0:
        raise ValueError("no usable samples")
    mean = math.fsum(vals) / n
    var = math.fsum((v - mean) ** 2 for v in vals) / n
    return DistortionStats(n=n, mean=mean, stddev=math.sqrt(var), max=max(vals),
                           dropped=dropped)


def stats(project: ProjectFn, n: int = 10000, step: float = DEFAULT_STEP) -> DistortionStats:
    """Mean, population standard deviation and maximum of omega over an
    n-point Fibonacci lattice.  Samples that stay non-finite after the
    one-sided fallback are dropped and counted."""
    if n < 100:
        raise ValueError("n must be at least 100")
    phi, lam = fibonacci_lattice_arrays(n)
    omega = tissot_array(project, phi, lam, step)["omega"]
    ok = np.isfinite(omega)
    return _summarize(omega[ok], int((~ok).sum()))


class BracketError(RuntimeError):
    """The objective does not look unimodal on the search interval."""

    def __init__(self, message, best_phi0, best_objective):
        super().__init__(f"{message} (best seen phi0={best_phi0:.6f}, "
                         f"mean omega={best_objective:.6f})")
        self.best_phi0 = best_phi0
        self.best_objective = best_objective


@dataclass
class Phi0Result:
    phi0: float
    objective: float
    bracket: tuple
    iterations: int
    evaluations: list = field(default_factory=list, repr=False)


def mean_distortion(phi0: float, phi, lam, step: float = DEFAULT_STEP) -> float:
    """Mean omega of the projection built on ``phi0`` over given sample points."""
    k = derive_constants(phi0)
    omega = tissot_array(lambda a, b: forward_array(a, b, k), phi, lam, step)["omega"]
    omega = omega[np.isfinite(omega)]
    return math.fsum(omega.tolist()) / omega.size


def optimize_phi0(lo: float = 1.0, hi: float = 1.35, n_samples: int = 2000,
                  tol: float = 1e-3, step: float = DEFAULT_STEP) -> Phi0Result:
    """Golden-section search for the phi0 minimizing mean angular distortion.

    The same lattice is used for every evaluation.  Iteration stops once
    the bracket is no wider than 2*tol and its midpoint is returned.
    Raises BracketError if the best evaluated point falls outside the
    final bracket, or the search collapses onto an end of [lo, hi].
    """
    if not (0.0 < lo < hi < HALF_PI):
        raise ValueError("need 0 < lo < hi < pi/2")
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    phi, lam = fibonacci_lattice_arrays(n_samples)
    evals: list[tuple[float, float]] = []

    def f(p0):
        val = mean_distortion(p0, phi, lam, step)
        evals.append((p0, val))
        return val

    a, b = lo, hi
    if b - a <= 2.0 * tol * (1.0 + 1e-12):
        mid = 0.5 * (a + b)
        return Phi0Result(mid, f(mid), (a, b), 0, evals)

    inv = 1.0 / GOLDEN
    c = b - (b - a) * inv
    d = a + (b - a) * inv
    fc, fd = f(c), f(d)
    iterations = 0
    while b - a > 2.0 * tol:
        iterations += 1
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - (b - a) * inv
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) * inv
            fd = f(d)

    mid = 0.5 * (a + b)
    best_p, best_f = min(evals, key=lambda e: e[1])
    if not (a <= best_p <= b):
        raise BracketError("best evaluation lies outside the converged bracket", best_p, best_f)
    if a == lo or b == hi:
        raise BracketError("minimum is on the edge of the search interval", best_p, best_f)
    return Phi0Result(mid, f(mid), (a, b), iterations, evals)
