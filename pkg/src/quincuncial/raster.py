"""Reprojection between equirectangular panoramas and the square map.

Pixel (i, j) of an N x N square image covers the map point
x = -1 + 2(i + 0.5)/N, y = -1 + 2(j + 0.5)/N, with j the row index, so
the north pole is the image centre and the prime meridian runs to the
bottom edge.  Equirectangular rasters run longitude 0..2pi across the
width and latitude pi/2..-pi/2 down the height, also sampled at pixel
centres.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .constants import ProjectionConstants
from .registry import Projection
from .types import HALF_PI, TWO_PI, MapPoint

CHUNK = 1 << 18


class SamplingMethod(enum.Enum):
    NEAREST = "nearest"
    BILINEAR = "bilinear"


@dataclass
class RasterImage:
    """Row-major pixel grid of shape (height, width, channels).

    Samples are uint8 or float32.
    """

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim == 2:
            px = px[:, :, None]
        if px.ndim != 3 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError(f"bad raster shape {px.shape}")
        if not 1 <= px.shape[2] <= 4:
            raise ValueError(f"channel count {px.shape[2]} not in 1..4")
        if px.dtype != np.uint8:
            px = px.astype(np.float32)
        self.pixels = px

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]


def wrap_array(x, y):
    """Fold plane coordinates into [-1, 1]^2 under the map's p2 tiling.

    Neighbouring tiles are the square turned 180 degrees about the shared
    edge's midpoint, so the tiling's translations are (4, 0) and (0, 4).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    # coordinates already in range are left untouched (bit for bit)
    keep = np.abs(x) <= 1.0
    xm = np.mod(x + 1.0, 4.0) - 1.0
    flip = ~keep & (xm > 1.0)
    x = np.where(keep, x, np.where(flip, 2.0 - xm, xm))
    y = np.where(flip, -y, y)
    keep = np.abs(y) <= 1.0
    ym = np.mod(y + 1.0, 4.0) - 1.0
    flip = ~keep & (ym > 1.0)
    y = np.where(keep, y, np.where(flip, 2.0 - ym, ym))
    x = np.where(flip, -x, x)
    return x, y


def wrap_map_point(x: float, y: float) -> MapPoint:
    wx, wy = wrap_array(x, y)
    return MapPoint(float(wx), float(wy))


def _gather_equirect(px, rows, cols):
    h, w = px.shape[:2]
    return px[np.clip(rows, 0, h - 1), np.mod(cols, w)]


def _gather_square(px, rows, cols):
    n = px.shape[0]
    outside = (rows < 0) | (rows >= n) | (cols < 0) | (cols >= n)
    if np.any(outside):
        # pixel centres map onto pixel centres under the p2 rotations
        cx = -1.0 + 2.0 * (cols + 0.5) / n
        cy = -1.0 + 2.0 * (rows + 0.5) / n
        wx, wy = wrap_array(cx, cy)
        cols = np.where(outside, np.rint(0.5 * (wx + 1.0) * n - 0.5).astype(np.intp), cols)
        rows = np.where(outside, np.rint(0.5 * (wy + 1.0) * n - 0.5).astype(np.intp), rows)
        cols = np.clip(cols, 0, n - 1)
        rows = np.clip(rows, 0, n - 1)
    return px[rows, cols]


def _sample(px, u, v, method, gather):
    """Sample ``px`` at continuous pixel coordinates (u across, v down)."""
    if method is SamplingMethod.NEAREST:
        cols = np.floor(u + 0.5).astype(np.intp)
        rows = np.floor(v + 0.5).astype(np.intp)
        return gather(px, rows, cols).astype(np.float64)
    u0 = np.floor(u)
    v0 = np.floor(v)
    fu = (u - u0)[:, None]
    fv = (v - v0)[:, None]
    c0 = u0.astype(np.intp)
    r0 = v0.astype(np.intp)
    p00 = gather(px, r0, c0).astype(np.float64)
    p01 = gather(px, r0, c0 + 1).astype(np.float64)
    p10 = gather(px, r0 + 1, c0).astype(np.float64)
    p11 = gather(px, r0 + 1, c0 + 1).astype(np.float64)
    top = p00 + fu * (p01 - p00)
    bot = p10 + fu * (p11 - p10)
    return top + fv * (bot - top)


def _finish(values, like: np.ndarray, shape) -> RasterImage:
    if like.dtype == np.uint8:
        out = np.clip(np.rint(values), 0, 255).astype(np.uint8)
    else:
        out = values.astype(np.float32)
    return RasterImage(out.reshape(shape))


def sample_square(src: RasterImage, x, y,
                  method: SamplingMethod = SamplingMethod.BILINEAR) -> np.ndarray:
    """Sample a square map image at plane points, shape (n, channels).

    Points outside [-1, 1]^2 are folded back with the p2 wrap first;
    interpolation stencils that straddle an edge also read across it.
    """
    if src.width != src.height:
        raise ValueError(f"source must be square, got {src.width}x{src.height}")
    x, y = wrap_array(np.ravel(x), np.ravel(y))
    n = src.width
    u = 0.5 * (x + 1.0) * n - 0.5
    v = 0.5 * (y + 1.0) * n - 0.5
    return _sample(src.pixels, u, v, SamplingMethod(method), _gather_square)


def equirect_to_square(src: RasterImage, out_size: int, k: ProjectionConstants | None = None,
                       method: SamplingMethod = SamplingMethod.BILINEAR,
                       projection: Projection | None = None) -> RasterImage:
    """Resample an equirectangular image onto the square map.

    ``projection`` overrides the default (the new projection built on ``k``).
    """
    proj = projection or Projection("new", k)
    if out_size < 1:
        raise ValueError("out_size must be at least 1")
    if src.width < 2 or src.height < 1:
        raise ValueError(f"equirectangular source too small ({src.width}x{src.height})")
    method = SamplingMethod(method)
    px = src.pixels
    h, w = src.height, src.width
    idx = (np.arange(out_size) + 0.5) * (2.0 / out_size) - 1.0
    total = out_size * out_size
    out = np.empty((total, src.channels))
    for start in range(0, total, CHUNK):
        flat = np.arange(start, min(start + CHUNK, total))
        mx = idx[flat % out_size]
        my = idx[flat // out_size]
        phi, lam = proj.inverse(mx, my)
        u = lam / TWO_PI * w - 0.5
        v = (HALF_PI - phi) / math.pi * h - 0.5
        out[flat] = _sample(px, u, v, method, _gather_equirect)
    return _finish(out, px, (out_size, out_size, src.channels))


def square_to_equirect(src: RasterImage, out_width: int, k: ProjectionConstants | None = None,
                       method: SamplingMethod = SamplingMethod.BILINEAR,
                       projection: Projection | None = None) -> RasterImage:
    """Resample a square map image back to equirectangular (height = width/2).

    Samples near the square's edges take their bilinear neighbours from
    across the seam via the p2 wrap.
    """
    proj = projection or Projection("new", k)
    if src.width != src.height:
        raise ValueError(f"source must be square, got {src.width}x{src.height}")
    if out_width < 2 or out_width % 2:
        raise ValueError("out_width must be a positive even number")
    method = SamplingMethod(method)
    px = src.pixels
    out_h = out_width // 2
    total = out_width * out_h
    out = np.empty((total, src.channels))
    for start in range(0, total, CHUNK):
        flat = np.arange(start, min(start + CHUNK, total))
        lam = (flat % out_width + 0.5) * (TWO_PI / out_width)
        phi = HALF_PI - (flat // out_width + 0.5) * (math.pi / out_h)
        mx, my = proj.forward(phi, lam)
        out[flat] = sample_square(src, mx, my, method)
    return _finish(out, px, (out_h, out_width, src.channels))


def psnr(a: RasterImage, b: RasterImage, mask=None, peak=None) -> float:
    """Peak signal-to-noise ratio in dB, optionally over a row/column mask."""
    x = a.pixels.astype(np.float64)
    y = b.pixels.astype(np.float64)
    if x.shape != y.shape:
        raise ValueError("images differ in shape")
    if peak is None:
        peak = 255.0 if a.pixels.dtype == np.uint8 else 1.0
    err = (x - y) ** 2
    if mask is not None:
        err = err[np.asarray(mask, dtype=bool)]
    mse = float(err.mean())
    return math.inf if mse == 0.0 else 10.0 * math.log10(peak * peak / mse)


def equirect_latitudes(height: int) -> np.ndarray:
    """Latitude of each row's pixel centres."""
    return HALF_PI - (np.arange(height) + 0.5) * (math.pi / height)


# --- file IO -------------------------------------------------------------

def read_image(path) -> RasterImage:
    path = Path(path)
    ext = path.suffix.lower()
    if ext == ".png":
        from PIL import Image

        with Image.open(path) as im:
            if im.mode not in ("L", "LA", "RGB", "RGBA"):
                im = im.convert("RGBA" if "A" in im.getbands() else "RGB")
            return RasterImage(np.asarray(im, dtype=np.uint8))
    if ext == ".pfm":
        return _read_pfm(path)
    raise ValueError(f"unsupported image extension {ext!r} (use .png or .pfm)")


def write_image(path, img: RasterImage) -> None:
    path = Path(path)
    ext = path.suffix.lower()
    if ext == ".png":
        from PIL import Image

        px = img.pixels
        if px.dtype != np.uint8:
            px = np.clip(np.rint(px * 255.0), 0, 255).astype(np.uint8)
        data = px[:, :, 0] if px.shape[2] == 1 else px
        Image.fromarray(data).save(path)
        return
    if ext == ".pfm":
        _write_pfm(path, img)
        return
    raise ValueError(f"unsupported image extension {ext!r} (use .png or .pfm)")


def _read_pfm(path: Path) -> RasterImage:
    with open(path, "rb") as fh:
        kind = fh.readline().strip()
        if kind not in (b"PF", b"Pf"):
            raise ValueError(f"{path} is not a PFM file")
        width, height = (int(v) for v in fh.readline().split())
        scale = float(fh.readline())
        dtype = "<f4" if scale < 0 else ">f4"
        chans = 3 if kind == b"PF" else 1
        data = np.frombuffer(fh.read(), dtype=dtype, count=width * height * chans)
    px = data.reshape(height, width, chans)[::-1]
    return RasterImage(px.astype(np.float32))


def _write_pfm(path: Path, img: RasterImage) -> None:
    px = img.pixels
    if px.dtype == np.uint8:
        px = px.astype(np.float32) / 255.0
    if px.shape[2] not in (1, 3):
        raise ValueError("PFM holds 1 or 3 channels")
    kind = b"PF" if px.shape[2] == 3 else b"Pf"
    with open(path, "wb") as fh:
        fh.write(kind + b"\n")
        fh.write(f"{px.shape[1]} {px.shape[0]}\n".encode())
        fh.write(b"-1.0\n")
        fh.write(np.ascontiguousarray(px[::-1], dtype="<f4").tobytes())
