"""Equal-area quincuncial map of the sphere onto the square [-1, 1]^2.

The north pole sits at the centre of the square and the south pole at the
four corners.  Each octant of the sphere fills one right triangle of the
square, split into three sub-triangles around a dividing point whose
latitude ``phi0`` is a free parameter (3pi/8 by default).
"""

from .collignon import collignon_forward, collignon_inverse
from .constants import (DEFAULT_PHI0, ProjectionConstants, SubTriangle, SubTriangleGeom,
                        derive_constants)
from .distortion import (BracketError, DistortionStats, FlaggedSampleError, Phi0Result,
                         TissotSample, fibonacci_lattice, optimize_phi0, stats, tissot)
from .projection import forward, forward_array, inverse, inverse_array, trace
from .raster import (RasterImage, SamplingMethod, equirect_to_square, psnr, read_image,
                     sample_square, square_to_equirect, wrap_map_point, write_image)
from .registry import Projection, get_projection
from .types import DomainError, GeoCoord, MapPoint
from .vector import (GeoPath, MapPath, SvgStyle, densify_path, graticule, load_geojson,
                     project_path, render_svg)

__version__ = "0.1.0"

__all__ = [
    "BracketError", "DEFAULT_PHI0", "DistortionStats", "DomainError", "FlaggedSampleError",
    "GeoCoord", "GeoPath", "MapPath", "MapPoint", "Phi0Result", "Projection",
    "ProjectionConstants", "RasterImage", "SamplingMethod", "SubTriangle", "SubTriangleGeom",
    "SvgStyle", "TissotSample", "collignon_forward", "collignon_inverse", "densify_path",
    "derive_constants", "equirect_to_square", "fibonacci_lattice", "forward", "forward_array",
    "get_projection", "graticule", "inverse", "inverse_array", "load_geojson", "optimize_phi0",
    "project_path", "psnr", "read_image", "render_svg", "sample_square", "square_to_equirect",
    "stats", "tissot", "trace", "wrap_map_point", "write_image",
]
