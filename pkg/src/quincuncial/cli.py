"""Command-line front end.

Angles are in degrees on the command line and in radians everywhere else.
Exit status is 0 on success, 1 for usage errors and 2 for bad data.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass, field

import numpy as np

from .constants import DEFAULT_PHI0
from .distortion import DEFAULT_STEP, BracketError, FlaggedSampleError, optimize_phi0, stats
from .raster import SamplingMethod, equirect_to_square, read_image, square_to_equirect, write_image
from .registry import NAMES, Projection, get_projection
from .types import HALF_PI, DomainError
from .vector import MAX_GAP_DEG, SvgStyle, graticule, load_geojson, project_path, render_svg

PROG = "quincuncial"
EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
ZERO_SNAP = 1e-14
NEG_PAIR = re.compile(r"^-[\d.][^,]*,")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse prints usage and exits 2; we want one line and status 1
    def error(self, message):
        raise UsageError(message)


@dataclass
class CliConfig:
    subcommand: str
    projection: str = "new"
    phi0: float | None = None
    fmt: str = "csv"
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.phi0 is not None:
            if not (0.0 < self.phi0 < HALF_PI):
                raise UsageError(f"--phi0 must lie in (0, pi/2), got {self.phi0!r}")
            if self.projection != "new":
                raise UsageError("--phi0 only applies to the new projection")

    def make_projection(self) -> Projection:
        try:
            return get_projection(self.projection, self.phi0)
        except DomainError as exc:
            raise DataError(str(exc)) from exc


def fmt_num(v: float) -> str:
    v = float(v)
    if abs(v) < ZERO_SNAP:
        v = 0.0
    return f"{v:.12g}"


def _round12(v: float) -> float:
    return float(fmt_num(v))


def _read_pairs(items, stdin) -> list[tuple[int, float, float]]:
    """Parse "a,b" records from the argument list, or stdin if it is empty.

    Blank lines and lines starting with '#' are skipped.  Returns
    (line number, a, b) triples.
    """
    source = items if items else stdin
    out = []
    for lineno, raw in enumerate(source, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        parts = [p.strip() for p in text.replace("\t", ",").split(",")]
        if len(parts) != 2:
            raise DataError(f"line {lineno}: expected two comma-separated numbers, got {text!r}")
        try:
            a, b = float(parts[0]), float(parts[1])
        except ValueError:
            raise DataError(f"line {lineno}: cannot parse {text!r} as numbers") from None
        if not (math.isfinite(a) and math.isfinite(b)):
            raise DataError(f"line {lineno}: non-finite value in {text!r}")
        out.append((lineno, a, b))
    return out


def _emit_pairs(rows, names, fmt, out):
    if fmt == "json":
        json.dump([{names[0]: _round12(a), names[1]: _round12(b)} for a, b in rows], out)
        out.write("\n")
        return
    sep = "," if fmt == "csv" else " "
    for a, b in rows:
        out.write(f"{fmt_num(a)}{sep}{fmt_num(b)}\n")


def cmd_project(cfg: CliConfig, stdin, out) -> int:
    records = _read_pairs(cfg.options["coords"], stdin)
    for lineno, phi_deg, _ in records:
        if abs(phi_deg) > 90.0:
            raise DataError(f"line {lineno}: latitude {phi_deg!r} outside [-90, 90]")
    proj = cfg.make_projection()
    if not records:
        _emit_pairs([], ("x", "y"), cfg.fmt, out)
        return EXIT_OK
    phi = np.radians([r[1] for r in records])
    lam = np.radians([r[2] for r in records])
    x, y = proj.forward(phi, lam)
    _emit_pairs(zip(x.tolist(), y.tolist()), ("x", "y"), cfg.fmt, out)
    return EXIT_OK


def cmd_invert(cfg: CliConfig, stdin, out) -> int:
    records = _read_pairs(cfg.options["coords"], stdin)
    for lineno, x, y in records:
        if abs(x) > 1.0 or abs(y) > 1.0:
            raise DataError(f"line {lineno}: map point ({x!r}, {y!r}) lies outside [-1, 1]^2")
    proj = cfg.make_projection()
    if not records:
        _emit_pairs([], ("phi", "lambda"), cfg.fmt, out)
        return EXIT_OK
    phi, lam = proj.inverse(np.array([r[1] for r in records]), np.array([r[2] for r in records]))
    rows = zip(np.degrees(phi).tolist(), np.degrees(lam).tolist())
    _emit_pairs(rows, ("phi", "lambda"), cfg.fmt, out)
    return EXIT_OK


def cmd_stats(cfg: CliConfig, stdin, out) -> int:
    n, step = cfg.options["n"], cfg.options["step"]
    if n < 100:
        raise UsageError("--n must be at least 100 for stats")
    if not step > 0.0:
        raise UsageError("--step must be positive")
    proj = cfg.make_projection()
    res = stats(proj, n=n, step=step)
    row = dict(projection=cfg.projection, **res.as_row())
    if cfg.fmt == "json":
        json.dump({k: (_round12(v) if isinstance(v, float) else v) for k, v in row.items()}, out)
        out.write("\n")
    elif cfg.fmt == "csv":
        out.write(",".join(row) + "\n")
        out.write(",".join(v if isinstance(v, str) else fmt_num(v) if isinstance(v, float)
                           else str(v) for v in row.values()) + "\n")
    else:
        for key, v in row.items():
            out.write(f"{key:<10} {fmt_num(v) if isinstance(v, float) else v}\n")
    return EXIT_OK


def cmd_optimize(cfg: CliConfig, stdin, out) -> int:
    o = cfg.options
    if cfg.projection != "new":
        raise UsageError("optimize only applies to the new projection")
    n = o["n"] if o["n"] is not None else 2000
    try:
        res = optimize_phi0(o["lo"], o["hi"], n, o["tol"], o["step"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    row = dict(phi0=res.phi0, mean_omega=res.objective, lo=res.bracket[0], hi=res.bracket[1],
               iterations=res.iterations, offset_from_default=res.phi0 - DEFAULT_PHI0)
    if cfg.fmt == "json":
        json.dump({k: (_round12(v) if isinstance(v, float) else v) for k, v in row.items()}, out)
        out.write("\n")
    elif cfg.fmt == "csv":
        out.write(",".join(row) + "\n")
        out.write(",".join(fmt_num(v) if isinstance(v, float) else str(v)
                           for v in row.values()) + "\n")
    else:
        for key, v in row.items():
            out.write(f"{key:<20} {fmt_num(v) if isinstance(v, float) else v}\n")
    return EXIT_OK


def cmd_reproject(cfg: CliConfig, stdin, out) -> int:
    o = cfg.options
    if o["input"] is None or o["output"] is None:
        raise UsageError("reproject needs --in and --out")
    proj = cfg.make_projection()
    method = SamplingMethod(o["sampling"])
    src = read_image(o["input"])
    if o["direction"] == "to-square":
        size = o["size"] if o["size"] is not None else src.height
        img = equirect_to_square(src, size, method=method, projection=proj)
    else:
        width = o["size"] if o["size"] is not None else 2 * src.width
        img = square_to_equirect(src, width, method=method, projection=proj)
    write_image(o["output"], img)
    return EXIT_OK


def cmd_graticule(cfg: CliConfig, stdin, out) -> int:
    o = cfg.options
    if not 0.0 < o["densify"] <= MAX_GAP_DEG:
        raise UsageError(f"--densify must lie in (0, {MAX_GAP_DEG}] degrees")
    proj = cfg.make_projection()
    paths = [project_path(p, projection=proj) for p in graticule(o["spacing"], o["densify"])]
    land = None
    if o["land"] is not None:
        land = [project_path(p, projection=proj) for p in load_geojson(o["land"], o["densify"])]
    style = SvgStyle(stroke=o["stroke"], stroke_width=o["stroke_width"])
    svg = render_svg(paths, style, o["size"] if o["size"] is not None else 800, land)
    if o["output"] is None:
        out.write(svg)
    else:
        with open(o["output"], "w", encoding="utf-8") as fh:
            fh.write(svg)
    return EXIT_OK


COMMANDS = {
    "project": cmd_project, "invert": cmd_invert, "stats": cmd_stats,
    "optimize": cmd_optimize, "reproject": cmd_reproject, "graticule": cmd_graticule,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--projection", choices=NAMES, default="new")
    common.add_argument("--phi0", type=float, default=None,
                        help="dividing-point latitude in radians (default 3pi/8)")
    common.add_argument("--format", dest="fmt", choices=("csv", "json", "text"), default="csv")

    parser = _Parser(prog=PROG, description="Equal-area quincuncial sphere-to-square map.")
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("project", parents=[common], help="lat,lon degrees -> x,y")
    p.add_argument("coords", nargs="*", help='"lat,lon" pairs; read from stdin when absent')
    p = sub.add_parser("invert", parents=[common], help="x,y -> lat,lon degrees")
    p.add_argument("coords", nargs="*", help='"x,y" pairs; read from stdin when absent')

    p = sub.add_parser("stats", parents=[common], help="angular distortion summary")
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--step", type=float, default=DEFAULT_STEP)

    p = sub.add_parser("optimize", parents=[common], help="search for the best phi0")
    p.add_argument("--lo", type=float, default=1.0)
    p.add_argument("--hi", type=float, default=1.35)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--step", type=float, default=DEFAULT_STEP)

    p = sub.add_parser("reproject", parents=[common], help="equirectangular <-> square raster")
    p.add_argument("--in", dest="input")
    p.add_argument("--out", dest="output")
    p.add_argument("--direction", choices=("to-square", "to-equirect"), default="to-square")
    p.add_argument("--size", type=int, default=None,
                   help="square side (to-square) or output width (to-equirect)")
    p.add_argument("--sampling", choices=[m.value for m in SamplingMethod], default="bilinear")

    p = sub.add_parser("graticule", parents=[common], help="SVG graticule and land outlines")
    p.add_argument("--spacing", type=float, default=10.0, help="degrees")
    p.add_argument("--densify", type=float, default=MAX_GAP_DEG,
                   help=f"max vertex gap in degrees, at most {MAX_GAP_DEG}")
    p.add_argument("--size", type=int, default=None, help="SVG side in pixels (default 800)")
    p.add_argument("--stroke", default=SvgStyle.stroke)
    p.add_argument("--stroke-width", type=float, default=SvgStyle.stroke_width)
    p.add_argument("--land", default=None, help="GeoJSON file of land polygons")
    p.add_argument("--out", dest="output", default=None, help="SVG path (default stdout)")
    return parser


def _config(ns: argparse.Namespace) -> CliConfig:
    opts = {k: v for k, v in vars(ns).items()
            if k not in ("subcommand", "projection", "phi0", "fmt")}
    return CliConfig(ns.subcommand, ns.projection, ns.phi0, ns.fmt, opts)


def _shield_negative_pairs(argv):
    # argparse would read "-12.5,30" as an option flag; a leading space keeps
    # it positional and float() ignores it
    return [f" {a}" if NEG_PAIR.match(a) else a for a in argv]


def main(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    argv = _shield_negative_pairs(sys.argv[1:] if argv is None else list(argv))
    stdin = sys.stdin if stdin is None else stdin
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    name = PROG
    try:
        ns = build_parser().parse_args(argv)
        name = f"{PROG} {ns.subcommand}"
        cfg = _config(ns)
        return COMMANDS[cfg.subcommand](cfg, stdin, stdout)
    except BrokenPipeError:
        # downstream reader went away (e.g. piped into head); not our failure
        return EXIT_OK
    except UsageError as exc:
        stderr.write(f"{name}: usage error: {exc}\n")
        return EXIT_USAGE
    except (DataError, DomainError, FlaggedSampleError, BracketError, ValueError, OSError) as exc:
        msg = " ".join(str(exc).split())
        stderr.write(f"{name}: error: {msg}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
