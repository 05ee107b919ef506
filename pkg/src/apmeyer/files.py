"""File formats and inline grammars.

CPS files, window files, Meyer-expression files and progression files are
JSON; point lists and cube colorings are line-oriented text.  All numbers are
exact literals (`<rat>` or `<rat>+<rat>*sqrt(<D>)`); decimals appear only as
informative extras.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .aprank import MeyerExpr, SymbolicTranslate, meyer_expr
from .cps import Ball, Box, CutProjectScheme, ShiftedUnion, builtin
from .errors import ParseError
from .exact import (
    as_quad,
    decimal_str,
    format_rational,
    parse_quad,
    parse_rational,
)
from .progression import ArithmeticProgression
from .vdw import CubeColoring


def quad_literal(x) -> str:
    return as_quad(x).as_literal()


# ---------------------------------------------------------------------------
# schemes
# ---------------------------------------------------------------------------

def cps_to_dict(cps: CutProjectScheme) -> dict:
    return {
        "d": cps.d,
        "m": cps.m,
        "D": cps.D,
        "generators": [[quad_literal(x) for x in g] for g in cps.generators],
        "density": cps.density,
    }


def cps_from_dict(data: dict) -> CutProjectScheme:
    gens = [[parse_quad(x) for x in row] for row in data["generators"]]
    density = data.get("density", "unverified")
    if density not in ("proved", "assumed", "unverified"):
        density = "unverified"
    return CutProjectScheme(data["d"], data["m"], data["D"], gens, density=density)


def load_cps(spec: str) -> CutProjectScheme:
    """Builtin name or path to a CPS JSON file."""
    try:
        return builtin(spec)
    except ValueError:
        pass
    with open(spec) as fh:
        return cps_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# windows
# ---------------------------------------------------------------------------

def window_to_dict(window) -> dict:
    if isinstance(window, Box):
        return {
            "type": "box",
            "lo": [quad_literal(x) for x in window.lo],
            "hi": [quad_literal(x) for x in window.hi],
            "lo_closed": list(window.lo_closed),
            "hi_closed": list(window.hi_closed),
        }
    if isinstance(window, Ball):
        return {
            "type": "ball",
            "center": [quad_literal(x) for x in window.center],
            "radius_sq": format_rational(window.radius_sq),
        }
    if isinstance(window, ShiftedUnion):
        return {
            "type": "shifted_union",
            "parts": [
                {
                    "shift": [quad_literal(x) for x in shift],
                    "window": window_to_dict(base),
                }
                for shift, base in window.parts
            ],
        }
    raise TypeError(f"not a window: {window!r}")


def window_from_dict(data: dict):
    kind = data.get("type")
    if kind == "box":
        return Box(
            [parse_quad(x) for x in data["lo"]],
            [parse_quad(x) for x in data["hi"]],
            data.get("lo_closed"),
            data.get("hi_closed"),
        )
    if kind == "ball":
        return Ball([parse_quad(x) for x in data["center"]], parse_rational(data["radius_sq"]))
    if kind == "shifted_union":
        return ShiftedUnion(
            [
                ([parse_quad(x) for x in part["shift"]], window_from_dict(part["window"]))
                for part in data["parts"]
            ]
        )
    raise ParseError(f"unknown window type {kind!r}")


_BOX_AXIS_RE = re.compile(r"\[([^,\]]+),([^,\]]+)\]")


def parse_box_inline(text: str) -> Box:
    """`[lo,hi]` per axis, axes joined with `x`; closed boxes."""
    t = text.strip()
    axes = _BOX_AXIS_RE.findall(t)
    cleaned = _BOX_AXIS_RE.sub("", t).replace("x", "").strip()
    if not axes or cleaned:
        raise ParseError(f"malformed box {text!r}")
    lo = [parse_quad(a) for a, _ in axes]
    hi = [parse_quad(b) for _, b in axes]
    return Box(lo, hi)


def parse_window_arg(text: str):
    """Inline box like `[0,1]x[0,2]`, or a path to a window JSON file."""
    t = text.strip()
    if t.startswith("["):
        return parse_box_inline(t)
    with open(t) as fh:
        return window_from_dict(json.load(fh))


_REGION_BALL_RE = re.compile(r"\|x(?:-\(?([^)|]+)\)?)?\|\s*<=\s*(.+)")


def parse_region(text: str, dim: int):
    """`|x|<=r`, `|x-c|<=r` (c a scalar or comma tuple), or a box."""
    t = text.strip()
    m = _REGION_BALL_RE.fullmatch(t)
    if m:
        center_text, radius_text = m.groups()
        if center_text is None:
            center = [Fraction(0)] * dim
        else:
            parts = [p for p in center_text.split(",") if p.strip()]
            center = [parse_quad(p) for p in parts]
            if len(center) != dim:
                raise ParseError(f"region center has {len(center)} axes, expected {dim}")
        radius = parse_rational(radius_text)
        if radius <= 0:
            raise ParseError("region radius must be positive")
        return Ball(center, radius * radius)
    if t.startswith("["):
        box = parse_box_inline(t)
        if box.dim != dim:
            raise ParseError(f"region box has {box.dim} axes, expected {dim}")
        return box
    raise ParseError(f"malformed region {text!r}")


# ---------------------------------------------------------------------------
# Meyer expressions
# ---------------------------------------------------------------------------

def expr_to_dict(expr: MeyerExpr) -> dict:
    branches = []
    for branch in expr.branches:
        t = branch.translate
        if t.symbolic:
            translate = {"symbolic": t.tag, "approx": [repr(a) for a in t.approx]}
        else:
            translate = [quad_literal(x) for x in t.physical]
        branches.append({"translate": translate, "window": window_to_dict(branch.window)})
    return {"cps": cps_to_dict(expr.cps), "branches": branches}


def expr_from_dict(data: dict) -> MeyerExpr:
    cps_spec = data["cps"]
    cps = builtin(cps_spec) if isinstance(cps_spec, str) else cps_from_dict(cps_spec)
    specs = []
    for branch in data["branches"]:
        t = branch["translate"]
        if isinstance(t, dict):
            approx = tuple(float(a) for a in t.get("approx", ())) or (0.0,) * cps.d
            spec = SymbolicTranslate(t["symbolic"], approx)
        else:
            spec = [parse_quad(x) for x in t]
        specs.append((spec, window_from_dict(branch["window"])))
    return meyer_expr(cps, specs)


def load_expr(path: str) -> MeyerExpr:
    with open(path) as fh:
        return expr_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# progressions, point lists, colorings
# ---------------------------------------------------------------------------

def _coord_literal(x) -> str:
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return format_rational(x)
    return quad_literal(x)


def ap_to_dict(ap: ArithmeticProgression) -> dict:
    from .aprank import ExprPoint

    if isinstance(ap.base, ExprPoint):
        base = {
            "coords": [format_rational(c) for c in ap.base.coords],
            "tags": {t: k for t, k in ap.base.tags},
        }
    else:
        base = [_coord_literal(x) for x in ap.base]
    return {
        "base": base,
        "ratios": [[_coord_literal(x) for x in r] for r in ap.ratios],
        "length": ap.length,
        "coordinate_kind": ap.kind,
    }


def ap_from_dict(data: dict) -> ArithmeticProgression:
    kind = data.get("coordinate_kind", "lattice")

    def scalar(text):
        q = parse_quad(text)
        if kind == "lattice":
            if q.b != 0 or q.a.denominator != 1:
                raise ParseError(f"lattice coordinates must be integers, got {text!r}")
            return int(q.a)
        return q

    base = data["base"]
    if isinstance(base, dict):
        from .aprank import ExprPoint

        base = ExprPoint(
            tuple(parse_rational(c) for c in base["coords"]),
            tuple(sorted((t, int(k)) for t, k in base.get("tags", {}).items())),
        )
    else:
        base = tuple(scalar(x) for x in base)
    ratios = tuple(tuple(scalar(x) for x in r) for r in data["ratios"])
    return ArithmeticProgression(base, ratios, int(data["length"]), kind=kind)


def format_point_lines(points) -> str:
    """One point per line: integer coords, a `#`, then informative decimals."""
    lines = []
    for p in points:
        cols = [str(c) for c in p.coords] + ["#"] + [decimal_str(x) for x in p.physical]
        lines.append("\t".join(cols))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_point_lines(text: str):
    """Integer coordinate tuples from a point list (decimals are ignored)."""
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t") if "\t" in line else line.split()
        coords = []
        for f in fields:
            if f == "#":
                break
            coords.append(int(f))
        out.append(tuple(coords))
    return out


def parse_vector_lines(text: str):
    """Rational/quad vectors, one per line, whitespace separated.

    A `#` token ends a line early, so point-list files (integer coordinates
    followed by informative decimals) parse as their coordinate vectors.
    """
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        vec = []
        for tok in line.split():
            if tok == "#":
                break
            vec.append(parse_quad(tok))
        if vec:
            out.append(tuple(vec))
    return out


def format_coloring(coloring: CubeColoring) -> str:
    from itertools import product

    lines = [f"{coloring.cube_size} {coloring.dim} {coloring.num_colors}"]
    for c in product(range(coloring.cube_size + 1), repeat=coloring.dim):
        lines.append(" ".join(map(str, c + (coloring.colors[c],))))
    return "\n".join(lines) + "\n"


def parse_coloring(text: str) -> CubeColoring:
    lines = [ln for ln in (l.strip() for l in text.splitlines()) if ln]
    if not lines:
        raise ParseError("empty coloring file")
    header = lines[0].split()
    if len(header) != 3:
        raise ParseError("coloring header must be `N d r`")
    n, d, _ = map(int, header)
    colors = {}
    for ln in lines[1:]:
        nums = list(map(int, ln.split()))
        if len(nums) != d + 1:
            raise ParseError(f"coloring line must have {d} coordinates and a color: {ln!r}")
        colors[tuple(nums[:d])] = nums[d]
    return CubeColoring(n, d, colors)
