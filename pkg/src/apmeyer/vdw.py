"""Monochromatic grid search in colored cubes, and coloring transfer.

A depth-n grid in {0..N}^d is the set (l_j + m_j k_j) over m in {0..n}^d,
i.e. an axis-aligned progression with k+1 points per axis.  find_mono_grid is
the exhaustive engine behind every van der Waerden style argument here; no
numeric bound is ever evaluated, callers escalate the cube size until the
search succeeds.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import NoMonoGrid
from .progression import ArithmeticProgression, _add, _scale, ap_points, ap_rank


@dataclass(frozen=True)
class Grid:
    offsets: tuple[int, ...]
    steps: tuple[int, ...]
    depth: int

    def __post_init__(self):
        if len(self.offsets) != len(self.steps):
            raise ValueError("offsets and steps must have the same dimension")
        if any(k < 1 for k in self.steps):
            raise ValueError("steps must be positive")
        if any(l < 0 for l in self.offsets) or self.depth < 0:
            raise ValueError("offsets and depth must be natural numbers")

    @property
    def dim(self) -> int:
        return len(self.offsets)


def grid_points(grid: Grid):
    """(n+1)^d points, lexicographic in the multi-index."""
    return [
        tuple(l + m * k for l, m, k in zip(grid.offsets, ms, grid.steps))
        for ms in product(range(grid.depth + 1), repeat=grid.dim)
    ]


class CubeColoring:
    """Total coloring of the cube {0..N}^d with colors 0..r-1."""

    def __init__(self, cube_size: int, dim: int, colors):
        self.cube_size = int(cube_size)
        self.dim = int(dim)
        self.colors = dict(colors)
        expected = (self.cube_size + 1) ** self.dim
        if len(self.colors) != expected:
            raise ValueError(f"coloring must be total on the cube ({expected} points)")
        palette = set(self.colors.values())
        if not palette:
            raise ValueError("need at least one color")
        self.num_colors = len(palette)

    @classmethod
    def from_function(cls, cube_size: int, dim: int, fn):
        colors = {}
        for c in product(range(cube_size + 1), repeat=dim):
            colors[c] = fn(c)
        return cls(cube_size, dim, colors)


def find_mono_grid(coloring: CubeColoring, depth: int):
    """First monochromatic grid of the given depth, or None.

    Deterministic exhaustive scan: offsets in lexicographic order outermost,
    steps lexicographic innermost.  Every returned grid is re-verified
    monochromatic and inside the cube.
    """
    n = coloring.cube_size
    d = coloring.dim
    if depth == 0:
        origin = (0,) * d
        return Grid(origin, (1,) * d, 0) if n >= 1 else None
    for offsets in product(range(n + 1), repeat=d):
        step_ranges = [range(1, (n - l) // depth + 1) for l in offsets]
        if any(len(r) == 0 for r in step_ranges):
            continue
        for steps in product(*step_ranges):
            grid = Grid(offsets, steps, depth)
            pts = grid_points(grid)
            color = coloring.colors[pts[0]]
            if all(coloring.colors[p] == color for p in pts[1:]):
                assert all(max(p) <= n for p in pts)
                return grid
    return None


def transfer_ap(ap: ArithmeticProgression, decompose, translates, target_depth: int):
    """Move a progression across a finite-translate covering.

    `decompose` maps each progression point to the index of a translate f_j
    with point - f_j in the target set; it must be total on the progression.
    The coefficient cube is colored by translate index; a monochromatic grid
    of the requested depth rebases the progression into the winning translate:
    base' = s + sum(l_j r_j) - f, ratios' = k_j r_j.

    Raises NoMonoGrid when the input progression is too short (callers retry
    with a longer progression, typically by doubling).
    """
    translates = [tuple(t) if isinstance(t, (tuple, list)) else (t,) for t in translates]
    colors = {}
    for c in ap.coefficient_cube():
        idx = decompose(ap.point(c))
        if idx is None:
            raise ValueError(f"decompose is not total: no translate for coefficients {c}")
        if not 0 <= idx < len(translates):
            raise ValueError(f"decompose returned invalid translate index {idx}")
        colors[c] = idx
    coloring = CubeColoring(ap.length, ap.dimension, colors)
    grid = find_mono_grid(coloring, target_depth)
    if grid is None:
        raise NoMonoGrid(
            f"no monochromatic depth-{target_depth} grid in the {ap.length}-cube; "
            "retry with a longer progression"
        )
    winner = colors[grid_points(grid)[0]]
    f = translates[winner]
    base = ap.base
    for l, r in zip(grid.offsets, ap.ratios):
        if l:
            base = base + _scale(r, l) if not isinstance(base, tuple) else _add(base, _scale(r, l))
    base = base + _scale(f, -1) if not isinstance(base, tuple) else _add(base, _scale(f, -1))
    ratios = tuple(_scale(r, k) for r, k in zip(ap.ratios, grid.steps))
    out = ArithmeticProgression(base, ratios, target_depth, kind=ap.kind)

    # every output point is an input point of the winning color, shifted by -f
    source = {
        tuple(l + m * k for l, m, k in zip(grid.offsets, ms, grid.steps))
        for ms in product(range(target_depth + 1), repeat=ap.dimension)
    }
    for c in source:
        assert colors[c] == winner
    assert ap_rank(out) == ap_rank(ap)
    expected = set()
    for c in source:
        p = ap.point(c)
        p = _add(p, _scale(f, -1)) if isinstance(p, tuple) else p + _scale(f, -1)
        expected.add(p)
    assert set(ap_points(out)) == expected
    return out
