"""Cut-and-project schemes over R^d x R^m with exact quadratic coordinates.

A scheme is a rank-(d+m) lattice given by generators whose physical part lives
in R^d and internal part in R^m, all coordinates in Q(sqrt(D)).  Everything
here is exact: model-set enumeration derives a provably exhaustive integer
bounding box from the inverse generator matrix with outward rational rounding,
and every membership decision is an exact sign computation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import BudgetExceeded, NotInLattice, UnboundedRegion
from .exact import (
    QuadScalar,
    as_quad,
    flatten_vector,
    quad_bounds,
    rank_over_Q,
    solve_columns,
    sqrt_upper,
)

DEFAULT_BUDGET = 10 ** 6


# ---------------------------------------------------------------------------
# windows and regions
# ---------------------------------------------------------------------------

class Box:
    """Axis box with per-side open/closed flags; exact membership."""

    def __init__(self, lo, hi, lo_closed=None, hi_closed=None):
        self.lo = tuple(as_quad(x) for x in lo)
        self.hi = tuple(as_quad(x) for x in hi)
        n = len(self.lo)
        if len(self.hi) != n:
            raise ValueError("box bounds have mismatched dimensions")
        self.lo_closed = tuple(lo_closed) if lo_closed is not None else (True,) * n
        self.hi_closed = tuple(hi_closed) if hi_closed is not None else (True,) * n
        if len(self.lo_closed) != n or len(self.hi_closed) != n:
            raise ValueError("boundary flags have mismatched dimensions")
        for a, b in zip(self.lo, self.hi):
            if not (a < b):
                raise ValueError("box requires lo < hi exactly on every axis")

    @property
    def dim(self) -> int:
        return len(self.lo)

    def contains(self, point) -> bool:
        if len(point) != self.dim:
            raise ValueError("point dimension mismatch")
        for x, a, b, ac, bc in zip(point, self.lo, self.hi, self.lo_closed, self.hi_closed):
            x = as_quad(x)
            s = (x - a).sign()
            if s < 0 or (s == 0 and not ac):
                return False
            s = (b - x).sign()
            if s < 0 or (s == 0 and not bc):
                return False
        return True

    def rational_bounds(self) -> tuple[list[Fraction], list[Fraction]]:
        los = [quad_bounds(a)[0] for a in self.lo]
        his = [quad_bounds(b)[1] for b in self.hi]
        return los, his

    def translate(self, shift) -> "Box":
        shift = [as_quad(s) for s in shift]
        return Box(
            [a + s for a, s in zip(self.lo, shift)],
            [b + s for b, s in zip(self.hi, shift)],
            self.lo_closed,
            self.hi_closed,
        )

    def key(self):
        return (
            "box",
            tuple((q.a, q.b, q.D) for q in self.lo),
            tuple((q.a, q.b, q.D) for q in self.hi),
            self.lo_closed,
            self.hi_closed,
        )

    def __repr__(self):
        axes = ", ".join(
            f"{'[' if ac else '('}{a}, {b}{']' if bc else ')'}"
            for a, b, ac, bc in zip(self.lo, self.hi, self.lo_closed, self.hi_closed)
        )
        return f"Box({axes})"


class Ball:
    """Closed ball with rational squared radius; exact membership."""

    def __init__(self, center, radius_sq):
        self.center = tuple(as_quad(x) for x in center)
        self.radius_sq = Fraction(radius_sq)
        if self.radius_sq <= 0:
            raise ValueError("ball requires radius_sq > 0")

    @property
    def dim(self) -> int:
        return len(self.center)

    def contains(self, point) -> bool:
        if len(point) != self.dim:
            raise ValueError("point dimension mismatch")
        dist = QuadScalar(0)
        for x, c in zip(point, self.center):
            delta = as_quad(x) - c
            dist = dist + delta * delta
        return (dist - self.radius_sq).sign() <= 0

    def rational_bounds(self) -> tuple[list[Fraction], list[Fraction]]:
        r = sqrt_upper(self.radius_sq)
        los = [quad_bounds(c)[0] - r for c in self.center]
        his = [quad_bounds(c)[1] + r for c in self.center]
        return los, his

    def key(self):
        return ("ball", tuple((q.a, q.b, q.D) for q in self.center), self.radius_sq)

    def __repr__(self):
        return f"Ball(center=({', '.join(map(str, self.center))}), radius_sq={self.radius_sq})"


class ShiftedUnion:
    """Finite union of translated windows; member iff member of some part."""

    def __init__(self, parts):
        parts = list(parts)
        if not parts:
            raise ValueError("ShiftedUnion requires at least one part")
        self.parts = tuple((tuple(as_quad(s) for s in shift), base) for shift, base in parts)
        dims = {len(shift) for shift, _ in self.parts} | {base.dim for _, base in self.parts}
        if len(dims) != 1:
            raise ValueError("ShiftedUnion parts have mismatched dimensions")

    @property
    def dim(self) -> int:
        return len(self.parts[0][0])

    def contains(self, point) -> bool:
        pt = [as_quad(x) for x in point]
        for shift, base in self.parts:
            if base.contains([x - s for x, s in zip(pt, shift)]):
                return True
        return False

    def rational_bounds(self) -> tuple[list[Fraction], list[Fraction]]:
        los = None
        his = None
        for shift, base in self.parts:
            blo, bhi = base.rational_bounds()
            slo = [quad_bounds(s)[0] for s in shift]
            shi = [quad_bounds(s)[1] for s in shift]
            plo = [a + b for a, b in zip(blo, slo)]
            phi = [a + b for a, b in zip(bhi, shi)]
            los = plo if los is None else [min(a, b) for a, b in zip(los, plo)]
            his = phi if his is None else [max(a, b) for a, b in zip(his, phi)]
        return los, his

    def simplify(self):
        """Collapse a single translated box to a plain Box."""
        if len(self.parts) == 1 and isinstance(self.parts[0][1], Box):
            shift, base = self.parts[0]
            return base.translate(shift)
        return self

    def key(self):
        return (
            "shifted_union",
            tuple((tuple((q.a, q.b, q.D) for q in shift), base.key()) for shift, base in self.parts),
        )

    def __repr__(self):
        return f"ShiftedUnion({len(self.parts)} parts)"


def trivial_window() -> Box:
    """The 0-dimensional window used by degenerate schemes with m = 0."""
    return Box((), ())


# ---------------------------------------------------------------------------
# schemes and lattice points
# ---------------------------------------------------------------------------

class LatticePoint:
    """Integer coordinates plus cached exact physical/internal parts.

    Equality and hashing are by integer coordinates; the cached parts are the
    exact generator combination for the owning scheme.
    """

    __slots__ = ("coords", "physical", "internal")

    def __init__(self, coords, physical, internal):
        self.coords = tuple(coords)
        self.physical = tuple(physical)
        self.internal = tuple(internal)

    def __eq__(self, other):
        return isinstance(other, LatticePoint) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return f"LatticePoint{self.coords}"


@dataclass(frozen=True)
class ValidationReport:
    lattice_invertible: bool
    projection_injective: bool
    density: str  # proved | assumed | unverified | failed | vacuous

    @property
    def ok(self) -> bool:
        return (
            self.lattice_invertible
            and self.projection_injective
            and self.density != "failed"
        )


class CutProjectScheme:
    """Lattice of rank d+m with physical part in R^d and internal part in R^m."""

    def __init__(self, d, m, D, generators, density="unverified", name=None):
        self.d = int(d)
        self.m = int(m)
        self.D = int(D)
        if self.d < 1 or self.m < 0:
            raise ValueError("require d >= 1 and m >= 0")
        gens = tuple(tuple(as_quad(x) for x in g) for g in generators)
        if len(gens) != self.d + self.m or any(len(g) != self.d + self.m for g in gens):
            raise ValueError("need d+m generators of full dimension d+m")
        self.generators = gens
        self.density = density
        self.name = name
        self._inverse = None

    # -- basic maps --------------------------------------------------------

    def physical_part(self, gen) -> tuple[QuadScalar, ...]:
        return gen[: self.d]

    def internal_part(self, gen) -> tuple[QuadScalar, ...]:
        return gen[self.d:]

    def star(self, coords) -> LatticePoint:
        z = tuple(int(c) for c in coords)
        if len(z) != self.d + self.m:
            raise ValueError("coordinate dimension mismatch")
        total = [QuadScalar(0)] * (self.d + self.m)
        for c, gen in zip(z, self.generators):
            if c:
                for i, x in enumerate(gen):
                    total[i] = total[i] + c * x
        return LatticePoint(z, tuple(total[: self.d]), tuple(total[self.d:]))

    def physical_of(self, coords) -> tuple[QuadScalar, ...]:
        """Physical part for possibly rational coordinates."""
        total = [QuadScalar(0)] * self.d
        for c, gen in zip(coords, self.generators):
            if c:
                for i in range(self.d):
                    total[i] = total[i] + c * gen[i]
        return tuple(total)

    def internal_of(self, coords) -> tuple[QuadScalar, ...]:
        total = [QuadScalar(0)] * self.m
        for c, gen in zip(coords, self.generators):
            if c:
                for i in range(self.m):
                    total[i] = total[i] + c * gen[self.d + i]
        return tuple(total)

    # -- exact inverse of the generator matrix ------------------------------

    def inverse_matrix(self):
        """Rows map full coordinates back to integer coordinates: z = Ginv . x."""
        if self._inverse is not None:
            return self._inverse
        n = self.d + self.m
        # column j of G is generator j
        A = [[self.generators[j][i] for j in range(n)] for i in range(n)]
        I = [[QuadScalar(1 if i == j else 0) for j in range(n)] for i in range(n)]
        for col in range(n):
            sel = next((r for r in range(col, n) if A[r][col]), None)
            if sel is None:
                raise ValueError("generators do not form a lattice (singular matrix)")
            A[col], A[sel] = A[sel], A[col]
            I[col], I[sel] = I[sel], I[col]
            pv = A[col][col]
            A[col] = [x / pv for x in A[col]]
            I[col] = [x / pv for x in I[col]]
            for r in range(n):
                if r != col and A[r][col]:
                    f = A[r][col]
                    A[r] = [x - f * y for x, y in zip(A[r], A[col])]
                    I[r] = [x - f * y for x, y in zip(I[r], I[col])]
        self._inverse = I
        return I

    def key(self):
        return (
            self.d,
            self.m,
            self.D,
            tuple(tuple((q.a, q.b, q.D) for q in g) for g in self.generators),
        )

    def __repr__(self):
        label = self.name or f"{self.d}+{self.m}"
        return f"CutProjectScheme({label}, D={self.D})"


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def _axis_is_dense(values) -> bool:
    # the group generated by quadratic reals is dense in R iff some ratio is
    # irrational, i.e. the (1, sqrt(D)) coefficient vectors have rank >= 2
    vecs = [flatten_vector([v]) for v in values if v]
    return rank_over_Q(vecs) >= 2


def validate(cps: CutProjectScheme) -> ValidationReport:
    """Exact lattice/injectivity checks plus a density status.

    Density of the internal projection is decided exactly for m <= 1; for
    m >= 2 a failed per-axis test refutes density, otherwise the declared
    status (proved for built-ins, assumed for user files) is reported.
    """
    try:
        cps.inverse_matrix()
        invertible = True
    except ValueError:
        invertible = False
    phys_rows = [flatten_vector(cps.physical_part(g)) for g in cps.generators]
    injective = rank_over_Q(phys_rows) == cps.d + cps.m
    if cps.m == 0:
        density = "vacuous"
    else:
        axis_dense = [
            _axis_is_dense([g[cps.d + i] for g in cps.generators]) for i in range(cps.m)
        ]
        if not all(axis_dense):
            density = "failed"
        elif cps.m == 1:
            density = "proved"
        elif cps.density in ("proved", "assumed"):
            density = cps.density
        else:
            density = "unverified"
    return ValidationReport(invertible, injective, density)


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def _interval_dot(row, los, his):
    """Exact interval arithmetic for sum_j row[j] * [los[j], his[j]]."""
    lo = QuadScalar(0)
    hi = QuadScalar(0)
    for c, a, b in zip(row, los, his):
        if not c:
            continue
        if c.sign() > 0:
            lo = lo + c * a
            hi = hi + c * b
        else:
            lo = lo + c * b
            hi = hi + c * a
    return lo, hi


def enumerate_model_set(cps, window, region, budget=DEFAULT_BUDGET):
    """All lattice points with physical part in `region` and star in `window`.

    Exhaustive by construction: the integer coordinate box is the image of the
    (region x window) bounding box under the exact inverse generator matrix,
    rounded outward.  Output sorted lexicographically by integer coordinates.
    """
    if not isinstance(region, (Box, Ball)):
        raise UnboundedRegion(f"region must be a bounded box or ball, got {region!r}")
    if region.dim != cps.d:
        raise ValueError("region dimension must match the physical dimension")
    if window is None:
        window = trivial_window()
    if window.dim != cps.m:
        raise ValueError("window dimension must match the internal dimension")

    rlo, rhi = region.rational_bounds()
    wlo, whi = window.rational_bounds()
    los = rlo + wlo
    his = rhi + whi
    inv = cps.inverse_matrix()
    ranges = []
    total = 1
    for row in inv:
        lo, hi = _interval_dot(row, los, his)
        zlo = lo.__ceil__()
        zhi = hi.__floor__()
        if zhi < zlo:
            return []
        ranges.append(range(zlo, zhi + 1))
        total *= zhi - zlo + 1
        if total > budget:
            raise BudgetExceeded(f"integer bounding box of size {total} exceeds budget {budget}")

    points = []
    for z in product(*ranges):
        p = cps.star(z)
        if region.contains(p.physical) and window.contains(p.internal):
            points.append(p)
    points.sort(key=lambda p: p.coords)
    return points


# ---------------------------------------------------------------------------
# lattice refinement and translate lifting
# ---------------------------------------------------------------------------

def refine_lattice(cps: CutProjectScheme, n: int) -> CutProjectScheme:
    """Scheme with generators divided by n; the original lattice is a sublattice."""
    n = int(n)
    if n <= 0:
        raise ValueError("refinement factor must be a positive integer")
    gens = [tuple(x / n for x in g) for g in cps.generators]
    name = None if cps.name is None else f"{cps.name}/{n}"
    return CutProjectScheme(cps.d, cps.m, cps.D, gens, density=cps.density, name=name)


def rational_coords(cps: CutProjectScheme, t):
    """Rational coordinates of a physical vector in the generator basis, or None."""
    t = [as_quad(x) for x in t]
    if len(t) != cps.d:
        raise ValueError("translate dimension must match the physical dimension")
    for x in t:
        # a foreign radical can never lie in the span of 1 and sqrt(D)
        if x.b != 0 and x.D != cps.D:
            return None
    cols = [flatten_vector(cps.physical_part(g)) for g in cps.generators]
    target = flatten_vector(t)
    return solve_columns(cols, target)


def lift_translate(cps: CutProjectScheme, t):
    """Internal part of the unique lattice preimage of a physical vector."""
    coords = rational_coords(cps, t)
    if coords is None:
        raise NotInLattice(f"{tuple(map(str, t))} is not in the rational span of the lattice")
    if any(c.denominator != 1 for c in coords):
        raise NotInLattice(f"{tuple(map(str, t))} has non-integer lattice coordinates")
    return cps.internal_of([int(c) for c in coords])


# ---------------------------------------------------------------------------
# built-in schemes
# ---------------------------------------------------------------------------

def builtin(name: str) -> CutProjectScheme:
    """Standard example schemes: fibonacci, silver_mean, ammann_beenker, integer_lattice(d)."""
    name = name.strip()
    if name == "fibonacci":
        half = Fraction(1, 2)
        phi = QuadScalar(half, half, 5)
        phi_bar = QuadScalar(half, -half, 5)
        return CutProjectScheme(
            1, 1, 5,
            [(QuadScalar(1), QuadScalar(1)), (phi, phi_bar)],
            density="proved", name="fibonacci",
        )
    if name == "silver_mean":
        r2 = QuadScalar(0, 1, 2)
        return CutProjectScheme(
            1, 1, 2,
            [(QuadScalar(1), QuadScalar(1)), (1 + r2, 1 - r2)],
            density="proved", name="silver_mean",
        )
    if name == "ammann_beenker":
        one = QuadScalar(1)
        zero = QuadScalar(0)
        r2 = QuadScalar(0, 1, 2)
        gens = [
            (one, zero, one, zero),
            (r2, zero, -r2, zero),
            (zero, one, zero, one),
            (zero, r2, zero, -r2),
        ]
        return CutProjectScheme(2, 2, 2, gens, density="proved", name="ammann_beenker")
    if name.startswith("integer_lattice(") and name.endswith(")"):
        d = int(name[len("integer_lattice("):-1])
        if d < 1:
            raise ValueError("integer_lattice needs a positive dimension")
        gens = [
            tuple(QuadScalar(1 if i == j else 0) for i in range(d)) for j in range(d)
        ]
        return CutProjectScheme(d, 0, 5, gens, density="proved", name=f"integer_lattice({d})")
    raise ValueError(f"unknown builtin scheme {name!r}")


# ---------------------------------------------------------------------------
# Delone / Meyer certificates
# ---------------------------------------------------------------------------

def _as_physical_tuples(points):
    out = []
    for p in points:
        if isinstance(p, LatticePoint):
            out.append(p.physical)
        elif isinstance(p, (tuple, list)):
            out.append(tuple(as_quad(x) for x in p))
        else:
            out.append((as_quad(p),))
    return out


def _dist_sq(p, q) -> QuadScalar:
    total = QuadScalar(0)
    for x, y in zip(p, q):
        delta = x - y
        total = total + delta * delta
    return total


def _min_pairwise_dist_sq(pts, budget=DEFAULT_BUDGET):
    if len(pts) < 2:
        raise ValueError("need at least two points")
    dim = len(pts[0])
    if dim == 1:
        vals = sorted(p[0] for p in pts)
        best = None
        for a, b in zip(vals, vals[1:]):
            gap = b - a
            if gap:
                g2 = gap * gap
                if best is None or g2 < best:
                    best = g2
        if best is None:
            raise ValueError("all points coincide")
        return best
    if len(pts) * len(pts) > budget:
        raise BudgetExceeded("pairwise distance scan exceeds budget")
    best = None
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d2 = _dist_sq(pts[i], pts[j])
            if d2 and (best is None or d2 < best):
                best = d2
    if best is None:
        raise ValueError("all points coincide")
    return best


def delone_certificate(points, region, resolution=Fraction(1, 8)):
    """(exact min squared gap, rational upper bound on the largest empty gap).

    The first component is authoritative and exact.  The second is a
    finite-sample covering bound: for d = 1 the exact largest consecutive gap
    (bracketed upward when irrational), for d >= 2 a grid certificate at the
    given resolution.
    """
    pts = _as_physical_tuples(points)
    if len(pts) < 2:
        raise ValueError("need at least two points for a Delone certificate")
    min_sq = _min_pairwise_dist_sq(pts)
    dim = len(pts[0])
    if dim == 1:
        vals = sorted(p[0] for p in pts)
        worst = QuadScalar(0)
        for a, b in zip(vals, vals[1:]):
            gap = b - a
            if gap > worst:
                worst = gap
        max_bound = quad_bounds(worst, bits=40)[1]
    else:
        lo, hi = region.rational_bounds()
        worst_sq = Fraction(0)
        grids = [_rational_range(a, b, resolution) for a, b in zip(lo, hi)]
        for sample in product(*grids):
            nearest = None
            for p in pts:
                d2 = _dist_sq(sample, p)
                if nearest is None or d2 < nearest:
                    nearest = d2
            nb = quad_bounds(nearest, bits=40)[1]
            if nb > worst_sq:
                worst_sq = nb
        max_bound = 2 * (sqrt_upper(worst_sq) + resolution)
    return min_sq, max_bound


def _rational_range(lo: Fraction, hi: Fraction, step: Fraction):
    k = lo / step
    k0 = k.numerator // k.denominator
    out = []
    v = k0 * step
    while v <= hi:
        if v >= lo:
            out.append(v)
        v += step
    return out


def meyer_certificate(points, budget=DEFAULT_BUDGET):
    """Exact min squared distance among distinct elements of the difference set.

    A finite-radius certificate of uniform discreteness of L - L only: it
    speaks for the sampled points, not for the infinite set.
    """
    pts = _as_physical_tuples(points)
    if len(pts) < 2:
        raise ValueError("need at least two points for a Meyer certificate")
    diffs = {}
    for i in range(len(pts)):
        for j in range(len(pts)):
            if i != j:
                d = tuple(x - y for x, y in zip(pts[i], pts[j]))
                diffs[tuple((q.a, q.b, q.D) for q in d)] = d
        if len(diffs) * len(diffs) > budget:
            raise BudgetExceeded("difference set grew past the budget")
    return _min_pairwise_dist_sq(list(diffs.values()), budget=budget)
