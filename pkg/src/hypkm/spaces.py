"""Metric and hyperbolic spaces with a convexity operator, plus axiom checking.

A hyperbolic space here is a metric space together with a convex-combination
operator ``W(x, y, lam)`` subject to four axioms:

    W1:  d(z, W(x,y,l)) <= (1-l) d(z,x) + l d(z,y)
    W2:  d(W(x,y,l), W(x,y,m)) = |l-m| d(x,y)
    W3:  W(x,y,l) = W(y,x,1-l)
    W4:  d(W(x,z,l), W(y,w,l)) <= (1-l) d(x,y) + l d(z,w)

Points are opaque values owned by their space: floats for intervals, tuples
for Euclidean boxes, complex numbers for the unit disk, (ray, offset) pairs
for star trees, and (x, u) pairs for products.  Cross-space use is rejected
by membership checks at the API boundary.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence

from .errors import ArgumentError, DomainError

Point = Any

#: slack used by membership tests on closed sets, to absorb rounding drift
#: accumulated over long iterations.
MEMBERSHIP_SLACK = 1e-12

#: default tolerance for axiom and property checks.
DEFAULT_ETA = 1e-9


class Space:
    """A metric space: distance, membership, and a deterministic sampler."""

    descriptor: dict

    def distance(self, x: Point, y: Point) -> float:
        raise NotImplementedError

    def contains(self, x: Point) -> bool:
        raise NotImplementedError

    def sample(self, rng: random.Random) -> Point:
        raise NotImplementedError

    def diameter(self) -> float:
        """Diameter of the carrier; ``inf`` for unbounded spaces."""
        return math.inf

    # --- serialization hooks used by trace/certificate writers -------------

    def point_columns(self) -> list[str]:
        return ["p0"]

    def point_row(self, x: Point) -> tuple:
        return (x,)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.descriptor!r})"


class HyperbolicSpace(Space):
    """A metric space with a convexity operator satisfying W1-W4."""

    def combine(self, x: Point, y: Point, lam: float) -> Point:
        """Return ``W(x, y, lam)`` without argument validation."""
        raise NotImplementedError

    def mesh(self, step: float) -> list[Point]:
        """Deterministic finite mesh with spacing <= step (bounded spaces only)."""
        raise NotImplementedError(f"{type(self).__name__} has no finite mesh")


def convex_comb(space: HyperbolicSpace, x: Point, y: Point, lam: float) -> Point:
    """Validated convex combination ``(1-lam) x (+) lam y`` along a geodesic."""
    if not 0.0 <= lam <= 1.0:
        raise ArgumentError(f"interpolation parameter {lam!r} outside [0, 1]")
    if not space.contains(x):
        raise DomainError(f"{x!r} is not a member of {space!r}")
    if not space.contains(y):
        raise DomainError(f"{y!r} is not a member of {space!r}")
    return space.combine(x, y, lam)


# ---------------------------------------------------------------------------
# concrete instances
# ---------------------------------------------------------------------------


class IntervalSpace(HyperbolicSpace):
    """A real interval [a, b] (endpoints may be infinite) with |x - y|."""

    def __init__(self, a: float, b: float):
        if not a < b:
            raise ArgumentError(f"interval needs a < b, got [{a}, {b}]")
        self.a = float(a)
        self.b = float(b)
        # infinite endpoints serialize as strings: bare floats would render
        # as Infinity, which is not valid JSON
        def endpoint(v: float):
            if math.isfinite(v):
                return v
            return "inf" if v > 0 else "-inf"

        self.descriptor = {"kind": "interval", "a": endpoint(self.a), "b": endpoint(self.b)}

    def distance(self, x, y):
        return abs(float(x) - float(y))

    def contains(self, x):
        try:
            v = float(x)
        except (TypeError, ValueError):
            return False
        return self.a - MEMBERSHIP_SLACK <= v <= self.b + MEMBERSHIP_SLACK

    def sample(self, rng):
        lo = self.a if math.isfinite(self.a) else (self.b - 20.0 if math.isfinite(self.b) else -10.0)
        hi = self.b if math.isfinite(self.b) else lo + 20.0
        return rng.uniform(lo, hi)

    def diameter(self):
        return self.b - self.a

    def combine(self, x, y, lam):
        return x + lam * (y - x)

    def mesh(self, step):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ArgumentError("mesh needs a bounded interval")
        n = max(1, math.ceil((self.b - self.a) / step))
        if n > 2_000_000:
            raise ArgumentError(f"mesh of {n + 1} points exceeds the sanity cap")
        pts = [self.a + k * (self.b - self.a) / n for k in range(n)]
        pts.append(self.b)
        return pts

    def point_columns(self):
        return ["x"]


class EuclideanSpace(HyperbolicSpace):
    """R^n, or an axis-aligned box, with the Euclidean metric.  Points are tuples."""

    def __init__(self, dim: int, bounds: Optional[Sequence[tuple[float, float]]] = None):
        if dim < 1:
            raise ArgumentError(f"dimension must be >= 1, got {dim}")
        self.dim = dim
        if bounds is not None:
            bounds = [(float(lo), float(hi)) for lo, hi in bounds]
            if len(bounds) != dim:
                raise ArgumentError("bounds length must match dimension")
            for lo, hi in bounds:
                if not lo < hi:
                    raise ArgumentError(f"box needs lo < hi, got ({lo}, {hi})")
        self.bounds = bounds
        if bounds is None:
            self.descriptor = {"kind": "euclidean", "dim": dim}
        else:
            self.descriptor = {"kind": "box", "bounds": [list(b) for b in bounds]}

    def distance(self, x, y):
        return math.dist(x, y)

    def contains(self, x):
        try:
            if len(x) != self.dim:
                return False
            vals = [float(v) for v in x]
        except (TypeError, ValueError):
            return False
        if self.bounds is None:
            return True
        return all(
            lo - MEMBERSHIP_SLACK <= v <= hi + MEMBERSHIP_SLACK
            for v, (lo, hi) in zip(vals, self.bounds)
        )

    def sample(self, rng):
        if self.bounds is None:
            return tuple(rng.uniform(-10.0, 10.0) for _ in range(self.dim))
        return tuple(rng.uniform(lo, hi) for lo, hi in self.bounds)

    def diameter(self):
        if self.bounds is None:
            return math.inf
        return math.dist([lo for lo, _ in self.bounds], [hi for _, hi in self.bounds])

    def combine(self, x, y, lam):
        return tuple(xi + lam * (yi - xi) for xi, yi in zip(x, y))

    def mesh(self, step):
        if self.bounds is None:
            raise ArgumentError("mesh needs a bounded box")
        axes = []
        total = 1
        for lo, hi in self.bounds:
            n = max(1, math.ceil((hi - lo) / step))
            total *= n + 1
            if total > 2_000_000:
                raise ArgumentError("mesh size exceeds the sanity cap")
            axes.append([lo + k * (hi - lo) / n for k in range(n)] + [hi])
        pts = [()]
        for axis in axes:
            pts = [p + (v,) for p in pts for v in axis]
        return pts

    def point_columns(self):
        return [f"x{i}" for i in range(self.dim)]

    def point_row(self, x):
        return tuple(x)


class PoincareDisk(HyperbolicSpace):
    """The open unit disk with the curvature -1 metric d(0, z) = 2 artanh|z|.

    Points are complex numbers with |z| < 1.  The convexity operator moves x
    to the origin by a Mobius disk automorphism, interpolates along the ray
    (geodesics through 0 are diameters, parameterized by arclength via
    r -> 2 artanh r), and moves back.
    """

    def __init__(self):
        self.descriptor = {"kind": "poincare"}

    @staticmethod
    def _to_origin(a: complex, z: complex) -> complex:
        return (z - a) / (1 - a.conjugate() * z)

    @staticmethod
    def _from_origin(a: complex, z: complex) -> complex:
        return (z + a) / (1 + a.conjugate() * z)

    def distance(self, x, y):
        w = self._to_origin(complex(y), complex(x))
        return 2.0 * math.atanh(abs(w))

    def contains(self, x):
        try:
            z = complex(x)
        except (TypeError, ValueError):
            return False
        return abs(z) < 1.0

    def sample(self, rng):
        # radius capped at 0.9 to keep axiom arithmetic well away from the rim
        r = 0.9 * math.sqrt(rng.random())
        t = rng.uniform(0.0, 2.0 * math.pi)
        return complex(r * math.cos(t), r * math.sin(t))

    def combine(self, x, y, lam):
        x = complex(x)
        y1 = self._to_origin(x, complex(y))
        r = abs(y1)
        if r == 0.0:
            return x
        m = math.tanh(lam * math.atanh(r)) * (y1 / r)
        return self._from_origin(x, m)

    def point_columns(self):
        return ["re", "im"]

    def point_row(self, x):
        z = complex(x)
        return (z.real, z.imag)


class StarTree(HyperbolicSpace):
    """A finite spider: ``rays`` segments of equal length glued at a hub.

    Points are ``(ray, offset)`` with 0 <= offset <= length; every ``(ray, 0)``
    is the hub.  Geodesics run within a ray or through the hub, so distances
    and combinations are exact case analyses.
    """

    def __init__(self, rays: int, length: float):
        if rays < 2:
            raise ArgumentError(f"star tree needs >= 2 rays, got {rays}")
        if not length > 0:
            raise ArgumentError(f"ray length must be positive, got {length}")
        self.rays = rays
        self.length = float(length)
        self.descriptor = {"kind": "star_tree", "rays": rays, "length": self.length}

    def distance(self, x, y):
        r1, o1 = x
        r2, o2 = y
        if r1 == r2:
            return abs(o1 - o2)
        return o1 + o2

    def contains(self, x):
        try:
            r, o = x
        except (TypeError, ValueError):
            return False
        return (
            isinstance(r, int)
            and 0 <= r < self.rays
            and -MEMBERSHIP_SLACK <= o <= self.length + MEMBERSHIP_SLACK
        )

    def sample(self, rng):
        return (rng.randrange(self.rays), rng.uniform(0.0, self.length))

    def diameter(self):
        return 2.0 * self.length

    def combine(self, x, y, lam):
        r1, o1 = x
        r2, o2 = y
        if r1 == r2:
            return (r1, max(0.0, o1 + lam * (o2 - o1)))
        if o2 == 0.0:
            return (r1, (1.0 - lam) * o1)
        if o1 == 0.0:
            return (r2, lam * o2)
        t = lam * (o1 + o2)  # arclength traveled from x through the hub
        if t <= o1:
            return (r1, o1 - t)
        return (r2, min(t - o1, self.length))

    def mesh(self, step):
        n = max(1, math.ceil(self.length / step))
        if n * self.rays > 2_000_000:
            raise ArgumentError("mesh size exceeds the sanity cap")
        pts = [(0, 0.0)]
        for r in range(self.rays):
            pts.extend((r, k * self.length / n) for k in range(1, n + 1))
        return pts

    def point_columns(self):
        return ["ray", "offset"]

    def point_row(self, x):
        return (x[0], x[1])


class CircleSpace(Space):
    """Unit circle with the arc-length metric; points are angles in [0, 2*pi)."""

    def __init__(self):
        self.descriptor = {"kind": "circle"}

    def distance(self, x, y):
        d = abs(float(x) - float(y)) % (2.0 * math.pi)
        return min(d, 2.0 * math.pi - d)

    def contains(self, x):
        try:
            float(x)
        except (TypeError, ValueError):
            return False
        return True

    def sample(self, rng):
        return rng.uniform(0.0, 2.0 * math.pi)

    def diameter(self):
        return math.pi

    def mesh(self, step):
        n = max(1, math.ceil(2.0 * math.pi / step))
        if n > 2_000_000:
            raise ArgumentError("mesh size exceeds the sanity cap")
        return [2.0 * math.pi * k / n for k in range(n)]

    def point_columns(self):
        return ["angle"]


class BrokenW(HyperbolicSpace):
    """Demo wrapper that deliberately violates W2 by returning x regardless of lam."""

    def __init__(self, base: HyperbolicSpace):
        self.base = base
        self.descriptor = {"kind": "broken_w", "base": base.descriptor}

    def distance(self, x, y):
        return self.base.distance(x, y)

    def contains(self, x):
        return self.base.contains(x)

    def sample(self, rng):
        return self.base.sample(rng)

    def diameter(self):
        return self.base.diameter()

    def combine(self, x, y, lam):
        return x

    def point_columns(self):
        return self.base.point_columns()

    def point_row(self, x):
        return self.base.point_row(x)


class ProductSpace(Space):
    """(C x M) with the maximum metric; points are (x, u) pairs.

    ``distance`` is exactly ``max`` of the component distances: no arithmetic
    happens beyond the component calls.
    """

    def __init__(self, left: Space, right: Space):
        self.left = left
        self.right = right
        self.descriptor = {
            "kind": "product",
            "left": left.descriptor,
            "right": right.descriptor,
        }

    def distance(self, p, q):
        return max(self.left.distance(p[0], q[0]), self.right.distance(p[1], q[1]))

    def contains(self, p):
        try:
            x, u = p
        except (TypeError, ValueError):
            return False
        return self.left.contains(x) and self.right.contains(u)

    def sample(self, rng):
        return (self.left.sample(rng), self.right.sample(rng))

    def diameter(self):
        return max(self.left.diameter(), self.right.diameter())

    def slice_space(self, u: Point) -> Space:
        """The fiber over u; constant for a plain product."""
        return self.left

    def mesh(self, step):
        lm = self.left.mesh(step)
        rm = self.right.mesh(step)
        if len(lm) * len(rm) > 2_000_000:
            raise ArgumentError("mesh size exceeds the sanity cap")
        return [(x, u) for x in lm for u in rm]

    def point_columns(self):
        return [f"c_{c}" for c in self.left.point_columns()] + [
            f"m_{c}" for c in self.right.point_columns()
        ]

    def point_row(self, p):
        return tuple(self.left.point_row(p[0])) + tuple(self.right.point_row(p[1]))


def product(left: Space, right: Space) -> ProductSpace:
    """Product of two spaces under the maximum metric."""
    return ProductSpace(left, right)


# ---------------------------------------------------------------------------
# factories
# ---------------------------------------------------------------------------


def make_euclidean(n: int) -> EuclideanSpace:
    return EuclideanSpace(n)


def make_box(bounds: Sequence[tuple[float, float]]) -> EuclideanSpace:
    return EuclideanSpace(len(list(bounds)), bounds)


def make_interval(a: float, b: float) -> IntervalSpace:
    return IntervalSpace(a, b)


def make_real_line() -> IntervalSpace:
    return IntervalSpace(-math.inf, math.inf)


def make_half_line() -> IntervalSpace:
    return IntervalSpace(0.0, math.inf)


def make_poincare_disk() -> PoincareDisk:
    return PoincareDisk()


def make_star_tree(rays: int, length: float) -> StarTree:
    return StarTree(rays, length)


def make_circle() -> CircleSpace:
    return CircleSpace()


# ---------------------------------------------------------------------------
# axiom checking
# ---------------------------------------------------------------------------

AXIOM_NAMES = (
    "metric_nonneg",
    "metric_identity",
    "metric_symmetry",
    "metric_triangle",
    "W1",
    "W2",
    "W3",
    "W4",
    "endpoints",
)


@dataclass
class AxiomResult:
    name: str
    max_violation: float = 0.0
    counterexample: Optional[tuple] = None

    def passed(self, eta: float) -> bool:
        return self.max_violation <= eta


@dataclass
class AxiomReport:
    space: dict
    samples: int
    seed: int
    eta: float
    results: dict[str, AxiomResult] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed(self.eta) for r in self.results.values())

    def failures(self) -> list[str]:
        return [n for n, r in self.results.items() if not r.passed(self.eta)]

    def summary_lines(self) -> list[str]:
        lines = []
        for name in self.results:
            r = self.results[name]
            mark = "pass" if r.passed(self.eta) else "FAIL"
            lines.append(f"{name:16s} {mark}  max violation {r.max_violation:.3e}")
            if not r.passed(self.eta) and r.counterexample is not None:
                lines.append(f"{'':16s}       counterexample {r.counterexample!r}")
        return lines


def check_axioms(
    space: Space, samples: int, seed: int = 0, eta: float = DEFAULT_ETA
) -> AxiomReport:
    """Evaluate metric axioms (and W1-W4 when applicable) on random tuples.

    The report records, per axiom, the largest observed violation and the
    first sampled tuple exceeding ``eta``.
    """
    if samples < 1:
        raise ArgumentError("samples must be >= 1")
    rng = random.Random(seed)
    report = AxiomReport(space=space.descriptor, samples=samples, seed=seed, eta=eta)
    has_w = isinstance(space, HyperbolicSpace)
    names = AXIOM_NAMES if has_w else AXIOM_NAMES[:4]
    for name in names:
        report.results[name] = AxiomResult(name)

    def record(name: str, violation: float, witness: tuple):
        r = report.results[name]
        if violation > r.max_violation:
            r.max_violation = violation
        if violation > eta and r.counterexample is None:
            r.counterexample = witness

    d = space.distance
    for _ in range(samples):
        x = space.sample(rng)
        y = space.sample(rng)
        z = space.sample(rng)
        dxy = d(x, y)
        dyx = d(y, x)
        dxz = d(x, z)
        dyz = d(y, z)
        record("metric_nonneg", -min(dxy, dxz, dyz), (x, y, z))
        record("metric_identity", abs(d(x, x)), (x,))
        record("metric_symmetry", abs(dxy - dyx), (x, y))
        record("metric_triangle", dxz - (dxy + dyz), (x, y, z))
        if not has_w:
            continue
        w = space.sample(rng)
        lam = rng.random()
        lam2 = rng.random()
        cxy = space.combine(x, y, lam)
        record("W1", d(z, cxy) - ((1 - lam) * dxz + lam * dyz), (x, y, z, lam))
        cxy2 = space.combine(x, y, lam2)
        record("W2", abs(d(cxy, cxy2) - abs(lam - lam2) * dxy), (x, y, lam, lam2))
        record("W3", d(cxy, space.combine(y, x, 1.0 - lam)), (x, y, lam))
        czw = space.combine(z, w, lam)
        cxz = space.combine(x, z, lam)
        cyw = space.combine(y, w, lam)
        record("W4", d(cxz, cyw) - ((1 - lam) * dxy + lam * d(z, w)), (x, y, z, w, lam))
        record(
            "endpoints",
            max(d(space.combine(x, y, 0.0), x), d(space.combine(x, y, 1.0), y)),
            (x, y),
        )
    return report
