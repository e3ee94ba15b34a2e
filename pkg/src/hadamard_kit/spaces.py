"""Geodesic space models with exact or floating arithmetic.

Two concrete models are shipped:

* ``EuclideanSpace`` -- R^n with the usual metric, float arithmetic with a
  tolerance context.  Satisfies the CN-inequality with equality (flat).
* ``SpiderSpace`` -- the R-tree obtained by gluing countably many unit
  segments at a common origin, with exact rational arithmetic.  Points are
  ``(branch, radius)`` pairs; all branch origins are identified.  The CN
  inequality holds strictly on cross-branch triples (non-flat).

All operations are pure; space models are immutable after construction and
safe to share between threads.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

Scalar = Union[int, float, Fraction]

EXACT = "exact"
FLOAT = "float"


def as_fraction(value) -> Fraction:
    """Coerce ints, strings like ``"3/10"`` and Fractions to Fraction.

    Floats are rejected: silently converting them would leak binary noise
    into exact computations.
    """
    if isinstance(value, float):
        raise TypeError(
            "refusing to coerce float %r to an exact rational; "
            "pass a Fraction, int or 'p/q' string" % (value,)
        )
    return Fraction(value)


@dataclass(frozen=True)
class EuclideanPoint:
    """Point of R^n, stored as a tuple of finite floats."""

    coords: tuple

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        if not coords:
            raise ValueError("Euclidean point needs at least one coordinate")
        for c in coords:
            if not math.isfinite(c):
                raise ValueError("non-finite coordinate %r" % (c,))
        object.__setattr__(self, "coords", coords)

    def __repr__(self):
        return "E(%s)" % ", ".join("%g" % c for c in self.coords)


def epoint(*coords) -> EuclideanPoint:
    """Shorthand constructor: ``epoint(1, 2.5)`` -> point of R^2."""
    return EuclideanPoint(tuple(coords))


@dataclass(frozen=True)
class SpiderPoint:
    """Point of the spider tree: branch index >= 1 and rational radius in [0,1].

    All points with radius 0 denote the same glue point; they are
    canonicalized to branch 1 so that equality and hashing agree with the
    intended identification.
    """

    branch: int
    radius: Fraction

    def __post_init__(self):
        if not isinstance(self.branch, int) or self.branch < 1:
            raise ValueError("branch must be an integer >= 1, got %r" % (self.branch,))
        radius = as_fraction(self.radius)
        if radius < 0 or radius > 1:
            raise ValueError("radius must lie in [0, 1], got %s" % (radius,))
        if radius == 0:
            object.__setattr__(self, "branch", 1)
        object.__setattr__(self, "radius", radius)

    def __repr__(self):
        return "S(%d, %s)" % (self.branch, self.radius)


def spoint(branch: int, radius) -> SpiderPoint:
    """Shorthand constructor accepting ``"p/q"`` strings for the radius."""
    return SpiderPoint(branch, as_fraction(radius))


SPIDER_ORIGIN = SpiderPoint(1, Fraction(0))


class SpaceModel:
    """Abstract geodesic space: a metric plus geodesic interpolation.

    Concrete models declare ``arithmetic_mode`` (``"exact"`` or ``"float"``)
    and the scalar constants ``zero``/``half`` in the matching type.  Float
    models carry the comparison tolerance ``tol``; exact models use
    ``tol == 0``.
    """

    arithmetic_mode = None
    tol: Scalar = 0
    zero: Scalar = 0
    half: Scalar = 0

    def check_point(self, x):
        """Raise TypeError unless ``x`` belongs to this model."""
        raise NotImplementedError

    def distance(self, x, y) -> Scalar:
        raise NotImplementedError

    def geodesic(self, x, y, lam) -> object:
        """Point at parameter ``lam`` on the geodesic from ``x`` to ``y``.

        ``geodesic(x, y, 0) == x`` and ``geodesic(x, y, 1) == y``.
        """
        raise NotImplementedError

    def sample_point(self, rng: random.Random):
        """Draw a pseudo-random point (used by the check/report operations)."""
        raise NotImplementedError

    # -- scalar helpers ----------------------------------------------------

    def check_lambda(self, lam) -> Scalar:
        lam = self.coerce_scalar(lam)
        if lam < 0 or lam > 1:
            raise ValueError("interpolation parameter %s outside [0, 1]" % (lam,))
        return lam

    def coerce_scalar(self, value) -> Scalar:
        raise NotImplementedError

    def is_zero(self, value) -> bool:
        """Equality-with-zero under this model's tolerance."""
        if self.arithmetic_mode == EXACT:
            return value == 0
        return abs(value) <= self.tol

    def is_nonnegative(self, value) -> bool:
        if self.arithmetic_mode == EXACT:
            return value >= 0
        return value >= -self.tol

    # -- weighted combinations ---------------------------------------------

    def check_weights(self, weights: Sequence[Scalar], n: int):
        weights = [self.coerce_scalar(w) for w in weights]
        if len(weights) != n:
            raise ValueError("expected %d weights, got %d" % (n, len(weights)))
        if n == 0:
            raise ValueError("empty combination")
        for w in weights:
            if w <= 0 or w > 1:
                raise ValueError("weight %s outside (0, 1]" % (w,))
        total = sum(weights)
        if self.arithmetic_mode == EXACT:
            if total != 1:
                raise ValueError("weights sum to %s, expected exactly 1" % (total,))
        elif abs(total - 1) > self.tol:
            raise ValueError("weights sum to %s, expected 1 within %g" % (total, self.tol))
        return weights

    def convex_combination(self, points: Sequence, weights: Sequence[Scalar]):
        """Right-fold weighted combination of ``points``.

        Defined recursively: the n-ary combination attaches the last point by
        a geodesic step of size ``weights[-1]`` onto the (n-1)-ary
        combination of the remaining points with renormalized weights.  In
        non-flat spaces the result depends on the input order; callers that
        care must fix an ordering (``SupportFunction`` does).
        """
        points = list(points)
        weights = self.check_weights(weights, len(points))
        for p in points:
            self.check_point(p)
        return self._combine(points, weights)

    def _combine(self, points, weights):
        if len(points) == 1:
            return points[0]
        lam_n = weights[-1]
        if lam_n == 1:
            # only reachable in float mode with sum-tolerance slack
            return points[-1]
        rest = [w / (1 - lam_n) for w in weights[:-1]]
        inner = self._combine(points[:-1], rest)
        return self.geodesic(inner, points[-1], lam_n)

    def convex_combination_dropping_zeros(self, points, weights):
        """Convenience wrapper that removes zero-weight entries first."""
        kept_p, kept_w = [], []
        for p, w in zip(points, weights):
            w = self.coerce_scalar(w)
            if w != 0:
                kept_p.append(p)
                kept_w.append(w)
        return self.convex_combination(kept_p, kept_w)


class EuclideanSpace(SpaceModel):
    """R^n with the standard metric; float arithmetic with tolerance ``tol``."""

    arithmetic_mode = FLOAT

    def __init__(self, dim: int, tol: float = 1e-9):
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        if not (tol > 0 and math.isfinite(tol)):
            raise ValueError("tolerance must be a positive finite float")
        self.dim = dim
        self.tol = float(tol)
        self.zero = 0.0
        self.half = 0.5

    def __repr__(self):
        return "EuclideanSpace(dim=%d)" % self.dim

    def check_point(self, x):
        if not isinstance(x, EuclideanPoint):
            raise TypeError("expected EuclideanPoint, got %r" % (x,))
        if len(x.coords) != self.dim:
            raise TypeError(
                "point of dimension %d in %d-dimensional space" % (len(x.coords), self.dim)
            )

    def coerce_scalar(self, value) -> float:
        return float(value)

    def distance(self, x, y) -> float:
        self.check_point(x)
        self.check_point(y)
        return math.sqrt(sum((a - b) ** 2 for a, b in zip(x.coords, y.coords)))

    def geodesic(self, x, y, lam) -> EuclideanPoint:
        self.check_point(x)
        self.check_point(y)
        lam = self.check_lambda(lam)
        return EuclideanPoint(
            tuple((1 - lam) * a + lam * b for a, b in zip(x.coords, y.coords))
        )

    def sample_point(self, rng: random.Random, spread: float = 2.0) -> EuclideanPoint:
        return EuclideanPoint(tuple(rng.uniform(-spread, spread) for _ in range(self.dim)))


class SpiderSpace(SpaceModel):
    """R-tree of unit segments glued at a common origin; exact arithmetic.

    Distances: ``|t - s|`` on a shared branch, ``t + s`` across branches.
    The geodesic between cross-branch points runs through the origin, which
    is reached at parameter ``t / (t + s)``.
    """

    arithmetic_mode = EXACT

    def __init__(self):
        self.tol = Fraction(0)
        self.zero = Fraction(0)
        self.half = Fraction(1, 2)

    def __repr__(self):
        return "SpiderSpace()"

    def check_point(self, x):
        if not isinstance(x, SpiderPoint):
            raise TypeError("expected SpiderPoint, got %r" % (x,))

    def coerce_scalar(self, value) -> Fraction:
        return as_fraction(value)

    def distance(self, x, y) -> Fraction:
        self.check_point(x)
        self.check_point(y)
        if x.branch == y.branch:
            return abs(x.radius - y.radius)
        return x.radius + y.radius

    def geodesic(self, x, y, lam) -> SpiderPoint:
        self.check_point(x)
        self.check_point(y)
        lam = self.check_lambda(lam)
        if x == y:
            return x
        t, s = x.radius, y.radius
        if x.branch == y.branch:
            # within one segment the geodesic is affine in the radius
            return SpiderPoint(x.branch, (1 - lam) * t + lam * s)
        # cross-branch: walk down to the origin, then up the other branch;
        # the origin sits at lam* = t / (t + s)
        if lam * (t + s) <= t:
            return SpiderPoint(x.branch, (1 - lam) * t - lam * s)
        return SpiderPoint(y.branch, (lam - 1) * t + lam * s)

    def sample_point(
        self,
        rng: random.Random,
        max_branch: int = 5,
        max_denominator: int = 12,
    ) -> SpiderPoint:
        branch = rng.randint(1, max_branch)
        den = rng.randint(1, max_denominator)
        num = rng.randint(0, den)
        return SpiderPoint(branch, Fraction(num, den))
