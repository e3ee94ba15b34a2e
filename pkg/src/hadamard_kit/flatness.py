"""Flatness classification through curvature residuals.

Three residuals vanish identically exactly on flat spaces:

* ``cn_residual`` -- slack of the comparison inequality
  ``d(z, m)^2 <= (1-l) d(z,x)^2 + l d(z,y)^2 - l(1-l) d(x,y)^2`` at the
  geodesic point ``m``; nonnegative in any CAT(0) model.
* ``projection_residual`` -- deviation of ``<x->m, ab>`` from ``l <xy, ab>``.
* ``phi_affine_residual`` -- deviation of the potential ``phi_pz`` from
  affinity along the geodesic.

The residuals are tied together pointwise: with matched arguments,
``cn = 2 * projection = -2 * phi_affine`` (see the property tests).  A
single nonzero residual certifies non-flatness; sampling zeros can never
certify flatness, hence the verdict name ``FlatOnSamples``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Callable, Optional

from .quasilin import BoundVector, qlin, phi
from .spaces import Scalar, SpaceModel, SpiderSpace, SpiderPoint

FLAT_ON_SAMPLES = "FlatOnSamples"
NON_FLAT = "NonFlat"


def cn_residual(space: SpaceModel, z, x, y, lam) -> Scalar:
    """Comparison-inequality slack at the geodesic point; >= 0 in CAT(0)."""
    lam = space.check_lambda(lam)
    mid = space.geodesic(x, y, lam)
    dzx = space.distance(z, x)
    dzy = space.distance(z, y)
    dxy = space.distance(x, y)
    dzm = space.distance(z, mid)
    return (1 - lam) * dzx * dzx + lam * dzy * dzy - lam * (1 - lam) * dxy * dxy - dzm * dzm


def projection_residual(space: SpaceModel, x, y, a, b, lam) -> Scalar:
    """``<x(geodesic point), ab> - lam <xy, ab>``; zero iff locally flat."""
    lam = space.check_lambda(lam)
    mid = space.geodesic(x, y, lam)
    return qlin(space, BoundVector(x, mid), BoundVector(a, b)) - lam * qlin(
        space, BoundVector(x, y), BoundVector(a, b)
    )


def phi_affine_residual(space: SpaceModel, p, z, x, y, lam) -> Scalar:
    """Affinity defect ``(1-l) phi(x) + l phi(y) - phi(geodesic point)``.

    The convexity variant of the test asks for this to be >= 0; on flat
    spaces it vanishes.
    """
    lam = space.check_lambda(lam)
    pz = BoundVector(p, z)
    mid = space.geodesic(x, y, lam)
    return (1 - lam) * phi(space, pz, x) + lam * phi(space, pz, y) - phi(space, pz, mid)


@dataclass
class FlatnessWitness:
    criterion: str
    points: tuple
    lam: Scalar
    residual: Scalar

    def to_json_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "points": [repr(p) for p in self.points],
            "lambda": str(self.lam),
            "residual": str(self.residual),
        }


@dataclass
class FlatnessVerdict:
    verdict: str
    samples: int
    witness: Optional[FlatnessWitness] = None

    @property
    def is_flat_on_samples(self) -> bool:
        return self.verdict == FLAT_ON_SAMPLES

    def to_json_dict(self) -> dict:
        out = {"verdict": self.verdict, "samples": self.samples}
        if self.witness is not None:
            out["witness"] = self.witness.to_json_dict()
        return out


# deterministic cross-branch probe points with small denominators; any
# non-degenerate assignment of these exposes the tree's branching residuals
_PROBE_POINTS = (
    SpiderPoint(2, Fraction(1, 2)),
    SpiderPoint(1, Fraction(1, 2)),
    SpiderPoint(3, Fraction(1, 3)),
    SpiderPoint(1, Fraction(1, 1)),
    SpiderPoint(3, Fraction(1, 2)),
)
_PROBE_LAMBDAS = (Fraction(1, 5), Fraction(1, 3), Fraction(1, 2))


def _spider_probe_tuples():
    for lam in _PROBE_LAMBDAS:
        for quad in permutations(_PROBE_POINTS, 4):
            yield quad, lam


def _residual_cases(space, points, lam):
    """All three residuals on one sampled tuple (z, x, y [, extra])."""
    z, x, y = points[:3]
    extra = points[3] if len(points) > 3 else z
    return (
        ("cn", (z, x, y), cn_residual(space, z, x, y, lam)),
        ("projection", (x, y, z, extra), projection_residual(space, x, y, z, extra, lam)),
        ("phi-affine", (z, extra, x, y), phi_affine_residual(space, z, extra, x, y, lam)),
    )


def _simpler_lambdas(space):
    if space.arithmetic_mode == "exact":
        return [Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(1, 4), Fraction(1, 5)]
    return [0.5, 0.25, 0.75]


def _minimize_witness(space, witness: FlatnessWitness) -> FlatnessWitness:
    """Greedy shrink: prefer low-denominator lambdas keeping the residual nonzero."""
    recompute = {
        "cn": lambda pts, lam: cn_residual(space, *pts, lam),
        "projection": lambda pts, lam: projection_residual(space, *pts, lam),
        "phi-affine": lambda pts, lam: phi_affine_residual(space, *pts, lam),
    }[witness.criterion]
    best = witness
    for lam in _simpler_lambdas(space):
        res = recompute(best.points, lam)
        if not space.is_zero(res):
            best = FlatnessWitness(best.criterion, best.points, lam, res)
            break
    return best


def classify_flat(
    space: SpaceModel,
    sampler: Callable[[random.Random], object],
    count: int,
    tol=None,
    seed: int = 1,
) -> FlatnessVerdict:
    """Search for a nonzero curvature residual.

    Exact tree models are probed first with a deterministic family of small
    rational configurations, so the returned witness is reproducible and
    readable; random sampling follows.  Any nonzero residual (``> tol`` in
    float mode) yields ``NonFlat`` with a minimized witness; otherwise the
    verdict is ``FlatOnSamples``, which is evidence, not proof.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if tol is None:
        tol = space.tol
    rng = random.Random(seed)
    samples = 0

    def scan(points, lam):
        for criterion, pts, res in _residual_cases(space, points, lam):
            nonzero = res != 0 if space.arithmetic_mode == "exact" else abs(res) > tol
            if nonzero:
                return FlatnessWitness(criterion, pts, lam, res)
        return None

    if isinstance(space, SpiderSpace):
        for trip, lam in _spider_probe_tuples():
            samples += 1
            hit = scan(trip, lam)
            if hit is not None:
                return FlatnessVerdict(NON_FLAT, samples, _minimize_witness(space, hit))

    lambdas = _simpler_lambdas(space)
    for i in range(count):
        samples += 1
        points = tuple(sampler(rng) for _ in range(4))
        if space.arithmetic_mode == "exact":
            lam = Fraction(rng.randint(0, 12), 12)
        else:
            lam = rng.random()
        hit = scan(points, lam)
        if hit is not None:
            return FlatnessVerdict(NON_FLAT, samples, _minimize_witness(space, hit))
    return FlatnessVerdict(FLAT_ON_SAMPLES, samples)
