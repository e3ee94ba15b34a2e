"""Relations between a space and its dual: monotonicity and weight tests.

A relation is a finite ordered list of (point, dual element) pairs.  It is
monotone when every unordered pair has nonnegative margin
``<x* - y*, yx>``.  The module also provides:

* the convexity-along-geodesics test for evaluations of range elements
  (the "W" test), a sound refuter / grid-sampled verifier;
* finitely supported probability weights over the pairs, their barycenter
  ``alpha``, dual average ``beta`` and base-point pairing ``theta_p``, and
  the membership test ``theta_p >= <beta, p->alpha>``;
* the sampled two-way consistency check between monotonicity and membership
  of all weights, valid under an established W verdict.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import dual as dual_ops
from .dual import DualElement
from .quasilin import BoundVector
from .spaces import EXACT, Scalar, SpaceModel, SpiderSpace


@dataclass(frozen=True)
class Relation:
    """Finite subset of (space x dual), as an ordered pair list.

    Distinct entries may share a point; order is preserved because weight
    functions index into it.
    """

    space: SpaceModel
    pairs: Tuple[Tuple[object, DualElement], ...]

    def __post_init__(self):
        pairs = tuple((p, d) for p, d in self.pairs)
        for p, d in pairs:
            self.space.check_point(p)
            if not isinstance(d, DualElement):
                raise TypeError("expected DualElement, got %r" % (d,))
            for t in d.terms:
                self.space.check_point(t.tail)
                self.space.check_point(t.head)
        object.__setattr__(self, "pairs", pairs)

    def __len__(self):
        return len(self.pairs)


def domain_of(M: Relation) -> list:
    """Distinct points of the relation, in first-appearance order."""
    seen, out = set(), []
    for p, _ in M.pairs:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def range_of(M: Relation) -> list:
    """Distinct dual elements (by representation), in first-appearance order."""
    seen, out = set(), []
    for _, d in M.pairs:
        if d not in seen:
            seen.add(d)
            out.append(d)
    return out


def all_points_of(M: Relation) -> list:
    """Domain points plus every point inside the dual terms, deduplicated."""
    seen, out = set(), []
    for p, d in M.pairs:
        for q in (p,) + tuple(x for t in d.terms for x in (t.tail, t.head)):
            if q not in seen:
                seen.add(q)
                out.append(q)
    return out


def pair_margin(M: Relation, i: int, j: int) -> Scalar:
    """Monotonicity margin ``<x_i* - x_j*, x_j x_i>`` of pairs ``i`` and ``j``."""
    xi, di = M.pairs[i]
    xj, dj = M.pairs[j]
    v = BoundVector(xj, xi)
    return dual_ops.evaluate(M.space, di, v) - dual_ops.evaluate(M.space, dj, v)


@dataclass
class MonotoneReport:
    monotone: bool
    checked_pairs: int
    witness: Optional[tuple] = None  # ((x, x*), (y, y*), margin)

    def __bool__(self):
        return self.monotone

    def to_json_dict(self) -> dict:
        out = {"monotone": self.monotone, "checked_pairs": self.checked_pairs}
        if self.witness is not None:
            (x, xd), (y, yd), margin = self.witness
            out["witness"] = {
                "first": repr(x),
                "second": repr(y),
                "margin": str(margin),
            }
        return out


def is_monotone(M: Relation, tol=None) -> MonotoneReport:
    """Check all unordered pairs; the witness is the first violating pair.

    Float mode accepts margins down to ``-tol`` (default: space tolerance).
    """
    if tol is None:
        tol = M.space.tol
    n = len(M.pairs)
    checked = 0
    for i in range(n):
        for j in range(i + 1, n):
            checked += 1
            margin = pair_margin(M, i, j)
            if margin < -tol:
                return MonotoneReport(False, checked, (M.pairs[i], M.pairs[j], margin))
    return MonotoneReport(True, checked)


# -- convexity of evaluations along geodesics -------------------------------


@dataclass
class WWitness:
    base: object
    dual: DualElement
    first: object
    second: object
    lam: Scalar
    lhs: Scalar
    rhs: Scalar

    def to_json_dict(self) -> dict:
        return {
            "base": repr(self.base),
            "first": repr(self.first),
            "second": repr(self.second),
            "lambda": str(self.lam),
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
        }


@dataclass
class WReport:
    """PASS means only: no violation found on the evaluated grid."""

    passed: bool
    checks: int
    witness: Optional[WWitness] = None

    def __bool__(self):
        return self.passed

    def to_json_dict(self) -> dict:
        out = {"passed": self.passed, "checks": self.checks}
        if self.witness is not None:
            out["witness"] = self.witness.to_json_dict()
        return out


def default_lambda_grid(space: SpaceModel) -> list:
    """Twelfths of [0, 1]; exact fractions in exact mode."""
    if space.arithmetic_mode == EXACT:
        return [Fraction(k, 12) for k in range(13)]
    return [k / 12 for k in range(13)]


def _pair_lambdas(space, grid, x1, x2):
    lams = list(grid)
    # cross-branch pairs get the origin-crossing parameter appended, where
    # the evaluation is only piecewise smooth
    if isinstance(space, SpiderSpace) and x1 != x2 and x1.branch != x2.branch:
        total = x1.radius + x2.radius
        if total > 0:
            lams.append(x1.radius / total)
    return lams


def check_w_property(
    M: Relation,
    base_points: Sequence,
    lambda_grid: Optional[Sequence] = None,
) -> WReport:
    """Test convexity of ``lam -> <x*, p((1-lam)x1 + lam x2)>`` on a grid.

    Quantifies over base points ``p``, range elements ``x*``, ordered domain
    pairs ``(x1, x2)`` and grid parameters (plus structural breakpoints on
    the spider).  A FAIL carries the violating witness and is conclusive; a
    PASS only states that no grid violation was found.
    """
    space = M.space
    if lambda_grid is None:
        lambda_grid = default_lambda_grid(space)
    lambda_grid = [space.check_lambda(l) for l in lambda_grid]
    dom = domain_of(M)
    rng_elems = range_of(M)
    checks = 0
    for p in base_points:
        space.check_point(p)
        for x1 in dom:
            for x2 in dom:
                for lam in _pair_lambdas(space, lambda_grid, x1, x2):
                    mid = space.geodesic(x1, x2, lam)
                    for f in rng_elems:
                        checks += 1
                        lhs = dual_ops.evaluate(space, f, BoundVector(p, mid))
                        rhs = (1 - lam) * dual_ops.evaluate(
                            space, f, BoundVector(p, x1)
                        ) + lam * dual_ops.evaluate(space, f, BoundVector(p, x2))
                        if lhs - rhs > space.tol:
                            return WReport(
                                False, checks, WWitness(p, f, x1, x2, lam, lhs, rhs)
                            )
    return WReport(True, checks)


@dataclass
class WnWitness:
    base: object
    dual: DualElement
    points: tuple
    weights: tuple
    lhs: Scalar
    rhs: Scalar

    def to_json_dict(self) -> dict:
        return {
            "base": repr(self.base),
            "points": [repr(p) for p in self.points],
            "weights": [str(w) for w in self.weights],
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
        }


def check_wn(
    M: Relation,
    q,
    points_idx: Sequence[int],
    weights: Sequence[Scalar],
) -> WReport:
    """n-ary form: ``<x*, q(combination)> <= sum_i w_i <x*, q x_i>``.

    Zero weights are allowed and dropped from the combination; the index
    list selects pairs of ``M`` (their points), order-sensitively.
    """
    space = M.space
    space.check_point(q)
    points = [M.pairs[i][0] for i in points_idx]
    weights = [space.coerce_scalar(w) for w in weights]
    if len(points) != len(weights):
        raise ValueError("points and weights must have equal length")
    comb = space.convex_combination_dropping_zeros(points, weights)
    checks = 0
    for f in range_of(M):
        checks += 1
        lhs = dual_ops.evaluate(space, f, BoundVector(q, comb))
        rhs = space.zero
        for pt, w in zip(points, weights):
            rhs = rhs + w * dual_ops.evaluate(space, f, BoundVector(q, pt))
        if lhs - rhs > space.tol:
            return WReport(
                False,
                checks,
                WnWitness(q, f, tuple(points), tuple(weights), lhs, rhs),
            )
    return WReport(True, checks)


# -- finitely supported probability weights ---------------------------------


@dataclass(frozen=True)
class SupportFunction:
    """Probability weights over distinct pairs of a relation, with order.

    Entries are (pair index, weight > 0); weights sum to one (exactly in
    exact mode).  The barycenter uses the stored entry order, so two support
    functions with equal weights but different order may have different
    barycenters in non-flat spaces.
    """

    entries: Tuple[Tuple[int, Scalar], ...]

    def __post_init__(self):
        entries = tuple((int(i), w) for i, w in self.entries)
        if not entries:
            raise ValueError("support must be nonempty")
        idxs = [i for i, _ in entries]
        if len(set(idxs)) != len(idxs):
            raise ValueError("support indices must be distinct")
        object.__setattr__(self, "entries", entries)

    def validate(self, M: Relation) -> "SupportFunction":
        space = M.space
        weights = space.check_weights([w for _, w in self.entries], len(self.entries))
        for i, _ in self.entries:
            if not 0 <= i < len(M.pairs):
                raise ValueError("support index %d outside relation of size %d" % (i, len(M.pairs)))
        return SupportFunction(tuple((i, w) for (i, _), w in zip(self.entries, weights)))


def delta(index: int) -> SupportFunction:
    """Point mass at one pair."""
    return SupportFunction(((index, 1),))


def sample_support_function(
    M: Relation,
    rng: random.Random,
    max_support: int = 5,
    max_denominator: int = 64,
) -> SupportFunction:
    """Draw random weights: support size uniform in 1..min(max_support, |M|).

    Weights come from a flat Dirichlet draw; exact mode snaps them to a
    common denominator ``max_denominator`` while keeping them positive and
    summing to one exactly.
    """
    if len(M.pairs) == 0:
        raise ValueError("cannot sample weights over an empty relation")
    size = rng.randint(1, min(max_support, len(M.pairs)))
    idxs = rng.sample(range(len(M.pairs)), size)
    raw = [rng.expovariate(1.0) for _ in range(size)]
    total = sum(raw)
    weights = [r / total for r in raw]
    if M.space.arithmetic_mode == EXACT:
        counts = [max(1, round(w * max_denominator)) for w in weights]
        # repair the sum by adjusting the largest entry
        counts[counts.index(max(counts))] += max_denominator - sum(counts)
        if min(counts) < 1:
            counts = [1] * size
            counts[0] += max_denominator - size
        weights = [Fraction(c, max_denominator) for c in counts]
    return SupportFunction(tuple(zip(idxs, weights)))


@dataclass
class ThetaReport:
    """Barycenter data of a weight function and its membership verdict."""

    alpha: object
    beta: DualElement
    theta_p: Scalar
    rhs: Scalar
    member: bool

    def to_json_dict(self) -> dict:
        return {
            "alpha": repr(self.alpha),
            "theta_p": str(self.theta_p),
            "rhs": str(self.rhs),
            "member": self.member,
        }


def theta_evaluate(M: Relation, eta: SupportFunction, p) -> ThetaReport:
    """Compute ``alpha``, ``beta``, ``theta_p`` and the membership flag.

    ``alpha`` is the order-sensitive combination of the supported points,
    ``beta`` the matching weighted sum of dual elements, and membership
    means ``theta_p >= <beta, p->alpha>`` (within tolerance in float mode).
    """
    space = M.space
    space.check_point(p)
    eta = eta.validate(M)
    points = [M.pairs[i][0] for i, _ in eta.entries]
    duals = [M.pairs[i][1] for i, _ in eta.entries]
    weights = [w for _, w in eta.entries]

    alpha = space.convex_combination(points, weights)
    beta = dual_ops.ZERO
    for w, d in zip(weights, duals):
        beta = dual_ops.add(beta, dual_ops.scale(w, d))
    theta_p = space.zero
    for w, x, d in zip(weights, points, duals):
        theta_p = theta_p + w * dual_ops.evaluate(space, d, BoundVector(p, x))
    rhs = dual_ops.evaluate(space, beta, BoundVector(p, alpha))
    member = theta_p - rhs >= -space.tol
    return ThetaReport(alpha, beta, theta_p, rhs, member)


@dataclass
class IndependenceReport:
    consistent: bool
    flags: List[bool]
    base_points: list

    def __bool__(self):
        return self.consistent

    def to_json_dict(self) -> dict:
        return {
            "consistent": self.consistent,
            "flags": self.flags,
            "base_points": [repr(p) for p in self.base_points],
        }


def check_theta_p_independence(
    M: Relation, eta: SupportFunction, base_points: Sequence
) -> IndependenceReport:
    """Membership of ``eta`` must not depend on the base point."""
    if len(base_points) < 2:
        raise ValueError("need at least two base points")
    flags = [theta_evaluate(M, eta, p).member for p in base_points]
    return IndependenceReport(len(set(flags)) == 1, flags, list(base_points))


@dataclass
class Theorem35Report:
    """Sampled consistency between monotonicity and full membership.

    ``established`` is False when the convexity precondition could not be
    confirmed on the grid; no assertion is made in that case.
    """

    established: bool
    monotone: Optional[bool] = None
    samples: int = 0
    members: int = 0
    consistent: Optional[bool] = None
    violating_eta: Optional[SupportFunction] = None
    message: str = ""

    def to_json_dict(self) -> dict:
        return {
            "established": self.established,
            "monotone": self.monotone,
            "samples": self.samples,
            "members": self.members,
            "consistent": self.consistent,
            "message": self.message,
        }


def check_theorem35(
    M: Relation,
    eta_sampler,
    count: int,
    p,
    base_points: Optional[Sequence] = None,
    lambda_grid: Optional[Sequence] = None,
) -> Theorem35Report:
    """Probe the equivalence "monotone iff every weight function is a member".

    Requires a PASS of :func:`check_w_property` first (the equivalence is
    only claimed under that hypothesis); refuses to assert otherwise.
    Forward direction: monotone relation, every sampled weight must be a
    member.  Converse probe: a sampled non-member must be matched by a
    monotonicity violation.
    """
    if base_points is None:
        base_points = [p]
    w_report = check_w_property(M, base_points, lambda_grid)
    if not w_report.passed:
        return Theorem35Report(False, message="W-property not established")

    mono = is_monotone(M).monotone
    members = 0
    violating = None
    for _ in range(count):
        eta = eta_sampler()
        report = theta_evaluate(M, eta, p)
        if report.member:
            members += 1
        elif violating is None:
            violating = eta
    consistent = True
    message = "all sampled weights are members" if violating is None else ""
    if violating is not None:
        # a genuine non-member forces non-monotonicity
        consistent = not mono
        message = (
            "non-member weight found; relation is non-monotone as required"
            if consistent
            else "non-member weight found on a monotone relation"
        )
    elif not mono:
        message = "non-monotone relation, sampling found no non-member (inconclusive)"
    return Theorem35Report(True, mono, count, members, consistent, violating, message)
