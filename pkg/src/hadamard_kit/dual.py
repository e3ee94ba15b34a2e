"""Formal linear combinations of bound-vector classes (the linear dual).

A dual element is a finite list of weighted bound vectors ``w * [ab]``; it
acts on a bound vector ``v`` by ``sum_i w_i <a_i b_i, v>``.  Elements with
equal action are *equivalent*; equality of the representation is stronger.
The norm of a general element is the Lipschitz constant of its action, which
is only approximable from below by sampling; ``norm_bounds`` returns a
certified sandwich instead of pretending to an exact value.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

from .quasilin import BoundVector, qlin
from .spaces import Scalar, SpaceModel


@dataclass(frozen=True)
class DualTerm:
    """One summand ``weight * [tail -> head]``."""

    weight: Scalar
    tail: object
    head: object


@dataclass(frozen=True)
class DualElement:
    """Formal weighted sum of bound-vector classes; empty sum is zero.

    Construction drops terms that act as zero on everything: zero weights
    and ``tail == head`` vectors.  No further normal form is applied; use
    :func:`canonicalize` to merge duplicated vectors.
    """

    terms: Tuple[DualTerm, ...] = ()

    def __post_init__(self):
        kept = tuple(t for t in self.terms if t.weight != 0 and t.tail != t.head)
        object.__setattr__(self, "terms", kept)

    @property
    def is_zero_representation(self) -> bool:
        return not self.terms


ZERO = DualElement()


def single(weight, tail, head) -> DualElement:
    """The element ``weight * [tail -> head]``."""
    return DualElement((DualTerm(weight, tail, head),))


def add(f: DualElement, g: DualElement) -> DualElement:
    return DualElement(f.terms + g.terms)


def scale(c, f: DualElement) -> DualElement:
    if c == 0:
        return ZERO
    return DualElement(tuple(DualTerm(c * t.weight, t.tail, t.head) for t in f.terms))


def negate(f: DualElement) -> DualElement:
    return scale(-1, f)


def subtract(f: DualElement, g: DualElement) -> DualElement:
    return add(f, negate(g))


def canonicalize(f: DualElement) -> DualElement:
    """Merge terms sharing the same (tail, head) vector, dropping zeros.

    This is only a partial normal form: distinct representations can still
    denote the same functional (equality of actions is not decidable from
    finitely many witnesses).
    """
    merged = {}
    order = []
    for t in f.terms:
        key = (t.tail, t.head)
        if key not in merged:
            merged[key] = t.weight
            order.append(key)
        else:
            merged[key] = merged[key] + t.weight
    return DualElement(tuple(DualTerm(merged[k], k[0], k[1]) for k in order))


def evaluate(space: SpaceModel, f: DualElement, v: BoundVector) -> Scalar:
    """Action ``<f, v> = sum_i w_i <a_i b_i, v>``."""
    space.check_point(v.tail)
    space.check_point(v.head)
    total = space.zero
    for t in f.terms:
        w = space.coerce_scalar(t.weight)
        total = total + w * qlin(space, BoundVector(t.tail, t.head), v)
    return total


def norm_single(space: SpaceModel, t, a, b) -> Scalar:
    """Norm of a one-term element: ``|t| * d(a, b)``."""
    return abs(space.coerce_scalar(t)) * space.distance(a, b)


def _quotient(space, f, quad):
    """Lipschitz quotient of ``f`` on a quadruple, or None if degenerate."""
    a, b, c, d = quad
    den = space.distance(a, b) + space.distance(c, d)
    if den == 0:
        return None
    num = abs(evaluate(space, f, BoundVector(a, b)) - evaluate(space, f, BoundVector(c, d)))
    return num / den


def norm_bounds(
    space: SpaceModel,
    f: DualElement,
    sampler: Callable[[random.Random], object],
    count: int,
    seed: int = 1,
) -> tuple:
    """Certified sandwich (lower, upper) around the dual norm of ``f``.

    * ``lower``: best Lipschitz quotient |<f,ab> - <f,cd>| / (d(a,b) + d(c,d))
      over sampled quadruples, seeded with the structural quadruples
      (a_i, b_i, b_i, a_i) and (a_i, b_i, a_j, b_j) built from the terms of
      ``f`` -- on one-term elements these reach the exact norm.
    * ``upper``: triangle-inequality bound ``sum_i |w_i| d(a_i, b_i)``.

    Degenerate quadruples (zero denominator) are skipped.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = random.Random(seed)

    upper = space.zero
    for t in f.terms:
        upper = upper + norm_single(space, t.weight, t.tail, t.head)

    quads = []
    for t in f.terms:
        quads.append((t.tail, t.head, t.head, t.tail))
    for t in f.terms:
        for u in f.terms:
            if t is not u:
                quads.append((t.tail, t.head, u.tail, u.head))
    for _ in range(count):
        quads.append(tuple(sampler(rng) for _ in range(4)))

    lower = space.zero
    for quad in quads:
        q = _quotient(space, f, quad)
        if q is not None and q > lower:
            lower = q
    return lower, upper


def equivalent(
    space: SpaceModel,
    f: DualElement,
    g: DualElement,
    witnesses: Sequence[BoundVector],
    tol=None,
) -> bool:
    """Witness-limited equality test of the actions of ``f`` and ``g``.

    Returns False as soon as some witness separates the two actions (a sound
    refutation); True means no witness separated them, which confirms
    equivalence only relative to the witness set.
    """
    if not witnesses:
        raise ValueError("witness list must be nonempty")
    if tol is None:
        tol = space.tol
    for w in witnesses:
        diff = evaluate(space, f, w) - evaluate(space, g, w)
        if abs(diff) > tol:
            return False
    return True
