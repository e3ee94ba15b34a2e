"""Quasilinearization pairing on bound vectors and its potential functions.

The pairing of two ordered point pairs (bound vectors) is

    <ab, cd> = ( d(a,d)^2 + d(b,c)^2 - d(a,c)^2 - d(b,d)^2 ) / 2

It plays the role of an inner product: it is antisymmetric under reversing
either vector, telescopes over intermediate points in the first slot, and in
CAT(0) spaces satisfies the Cauchy-Schwarz bound ``<ab, cd> <= d(a,b) d(c,d)``.
The potential ``phi_ab(z) = (d(a,z)^2 - d(b,z)^2) / 2`` recovers the pairing
through differences: ``<ab, cd> = phi_cd(b) - phi_cd(a) = phi_ab(d) - phi_ab(c)``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, List, Optional

from .spaces import Scalar, SpaceModel


@dataclass(frozen=True)
class BoundVector:
    """Ordered pair of points; ``tail == head`` is the zero vector."""

    tail: object
    head: object

    def reversed(self) -> "BoundVector":
        return BoundVector(self.head, self.tail)

    @property
    def is_zero(self) -> bool:
        return self.tail == self.head


def bvec(tail, head) -> BoundVector:
    return BoundVector(tail, head)


def qlin(space: SpaceModel, ab: BoundVector, cd: BoundVector) -> Scalar:
    """Quasilinearization pairing of two bound vectors."""
    a, b = ab.tail, ab.head
    c, d = cd.tail, cd.head
    dad = space.distance(a, d)
    dbc = space.distance(b, c)
    dac = space.distance(a, c)
    dbd = space.distance(b, d)
    return space.half * (dad * dad + dbc * dbc - dac * dac - dbd * dbd)


def phi(space: SpaceModel, xy: BoundVector, z) -> Scalar:
    """Potential ``phi_xy(z) = (d(x,z)^2 - d(y,z)^2) / 2``."""
    space.check_point(z)
    dxz = space.distance(xy.tail, z)
    dyz = space.distance(xy.head, z)
    return space.half * (dxz * dxz - dyz * dyz)


@dataclass
class IdentityWitness:
    """First failing sample of an identity check."""

    identity: str
    points: tuple
    lhs: Scalar
    rhs: Scalar


@dataclass
class IdentityReport:
    """Outcome of sampling the pairing identities on random quadruples."""

    checked: int
    passed: bool
    witness: Optional[IdentityWitness] = None

    def to_json_dict(self) -> dict:
        out = {"checked": self.checked, "passed": self.passed}
        if self.witness is not None:
            out["witness"] = {
                "identity": self.witness.identity,
                "points": [repr(p) for p in self.witness.points],
                "lhs": str(self.witness.lhs),
                "rhs": str(self.witness.rhs),
            }
        return out


def check_qlin_identities(
    space: SpaceModel,
    sampler: Callable[[random.Random], object],
    count: int,
    seed: int = 1,
) -> IdentityReport:
    """Verify the pairing identities on ``count`` sampled quadruples.

    Checks, per quadruple (a, b, c, d) and an extra midpoint sample x:

    * phi decomposition:  <ab, cd> = phi_cd(b) - phi_cd(a) = phi_ab(d) - phi_ab(c)
    * antisymmetry:       <ba, cd> = -<ab, cd>  and  <ab, dc> = -<ab, cd>
    * telescoping:        <ab, cd> = <ax, cd> + <xb, cd>
    * Cauchy-Schwarz:     <ab, cd> <= d(a,b) d(c,d)

    The report carries the first witness on failure.  Identities are compared
    exactly in exact mode and within the space tolerance in float mode.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = random.Random(seed)

    def close(u, v):
        return space.is_zero(u - v)

    for i in range(count):
        a, b, c, d, x = (sampler(rng) for _ in range(5))
        ab = BoundVector(a, b)
        cd = BoundVector(c, d)
        value = qlin(space, ab, cd)

        checks = [
            ("phi-decomposition-second-slot", value, phi(space, cd, b) - phi(space, cd, a)),
            ("phi-decomposition-first-slot", value, phi(space, ab, d) - phi(space, ab, c)),
            ("antisymmetry-first-slot", qlin(space, ab.reversed(), cd), -value),
            ("antisymmetry-second-slot", qlin(space, ab, cd.reversed()), -value),
            (
                "telescoping",
                value,
                qlin(space, BoundVector(a, x), cd) + qlin(space, BoundVector(x, b), cd),
            ),
        ]
        for name, lhs, rhs in checks:
            if not close(lhs, rhs):
                return IdentityReport(i + 1, False, IdentityWitness(name, (a, b, c, d, x), lhs, rhs))

        bound = space.distance(a, b) * space.distance(c, d)
        if not space.is_nonnegative(bound - value):
            return IdentityReport(
                i + 1, False, IdentityWitness("cauchy-schwarz", (a, b, c, d), value, bound)
            )

    return IdentityReport(count, True)
