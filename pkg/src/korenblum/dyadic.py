"""Exact dyadic angles, arcs and regular arc families on the unit circle.

Angles are measured in turns (the full circle has length 1), so an arc of
normalized length ``2**-q`` is exactly representable for any ``q``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import DomainError, InvariantViolation


def _dyadic_log2_den(x: Fraction) -> int:
    den = x.denominator
    if den & (den - 1):
        raise DomainError(f"{x} is not a dyadic rational")
    return den.bit_length() - 1


@dataclass(frozen=True, order=True)
class DyadicAngle:
    """The angle ``2*pi*numerator / 2**log2_denominator`` in canonical form."""

    numerator: int
    log2_denominator: int

    def __post_init__(self):
        if self.log2_denominator < 0 or self.numerator < 0:
            raise DomainError("dyadic angle needs non-negative fields")
        if self.numerator >= 1 << self.log2_denominator:
            raise DomainError("dyadic angle numerator must be < 2**log2_denominator")
        if self.numerator and self.numerator % 2 == 0 or (self.numerator == 0 and self.log2_denominator):
            raise DomainError("dyadic angle is not in canonical (reduced) form")

    @classmethod
    def from_fraction(cls, turns: Fraction | int) -> "DyadicAngle":
        """Reduce ``turns`` modulo 1 and build the canonical angle."""
        x = Fraction(turns) % 1
        if x == 0:
            return cls(0, 0)
        return cls(x.numerator, _dyadic_log2_den(x))

    @property
    def turns(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.log2_denominator)

    @property
    def radians(self) -> float:
        return 2.0 * math.pi * float(self.turns)

    def __add__(self, other: "DyadicAngle") -> "DyadicAngle":
        return DyadicAngle.from_fraction(self.turns + other.turns)


@dataclass(frozen=True)
class Arc:
    """Half-open arc ``[start, start + 2**-length_log2)`` in turns."""

    start: DyadicAngle
    length_log2: int

    def __post_init__(self):
        if self.length_log2 < 0:
            raise DomainError("arc length exponent must be >= 0")

    @property
    def length(self) -> Fraction:
        return Fraction(1, 1 << self.length_log2)

    @property
    def end(self) -> Fraction:
        """End point in turns, not reduced modulo 1."""
        return self.start.turns + self.length

    @property
    def midpoint(self) -> Fraction:
        return self.start.turns + self.length / 2

    def split(self, j: int) -> list["Arc"]:
        """Split into ``2**j`` equal consecutive subarcs."""
        step = Fraction(1, 1 << (self.length_log2 + j))
        return [
            Arc(DyadicAngle.from_fraction(self.start.turns + i * step), self.length_log2 + j)
            for i in range(1 << j)
        ]

    def contains_arc(self, other: "Arc") -> bool:
        lo = (other.start.turns - self.start.turns) % 1
        return lo + other.length <= self.length

    def intersects(self, other: "Arc") -> bool:
        a = (other.start.turns - self.start.turns) % 1
        b = (self.start.turns - other.start.turns) % 1
        return a < self.length or b < other.length


def concatenate(arcs: Sequence[Arc]) -> Arc:
    """Join consecutive adjacent arcs whose union is a dyadic arc."""
    if not arcs:
        raise DomainError("nothing to concatenate")
    total = Fraction(0)
    pos = arcs[0].start.turns
    for arc in arcs:
        if arc.start.turns != pos % 1:
            raise DomainError("arcs are not adjacent")
        pos = arc.start.turns + arc.length
        total += arc.length
    return Arc(arcs[0].start, _dyadic_log2_den(total))


@dataclass(frozen=True)
class ArcFamily:
    """A regular family of equal arcs given by nested digit levels.

    Arc starts are ``offset + sum_g i_g * step_g`` with ``0 <= i_g < count_g``;
    every arc has the same ``length``.  Levels are ordered from coarse to fine
    so lexicographic digit order is increasing angular order whenever
    :meth:`check_disjoint` holds.
    """

    levels: tuple[tuple[int, Fraction], ...]
    length: Fraction
    offset: Fraction = Fraction(0)

    @property
    def card(self) -> int:
        n = 1
        for count, _ in self.levels:
            n *= count
        return n

    @property
    def total_length(self) -> Fraction:
        return self.card * self.length

    def span_below(self, level: int) -> Fraction:
        """Extent of one level-``level`` cell's content: finer digits plus the arc."""
        span = self.length
        for count, step in self.levels[level:]:
            span += (count - 1) * step
        return span

    def check_disjoint(self) -> None:
        """Structural exact disjointness test; raises on failure."""
        for g, (count, step) in enumerate(self.levels):
            if count < 1:
                raise InvariantViolation("empty digit level", g)
            if count > 1 and self.span_below(g + 1) > step:
                raise InvariantViolation("sub-cells overlap at digit level", g)
        if self.span_below(0) > 1:
            raise InvariantViolation("family wraps over itself on the circle")

    def translate(self, shift: Fraction) -> "ArcFamily":
        return ArcFamily(self.levels, self.length, self.offset + shift)

    def refine(self, count: int, step: Fraction, length: Fraction, shift: Fraction = Fraction(0)) -> "ArcFamily":
        """Family of ``count`` subarcs per arc, spaced by ``step`` from ``shift``."""
        return ArcFamily(self.levels + ((count, step),), length, self.offset + shift)

    def starts(self, limit: int | None = None) -> Iterator[Fraction]:
        """Enumerate starts in increasing order (refuses huge families)."""
        if limit is not None and self.card > limit:
            raise DomainError(f"family has {self.card} arcs, above enumeration limit {limit}")
        yield from self._walk(0, self.offset)

    def _walk(self, g: int, base: Fraction) -> Iterator[Fraction]:
        if g == len(self.levels):
            yield base
            return
        count, step = self.levels[g]
        for i in range(count):
            yield from self._walk(g + 1, base + i * step)

    def arcs(self, limit: int | None = None) -> list[Arc]:
        k = _dyadic_log2_den(self.length) if self.length.numerator == 1 else None
        if k is None:
            raise DomainError("arc length is not a power of two")
        return [Arc(DyadicAngle.from_fraction(a), k) for a in self.starts(limit)]

    def contains_family(self, child: "ArcFamily") -> bool:
        """Exact test that every arc of ``child`` lies in an arc of ``self``.

        Requires ``child`` to extend ``self``'s digit levels.
        """
        n = len(self.levels)
        if child.levels[:n] != self.levels:
            return False
        shift = child.offset - self.offset
        if shift < 0:
            return False
        return shift + child.span_below(n) <= self.length


def explicit_disjoint(starts: Sequence[Fraction], length: Fraction) -> bool:
    """Brute-force disjointness of equal half-open arcs on the circle."""
    xs = sorted(Fraction(a) % 1 for a in starts)
    for a, b in zip(xs, xs[1:]):
        if b - a < length:
            return False
    return len(xs) <= 1 or xs[0] + 1 - xs[-1] >= length
