"""Worked example for s > 1: blocks of large s-area that carry little 1-area.

Generation ``k`` holds ``m_k`` disjoint intervals of length ``2^(-n_k/2)``;
above each sits the block ``2^-n_k < 1 - |z| < 2^(-n_k/2)`` and inside each
the grid marks ``l 2^-n_k``.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .dyadic import ArcFamily
from .entropy import LN2, entropy_from_gaps, radial_integral_y
from .errors import DomainError, InfeasibleError
from .geometry import TWO_PI
from .report import VerificationReport

MAX_SCALE_DOUBLINGS = 64


@dataclass
class ExampleGeneration:
    k: int
    n: int
    m: int
    intervals: ArcFamily

    @property
    def interval_length(self) -> Fraction:
        return self.intervals.length

    def marks_per_interval(self) -> int:
        return 1 << (self.n // 2)

    def mark_family(self) -> ArcFamily:
        """Grid points ``l 2^-n`` inside each (half-open) interval."""
        return self.intervals.refine(self.marks_per_interval(), Fraction(1, 1 << self.n), Fraction(0))

    def weight(self) -> Fraction:
        """``m_k n_k 2^(-n_k/2)``, exactly."""
        return Fraction(self.m * self.n, 1 << (self.n // 2))

    def growth(self, s: float) -> float:
        """``m_k n_k^s 2^(-n_k/2)``."""
        return float(Fraction(self.m, 1 << (self.n // 2))) * self.n ** s

    def area(self, alpha: float) -> float:
        """``H_alpha`` of the generation's blocks."""
        width = TWO_PI * float(self.m * self.interval_length)
        return width * radial_integral_y(self.n / 2 * LN2, self.n * LN2, alpha)

    def gaps(self) -> Counter:
        """Complementary arcs of the generation's marks on the whole circle."""
        per = self.marks_per_interval()
        fine = Fraction(1, 1 << self.n)
        g = Counter()
        if per > 1:
            g[fine] += self.m * (per - 1)
        last_offset = (per - 1) * fine
        if self.m > 1:
            (_, step), = self.intervals.levels
            g[step - last_offset] += self.m - 1
        span = self.intervals.span_below(0)
        first = self.intervals.offset
        last = first + span - self.interval_length + last_offset
        g[1 + first - last] += 1
        return g

    def kappa(self, s: float) -> float:
        return entropy_from_gaps(self.gaps(), s)


@dataclass
class WorkedExample:
    s: float
    scale: int
    exponent: int
    generations: list[ExampleGeneration]
    report: VerificationReport = field(default_factory=VerificationReport)

    def weight_sum(self) -> Fraction:
        return sum((g.weight() for g in self.generations), Fraction(0))


def _even_ceil(x: Fraction) -> int:
    n = math.ceil(x)
    return n + (n % 2)


def choose_sequences(s: float, depth: int, scale: int) -> list[tuple[int, int]]:
    """``(n_k, m_k)`` for ``k = 1..depth``: ``n_k`` even, ``n_k >= scale k^a``."""
    a = math.ceil(3.0 / (s - 1.0))
    out = []
    for k in range(1, depth + 1):
        n = _even_ceil(Fraction(scale) * k ** a)
        m = max(1, math.floor(k * (1 << (n // 2)) / _power(n, s)))
        out.append((n, m))
    return out


def _power(n: int, s: float) -> Fraction:
    """``n^s`` exactly for integer ``s``; otherwise to double precision in the fractional part."""
    whole = math.floor(s)
    frac = s - whole
    out = Fraction(n) ** whole
    return out * Fraction(n ** frac) if frac else out


def build_worked_example(s: float, depth: int) -> WorkedExample:
    """Build the example; the scale is the least power of two making the weight sum ``< 1``."""
    if not s > 1:
        raise DomainError("the worked example needs s > 1")
    if depth < 1:
        raise DomainError("depth must be >= 1")
    scale = 1
    for _ in range(MAX_SCALE_DOUBLINGS):
        seq = choose_sequences(s, depth, scale)
        total = sum((Fraction(m * n, 1 << (n // 2)) for n, m in seq), Fraction(0))
        if total < 1:
            break
        scale *= 2
    else:
        raise InfeasibleError("no scale makes the weight sum < 1")
    # pack intervals left to right with gaps equal to their length
    pos = Fraction(0)
    gens = []
    for k, (n, m) in enumerate(seq, start=1):
        length = Fraction(1, 1 << (n // 2))
        fam = ArcFamily(((m, 2 * length),), length, pos)
        pos += 2 * m * length
        gens.append(ExampleGeneration(k, n, m, fam))
    if pos > 1:
        raise InfeasibleError("intervals do not fit on the circle")
    ex = WorkedExample(s, scale, math.ceil(3.0 / (s - 1.0)), gens)
    _fill_report(ex)
    return ex


def _fill_report(ex: WorkedExample) -> None:
    rep, s = ex.report, ex.s
    rep.meta.update({"s": s, "depth": len(ex.generations), "scale": ex.scale, "exponent": ex.exponent,
                     "n": [g.n for g in ex.generations]})
    growth = [g.growth(s) for g in ex.generations]
    total = ex.weight_sum()
    rep.check("weight_sum_below_one", total < 1, "sum m_k n_k 2^(-n_k/2) < 1", float(total))
    tail = growth[-4:]
    rep.check("growth_increasing", tail[-1] >= 1.5 * tail[0] and all(b > a for a, b in zip(tail, tail[1:])),
              "m_k n_k^s 2^(-n_k/2) over the last four generations", tail[-1] / tail[0])
    hs = [g.area(s) for g in ex.generations]
    rep.check("area_s_increasing", all(b > a for a, b in zip(hs, hs[1:])), "H_s(E_k) increases")
    h1 = _partial_sums([g.area(1.0) for g in ex.generations])
    rep.check("area_1_bounded", _looks_bounded(h1), "partial sums of H_1(E_k) level off", h1[-1])
    beta = s - 1.0
    # weight sum counterpart: one power of log below H_1
    h0 = _partial_sums([g.area(0.0) for g in ex.generations])
    rep.meta["area_0_bounded"] = _looks_bounded(h0)
    for g, gr in zip(ex.generations, growth):
        rep.ratio("growth").add(g.k, gr)
        rep.ratio("area_s_over_growth").add(g.k, g.area(s) / gr)
        rep.ratio("kappa_over_growth").add(g.k, g.kappa(s) / gr)
        rep.ratio("area_shifted_over_growth").add(g.k, g.area(beta) / gr)
    for g, a, b in zip(ex.generations, h1, h0):
        rep.ratio("area_1_partial").add(g.k, a)
        rep.ratio("area_0_partial").add(g.k, b)


def _partial_sums(xs: list[float]) -> list[float]:
    out, acc = [], []
    for x in xs:
        acc.append(x)
        out.append(math.fsum(acc))
    return out


def _looks_bounded(partial: list[float]) -> bool:
    """Increments over the last four terms shrink geometrically (ratio <= 0.8)."""
    inc = [b - a for a, b in zip(partial, partial[1:])][-3:]
    if len(inc) < 2:
        return True
    return all(b <= 0.8 * a for a, b in zip(inc, inc[1:]))
