"""Entropy and density functionals: s-entropy, star sums, alpha-area, Stolz counts."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import integrate, special

from .errors import DomainError
from .geometry import (
    DEFAULT_STAR_T,
    TWO_PI,
    PolarRectangle,
    boundary_angles,
    containing_square,
    star_mask,
    whitney_square_region,
)

LN2 = math.log(2.0)
DEFAULT_APERTURE = 2.0
QUAD_RTOL = 1e-10


@dataclass(frozen=True)
class EntropyValue:
    value: float
    term_count: int


@dataclass
class DensityEstimate:
    ratios: list[tuple[float, float]]   # (entropy, Sigma_t / entropy)
    sup_ratio: float


def _turns(F) -> list:
    out = []
    for a in F:
        if hasattr(a, "turns"):
            a = a.turns
        out.append(a % 1 if isinstance(a, Fraction) else float(a) % 1.0)
    return out


def complementary_arcs(F) -> list[tuple[object, object]]:
    """Arcs complementary to ``F`` as ``(start, normalized length)`` pairs.

    Angles are in turns.  Exact ``Fraction`` input gives exact lengths.
    Repeated points are merged.
    """
    pts = sorted(set(_turns(F)))
    if not pts:
        raise DomainError("boundary set F must be non-empty")
    arcs = [(a, b - a) for a, b in zip(pts, pts[1:])]
    arcs.append((pts[-1], pts[0] + 1 - pts[-1]))
    return arcs


def entropy_term(length: float, s: float, base: float = math.e) -> float:
    """``|I| (log(base/|I|))^s``; ``base = e`` for the s-entropy."""
    return length * math.log(base / length) ** s if length > 0 else 0.0


def s_entropy(F, s: float) -> EntropyValue:
    """``sum_j |I_j| (log e/|I_j|)^s`` over the arcs complementary to ``F``."""
    arcs = complementary_arcs(F)
    terms = [entropy_term(float(length), s) for _, length in arcs]
    return EntropyValue(math.fsum(terms), len(arcs))


def log_inverse(x) -> float:
    """``log(1/x)``, exact for Fractions far below the float range."""
    if isinstance(x, Fraction):
        return math.log(x.denominator) - math.log(x.numerator)
    return -math.log(x)


def entropy_from_gaps(gaps: Mapping[Fraction, int], s: float, base: float = math.e) -> float:
    """s-entropy of a gap multiset ``{normalized length: multiplicity}``."""
    lb = math.log(base)
    return math.fsum(float(count * length) * (lb + log_inverse(length)) ** s
                     for length, count in sorted(gaps.items()) if length > 0)


def sigma_t(F, E: Sequence[complex], t: float) -> float:
    """``sum (1-|lambda|)`` over ``lambda in E`` inside the star ``K^t_1(F)``."""
    E = np.asarray(E, dtype=complex)
    if len(E) == 0:
        boundary_angles(F)
        return 0.0
    inside = star_mask(F, t, E)
    return math.fsum((1.0 - np.abs(E[inside])).tolist())


def sigma_tilde(F, E: Sequence[complex], t: float = DEFAULT_STAR_T) -> float:
    """Whitney-square version: ``sum card(Q cap E) |Q|`` over squares inside ``K_1(F)``.

    Containment ``Q subset K_1(F)`` is tested at the corners and edge midpoints
    of ``Q``.
    """
    E = list(E)
    angles = boundary_angles(F)
    if not E:
        return 0.0
    counts = Counter(containing_square(z) for z in E)
    total = []
    for q in sorted(counts):
        region = whitney_square_region(q)
        if star_mask(angles, t, np.array(region.sample_points())).all():
            total.append(counts[q] * region.diameter)
    return math.fsum(total)


def density_ratio_profile(E: Sequence[complex], Fs: Sequence, s: float, t: float) -> DensityEstimate:
    """Ratios ``Sigma_t(F, E) / kappa_s(F)`` along a sequence of boundary sets."""
    if not Fs:
        raise DomainError("need at least one boundary set")
    ratios = []
    prev = -math.inf
    for F in Fs:
        kappa = s_entropy(F, s).value
        if kappa <= prev:
            raise DomainError("entropy sequence must be strictly increasing")
        prev = kappa
        ratios.append((kappa, sigma_t(F, E, t) / kappa))
    return DensityEstimate(ratios, max(r for _, r in ratios))


# ---------------------------------------------------------------------------
# alpha-area


def radial_integral(x_lo: float, x_hi: float, alpha: float) -> float:
    """``int r (1-r)^-1 (log 1/(1-r))^alpha dr`` for ``1 - r`` in ``(x_lo, x_hi)``.

    Evaluated in ``y = log 1/(1-r)`` where the integrand ``y^alpha (1 - e^-y)`` is
    smooth; adaptive quadrature to relative tolerance 1e-10.
    """
    if not 0 < x_lo < x_hi <= 1:
        raise DomainError("need 0 < x_lo < x_hi <= 1")
    return radial_integral_y(-math.log(x_hi), -math.log(x_lo), alpha)


def radial_integral_y(y0: float, y1: float, alpha: float) -> float:
    """:func:`radial_integral` over ``y0 < log 1/(1-r) < y1``."""
    if not 0 <= y0 < y1:
        raise DomainError("need 0 <= y0 < y1")
    f = lambda y: y ** alpha * -math.expm1(-y)
    val, _ = integrate.quad(f, y0, y1, epsrel=QUAD_RTOL, epsabs=0.0, limit=200)
    return val


def radial_integral_closed_form(x_lo: float, x_hi: float, alpha: float) -> float:
    """Closed form via the incomplete gamma function."""
    y0, y1 = -math.log(x_hi), -math.log(x_lo)
    power = (y1 ** (alpha + 1) - y0 ** (alpha + 1)) / (alpha + 1)
    gamma_part = special.gamma(alpha + 1) * (special.gammainc(alpha + 1, y1) - special.gammainc(alpha + 1, y0))
    return power - gamma_part


def block_area(block: PolarRectangle, alpha: float) -> float:
    lo, hi = block.depth_range
    return block.angular_width * radial_integral(lo, hi, alpha)


def blocks_overlap(a: PolarRectangle, b: PolarRectangle) -> bool:
    radial = a.outer_depth < b.inner_depth and b.outer_depth < a.inner_depth
    return radial and a.arc.intersects(b.arc)


def h_alpha_area(blocks: Sequence[PolarRectangle], alpha: float) -> float:
    """``H_alpha`` of a union of pairwise disjoint polar rectangles."""
    if alpha < 0:
        raise DomainError("alpha must be non-negative")
    blocks = list(blocks)
    by_depth: dict[tuple[int, int], list[PolarRectangle]] = {}
    for b in blocks:
        by_depth.setdefault((b.inner_depth, b.outer_depth), []).append(b)
    keys = sorted(by_depth)
    for i, ka in enumerate(keys):
        for kb in keys[i:]:
            for x in by_depth[ka]:
                for y in by_depth[kb]:
                    if x is not y and blocks_overlap(x, y):
                        raise DomainError("blocks overlap")
    total = []
    for key in keys:
        group = by_depth[key]
        lo, hi = 2.0 ** -key[0], 2.0 ** -key[1]
        width = TWO_PI * float(sum(b.arc.length for b in group))
        total.append(width * radial_integral(lo, hi, alpha))
    return math.fsum(total)


# ---------------------------------------------------------------------------
# Stolz angles


def stolz_halfwidths(E: Sequence[complex], aperture: float) -> tuple[np.ndarray, np.ndarray]:
    """Centre angle and half-width of ``{zeta: |lambda - e^{i zeta}| < aperture (1-|lambda|)}``.

    A half-width of ``pi`` means the whole circle.
    """
    if aperture <= 1:
        raise DomainError("aperture must exceed 1")
    E = np.asarray(E, dtype=complex)
    rho = np.abs(E)
    return np.angle(E) % TWO_PI, _halfwidth(1.0 - rho, aperture)


def _halfwidth(d: np.ndarray, aperture: float) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    rho = 1.0 - d
    with np.errstate(divide="ignore", invalid="ignore"):
        x = np.where(rho > 0, (aperture ** 2 - 1.0) * d ** 2 / (4.0 * rho), np.inf)
    full = x >= 1.0
    hw = 2.0 * np.arcsin(np.sqrt(np.minimum(x, 1.0)))
    return np.where(full, math.pi, hw)


def phi_E(zeta: float, E: Sequence[complex], aperture: float = DEFAULT_APERTURE) -> int:
    """Number of points of ``E`` in the Stolz angle at ``e^{i zeta}``."""
    if aperture <= 1:
        raise DomainError("aperture must exceed 1")
    E = np.asarray(E, dtype=complex)
    if len(E) == 0:
        return 0
    return int(np.count_nonzero(np.abs(E - np.exp(1j * zeta)) < aperture * (1.0 - np.abs(E))))


def coverage_measure(centers: np.ndarray, halfwidths: np.ndarray, n: int,
                     period: float = TWO_PI) -> float:
    """Measure of points covered by at least ``n`` of the open arcs, by endpoint sweep.

    Arcs are ``(c - h, c + h)`` on a circle of length ``period``; ``h >= period/2``
    covers everything.  Returns the raw (unnormalized) measure.
    """
    centers = np.asarray(centers, dtype=float)
    halfwidths = np.asarray(halfwidths, dtype=float)
    full = halfwidths >= period / 2.0
    base = int(np.count_nonzero(full))
    if base >= n:
        return period
    c, h = centers[~full] % period, halfwidths[~full]
    lo, hi = c - h, c + h
    # split arcs crossing 0 into two pieces
    wrap_lo, wrap_hi = lo < 0, hi > period
    starts = np.concatenate([np.maximum(lo, 0.0), lo[wrap_lo] + period, np.zeros(np.count_nonzero(wrap_hi))])
    ends = np.concatenate([np.minimum(hi, period), np.full(np.count_nonzero(wrap_lo), period), hi[wrap_hi] - period])
    if len(starts) == 0:
        return 0.0
    pos = np.concatenate([starts, ends])
    delta = np.concatenate([np.ones(len(starts), dtype=np.int64), -np.ones(len(ends), dtype=np.int64)])
    order = np.lexsort((delta, pos))
    pos, delta = pos[order], delta[order]
    depth = base + np.cumsum(delta)
    seg = np.diff(pos)
    return float(math.fsum(seg[depth[:-1] >= n].tolist()))


def h_E(n: int, E: Sequence[complex], aperture: float = DEFAULT_APERTURE) -> float:
    """Normalized measure of ``{zeta : phi_E(zeta) >= n}``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    E = list(E)
    if len(E) < n:
        return 0.0
    c, h = stolz_halfwidths(E, aperture)
    return coverage_measure(c, h, n) / TWO_PI


def stolz_series_tests(E: Sequence[complex], w: Sequence[float], M, n_max: int,
                     aperture: float = DEFAULT_APERTURE, h_values: Sequence[float] | None = None
                     ) -> tuple[float, float]:
    """Partial sums ``sum h_E(n) w_n`` and ``sum w_n / M(1 - 2^-n)`` for ``n <= n_max``.

    ``h_values`` may supply precomputed ``h_E(1..n_max)``.
    """
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    w = [float(x) for x in w[:n_max]]
    if len(w) < n_max:
        raise DomainError("weight sequence shorter than n_max")
    if any(x < 0 for x in w) or any(b > a for a, b in zip(w, w[1:])):
        raise DomainError("weights must be non-negative and non-increasing")
    if h_values is None:
        h_values = [h_E(n, E, aperture) for n in range(1, n_max + 1)]
    series_hw = math.fsum(h * x for h, x in zip(h_values, w))
    series_wm = math.fsum(x / math.exp(M.log_at_depth(n * LN2)) for n, x in enumerate(w, start=1) if x)
    return series_hw, series_wm


def weighted_coverage(lo: np.ndarray, hi: np.ndarray, weights: np.ndarray, n: float) -> float:
    """Length of ``{x : sum of weights of intervals (lo, hi) containing x >= n}`` on a line."""
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    weights = np.asarray(weights, dtype=float)
    keep = hi > lo
    lo, hi, weights = lo[keep], hi[keep], weights[keep]
    if len(lo) == 0:
        return 0.0
    pos = np.concatenate([lo, hi])
    delta = np.concatenate([weights, -weights])
    order = np.argsort(pos, kind="stable")
    pos, delta = pos[order], delta[order]
    depth = np.cumsum(delta)
    seg = np.diff(pos)
    return float(math.fsum(seg[depth[:-1] >= n - 1e-9].tolist()))
