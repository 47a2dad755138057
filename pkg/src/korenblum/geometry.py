"""Geometry in the unit disc: Whitney squares, separation radii, Korenblum stars."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .dyadic import Arc, DyadicAngle
from .errors import DomainError

TWO_PI = 2.0 * math.pi
DEFAULT_STAR_T = 0.1


@dataclass(frozen=True, order=True)
class DyadicSquare:
    """Whitney square ``Q_{n,k}``."""

    n: int
    k: int

    def __post_init__(self):
        if self.n < 0 or not 0 <= self.k < (1 << (self.n + 1)):
            raise DomainError(f"square index out of range: n={self.n}, k={self.k}")


@dataclass(frozen=True)
class PolarRectangle:
    """``{r e^{i theta}: theta in arc, 2**-inner_depth < 1 - r < 2**-outer_depth}``."""

    arc: Arc
    inner_depth: int
    outer_depth: int

    def __post_init__(self):
        if not self.inner_depth > self.outer_depth >= 0:
            raise DomainError("need inner_depth > outer_depth >= 0")

    @property
    def theta_range(self) -> tuple[float, float]:
        a = float(self.arc.start.turns)
        return TWO_PI * a, TWO_PI * (a + float(self.arc.length))

    @property
    def depth_range(self) -> tuple[float, float]:
        """Range of ``1 - |z|`` as (lower, upper)."""
        return 2.0 ** -self.inner_depth, 2.0 ** -self.outer_depth

    @property
    def angular_width(self) -> float:
        return TWO_PI * float(self.arc.length)

    def corners(self) -> list[complex]:
        t0, t1 = self.theta_range
        d0, d1 = self.depth_range
        return [(1 - d) * cmath.exp(1j * t) for d in (d0, d1) for t in (t0, t1)]


@dataclass(frozen=True)
class SquareRegion:
    """Floating description of a Whitney square region."""

    theta_lo: float
    theta_hi: float
    depth_lo: float
    depth_hi: float

    @property
    def diameter(self) -> float:
        r_in, r_out = 1.0 - self.depth_hi, 1.0 - self.depth_lo
        w = self.theta_hi - self.theta_lo
        chord = 2.0 * r_out * math.sin(min(w, math.pi) / 2.0)
        diag = abs(r_out * cmath.exp(1j * w) - r_in)
        return max(chord, diag, r_out - r_in)

    def sample_points(self) -> list[complex]:
        """Corners plus edge midpoints."""
        pts = []
        for d in (self.depth_lo, 0.5 * (self.depth_lo + self.depth_hi), self.depth_hi):
            for t in (self.theta_lo, 0.5 * (self.theta_lo + self.theta_hi), self.theta_hi):
                pts.append((1.0 - d) * cmath.exp(1j * t))
        del pts[4]  # centre
        return pts


def whitney_square_region(q: DyadicSquare) -> SquareRegion:
    """Region of ``Q_{n,k}``: angles ``(pi k 2^-n, pi (k+1) 2^-n)``, ``2^-n-1 < 1-r < 2^-n``."""
    scale = math.pi * 2.0 ** -q.n
    return SquareRegion(q.k * scale, (q.k + 1) * scale, 2.0 ** (-q.n - 1), 2.0 ** -q.n)


def _check_disc(z: complex) -> float:
    r = abs(z)
    if not r < 1.0:
        raise DomainError(f"|z| = {r} is not inside the unit disc")
    return r


def containing_square(z: complex) -> DyadicSquare:
    """Whitney square containing ``z``.

    Radial ties go to the smaller level ``n``; angular ties go to the square
    whose sector starts at the tie (half-open sectors).
    """
    r = _check_disc(z)
    d = 1.0 - r
    _, e = math.frexp(d)
    # d in [2^(e-1), 2^e); d == 2^(e-1) is a shared edge and goes to level -e
    n = max(0, -e)
    theta = math.atan2(z.imag, z.real) % TWO_PI
    x = theta / (math.pi * 2.0 ** -n)
    k = min(int(math.floor(x)), (1 << (n + 1)) - 1)
    return DyadicSquare(n, k)


def rho_s(z: complex, s: float) -> float:
    """Separation radius ``(1-|z|) (log 1/(1-|z|))^{-beta/2}``, log factor clamped at 1."""
    d = 1.0 - _check_disc(z)
    beta = max(0.0, s - 1.0)
    if beta == 0.0:
        return d
    return d * max(1.0, math.log(1.0 / d)) ** (-beta / 2.0)


def is_s_separated(points: Sequence[complex], s: float, eps: float) -> bool:
    """True iff the discs ``D(lambda, eps*rho_s(lambda))`` are pairwise disjoint."""
    if eps <= 0:
        raise DomainError("eps must be positive")
    pts = np.asarray(points, dtype=complex)
    if len(pts) < 2:
        return True
    rad = eps * np.array([rho_s(z, s) for z in pts])
    order = np.argsort(pts.real)
    pts, rad = pts[order], rad[order]
    reach = 2.0 * rad.max()
    for i in range(len(pts)):
        j = i + 1
        while j < len(pts) and pts[j].real - pts[i].real <= reach:
            if abs(pts[j] - pts[i]) < rad[i] + rad[j]:
                return False
            j += 1
    return True


def _lex_key(z: complex) -> tuple[float, float]:
    return abs(z), math.atan2(z.imag, z.real) % TWO_PI


def maximal_s_separated_subset(points: Iterable[complex], s: float, eps: float) -> list[complex]:
    """Greedy maximal separated subset scanning by (modulus, argument)."""
    kept: list[complex] = []
    radii: list[float] = []
    for z in sorted(points, key=_lex_key):
        rz = eps * rho_s(z, s)
        if all(abs(z - w) >= rz + rw for w, rw in zip(kept, radii)):
            kept.append(z)
            radii.append(rz)
    return kept


def boundary_points(angles_turns: Iterable[Fraction | float]) -> np.ndarray:
    return np.exp(2j * np.pi * np.array([float(a) for a in angles_turns]))


def korenblum_star_contains(F, t: float, z: complex) -> bool:
    """Membership of ``z`` in ``{1-|z| > t dist(z, F)}``; ``F`` holds angles in turns."""
    if not 0.0 < t < 1.0:
        raise DomainError("star parameter t must lie in (0, 1)")
    d = 1.0 - _check_disc(z)
    return d > t * float(boundary_distance(F, np.array([z]))[0])


def star_mask(F, t: float, zs) -> np.ndarray:
    """Vectorized :func:`korenblum_star_contains` over an array of points."""
    zs = np.asarray(zs, dtype=complex)
    return (1.0 - np.abs(zs)) > t * boundary_distance(F, zs)


def wrap_angle(x):
    """Reduce radians to ``[-pi, pi)``."""
    return (np.asarray(x) + math.pi) % TWO_PI - math.pi


def boundary_angles(F) -> np.ndarray:
    """Sorted angles in radians of a boundary set given in turns (or DyadicAngle)."""
    F = list(F)
    if not F:
        raise DomainError("boundary set F must be non-empty")
    if isinstance(F[0], DyadicAngle):
        F = [a.turns for a in F]
    return np.sort(np.array([float(Fraction(a) % 1) if isinstance(a, Fraction) else float(a) % 1.0
                             for a in F]) * TWO_PI)


def boundary_distance(F, zs: np.ndarray) -> np.ndarray:
    """Euclidean distance from each point to the finite boundary set ``F``.

    For fixed modulus the distance grows with the angular gap, so only the two
    angular neighbours of each point need checking.
    """
    ang = F if isinstance(F, np.ndarray) and F.dtype == float else boundary_angles(F)
    zs = np.asarray(zs, dtype=complex)
    theta = np.angle(zs) % TWO_PI
    idx = np.searchsorted(ang, theta)
    lo = ang[(idx - 1) % len(ang)]
    hi = ang[idx % len(ang)]
    gap = np.minimum(np.abs(wrap_angle(theta - lo)), np.abs(wrap_angle(hi - theta)))
    r = np.abs(zs)
    # |z - e^{i phi}|^2 = (1-r)^2 + 4 r sin^2(gap/2)
    return np.sqrt((1.0 - r) ** 2 + 4.0 * r * np.sin(gap / 2.0) ** 2)
