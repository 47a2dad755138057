"""Poisson and conjugate integrals, the extremal function, Blaschke factors, Harnack checks.

Evaluation points are handled in local coordinates: ``delta = 1 - |z|`` and
the angle ``psi`` of a boundary point measured from ``arg z``.  Cell positions
are kept as exact integers on a dyadic grid, so deep generations keep full
relative precision next to the boundary.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .construction import AtomicMeasure, CantorMeasure, ConstructionBundle
from .errors import CertificationFailed, DomainError, PrecisionError
from .geometry import TWO_PI
from .minorant import Minorant

GUARD_EXPONENT = 40
GUARD = 2.0 ** -GUARD_EXPONENT
SMEAR_TAU = 0.01
EXPLICIT_CAP = 64
ANGLE_BITS = 96
A_MAX_EXPONENT = 40

_GL_X, _GL_W = np.polynomial.legendre.leggauss(4)


# ---------------------------------------------------------------------------
# kernels


def _check_point(z: complex) -> float:
    r = abs(z)
    if not r < 1.0:
        raise DomainError(f"|z| = {r} is not inside the unit disc")
    return r


def poisson_kernel(z: complex, theta: float) -> float:
    """``(1 - |z|^2) / |e^{i theta} - z|^2``; its mean over the circle is 1."""
    r = _check_point(z)
    return (1.0 - r * r) / abs(cmath.exp(1j * theta) - z) ** 2


def conjugate_kernel(z: complex, theta: float) -> float:
    """``Im (e^{i theta} + z) / (e^{i theta} - z)``; vanishes at the origin."""
    _check_point(z)
    w = cmath.exp(1j * theta)
    return ((w + z) / (w - z)).imag


def _local_kernel(psi, delta):
    """``(e^{i psi} + rho) / (e^{i psi} - rho)`` with ``rho = 1 - delta``, cancellation-free."""
    psi = np.asarray(psi, dtype=float)
    rho = 1.0 - delta
    s = np.sin(psi / 2.0)
    den = (delta - 2.0 * s * s) + 1j * np.sin(psi)
    num = (2.0 - delta - 2.0 * s * s) + 1j * np.sin(psi)
    return num / den


def _arc_distance(a: float, b: float, delta: float) -> float:
    """Distance from ``1 - delta`` to the boundary arc ``[a, b]`` (local radians, ``a >= -pi``)."""
    if a <= 0.0 <= b or b >= TWO_PI:
        return delta
    gap = min(a, TWO_PI - b) if a > 0.0 else min(-b, a + TWO_PI)
    rho = 1.0 - delta
    return math.sqrt(delta * delta + 4.0 * rho * math.sin(gap / 2.0) ** 2)


def arc_mean(a: float, b: float, delta: float) -> complex:
    """Mean of the Herglotz kernel over the arc ``[a, b]`` in local coordinates.

    Closed form ``(-(b-a) - 2i [Log(e^{it} - rho)]_a^b) / (b - a)`` with the
    continuous branch; the argument increases monotonically so its increment
    lies in ``(0, 2 pi)``.  Short arcs far from the point use 4-point
    Gauss-Legendre instead to avoid cancellation.
    """
    length = b - a
    if length <= 0:
        raise DomainError("arc must have positive length")
    if length >= TWO_PI * (1.0 - 1e-15):
        return 1.0 + 0.0j
    if length <= 1e-2 * _arc_distance(a, b, delta):
        mid, half = 0.5 * (a + b), 0.5 * length
        vals = _local_kernel(mid + half * _GL_X, delta)
        return complex(np.dot(_GL_W, vals) / 2.0)
    rho_shift = delta

    def log_w(t):
        s = math.sin(t / 2.0)
        w = complex(rho_shift - 2.0 * s * s, math.sin(t))
        return 0.5 * math.log(w.real * w.real + w.imag * w.imag), math.atan2(w.imag, w.real)

    la, ga = log_w(a)
    lb, gb = log_w(b)
    darg = (gb - ga) % TWO_PI
    total = -length + 2.0 * darg - 2j * (lb - la)
    return total / length


def arc_poisson(a: float, b: float, z: complex) -> float:
    """``(P * chi_arc)(z)`` for the arc ``[a, b]`` (radians) with ``dm = dt / 2 pi``."""
    r = _check_point(z)
    phi = math.atan2(z.imag, z.real)
    return (b - a) / TWO_PI * arc_mean(a - phi, b - phi, 1.0 - r).real


# ---------------------------------------------------------------------------
# fields


MeasureLike = Union[AtomicMeasure, CantorMeasure]


def _log2_den(x: Fraction) -> int:
    return x.denominator.bit_length() - 1


@dataclass
class HarmonicField:
    """``u + i u~`` for ``A`` times a boundary measure."""

    measure: MeasureLike
    scale: float = 1.0
    tau: float = SMEAR_TAU
    _atomic: Optional[tuple[np.ndarray, np.ndarray]] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError("scale A must be positive")
        if isinstance(self.measure, AtomicMeasure):
            turns = np.array([float(a.turns) for a, _ in self.measure.atoms])
            masses = np.array([float(m) for _, m in self.measure.atoms])
            self._atomic = (turns, masses)
        else:
            fam = self.measure.family
            self._levels = fam.levels
            self._spans = [fam.span_below(g) for g in range(len(fam.levels) + 1)]
            counts = [c for c, _ in fam.levels]
            mass = [self.measure.atom_mass]
            for c in reversed(counts):
                mass.append(mass[-1] * c)
            self._masses = [float(m) for m in reversed(mass)]
            dens = [fam.offset, fam.length / 2] + [st for _, st in fam.levels] + self._spans
            self._bits = max(max(_log2_den(Fraction(d)) for d in dens) + 2, ANGLE_BITS)

    @property
    def total_mass(self) -> float:
        return float(self.measure.total_mass)

    def with_scale(self, scale: float) -> "HarmonicField":
        return HarmonicField(self.measure, scale, self.tau)

    def local(self, phi: Fraction | float, delta: float) -> complex:
        """``u + i u~`` at ``(1 - delta) e^{2 pi i phi}`` (``phi`` in turns)."""
        if not delta >= GUARD:
            raise PrecisionError(f"1 - |z| = {delta} is below the evaluation guard 2^-{GUARD_EXPONENT}")
        if delta > 1.0:
            raise DomainError("delta must be in (0, 1]")
        if self._atomic is not None:
            return self.scale * self._explicit(float(phi), delta)
        return self.scale * self._hierarchical(phi, delta)

    def __call__(self, z: complex) -> complex:
        r = _check_point(z)
        phi = math.atan2(z.imag, z.real) / TWO_PI
        return self.local(phi % 1.0, 1.0 - r)

    # explicit summation over atoms
    def _explicit(self, phi: float, delta: float) -> complex:
        turns, masses = self._atomic
        rel = (turns - phi + 0.5) % 1.0 - 0.5
        vals = masses * _local_kernel(TWO_PI * rel, delta)
        return complex(math.fsum(vals.real.tolist()), math.fsum(vals.imag.tolist()))

    # hierarchical summation over a regular family
    def _hierarchical(self, phi, delta: float) -> complex:
        bits = self._bits
        unit = 1 << bits
        phi_int = round(Fraction(phi) * unit) % unit
        fam = self.measure.family
        ctx = _Ctx(
            unit=unit,
            phi=phi_int,
            delta=delta,
            tau=self.tau,
            steps=[int(st * unit) for _, st in self._levels],
            counts=[c for c, _ in self._levels],
            spans=[int(sp * unit) for sp in self._spans],
            half=int(fam.length * unit) // 2,
            masses=self._masses,
        )
        return ctx.cell(0, int(fam.offset * unit))


@dataclass
class _Ctx:
    unit: int
    phi: int
    delta: float
    tau: float
    steps: list[int]
    counts: list[int]
    spans: list[int]
    half: int
    masses: list[float]

    def psi(self, pos: int) -> float:
        x = (pos - self.phi) % self.unit
        if 2 * x >= self.unit:
            x -= self.unit
        return TWO_PI * (x / self.unit)

    def rad(self, n: int) -> float:
        return TWO_PI * (n / self.unit)

    def cell(self, g: int, base: int) -> complex:
        mass = self.masses[g]
        if g == len(self.counts):
            return mass * complex(_local_kernel(self.psi(base + self.half), self.delta))
        a = self.psi(base)
        span = self.rad(self.spans[g])
        if span <= self.tau * _arc_distance(a, a + span, self.delta):
            return mass * arc_mean(a, a + span, self.delta)
        count, step = self.counts[g], self.steps[g]
        child_mass = self.masses[g + 1]
        c0 = base + self.spans[g + 1] // 2 - step // 2      # start of smeared period of child 0
        step_rad = self.rad(step)
        if count > 1 and step_rad <= self.tau * self.delta and self.rad(self.spans[g + 1]) <= self.tau * self.delta:
            a0 = self.psi(c0)
            return mass * arc_mean(a0, a0 + count * step_rad, self.delta)
        if count <= EXPLICIT_CAP:
            return sum((self.cell(g + 1, base + i * step) for i in range(count)), 0j)
        # near window explicit, far field as a uniform density
        reach = math.ceil(1.0 / self.tau) + 1
        centre = c0 + step // 2
        ranges = []
        for shift in (-self.unit, 0, self.unit):
            rel = self.phi + shift - centre
            i_mid = rel // step
            lo, hi = max(0, i_mid - reach), min(count - 1, i_mid + reach + 1)
            if lo <= hi:
                ranges.append((lo, hi))
        ranges = _merge(ranges)
        a0 = self.psi(c0)
        total = mass * arc_mean(a0, a0 + count * step_rad, self.delta)
        for lo, hi in ranges:
            near = sum((self.cell(g + 1, base + i * step) for i in range(lo, hi + 1)), 0j)
            w0 = self.psi(c0 + lo * step)
            smear = (hi - lo + 1) * child_mass * arc_mean(w0, w0 + (hi - lo + 1) * step_rad, self.delta)
            total += near - smear
        return total


def _merge(ranges: list[tuple[int, int]]) -> list[tuple[int, int]]:
    out: list[tuple[int, int]] = []
    for lo, hi in sorted(ranges):
        if out and lo <= out[-1][1] + 1:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def poisson_integral(fld: HarmonicField, z: complex) -> float:
    return fld(z).real


def conjugate_integral(fld: HarmonicField, z: complex) -> float:
    return fld(z).imag


def evaluate_f(fld: HarmonicField, z: complex) -> complex:
    """``f = exp(-u - i u~)``, so ``|f| = exp(-u)``."""
    return cmath.exp(-fld(z))


# ---------------------------------------------------------------------------
# certification of u >= M on the blocks


@dataclass
class CertificationResult:
    min_ratio: float
    A: float
    samples: int
    blocks: int
    per_unit_min: float
    worst_sample: tuple[float, float]        # (phi turns, delta)

    @property
    def log_f_margin(self) -> float:
        """``min(-log|f| - M)`` expressed as the ratio ``u / M``; >= 1 means certified."""
        return self.min_ratio


def block_samples(start: Fraction, width: Fraction, inner: int, outer: int, density: int
                  ) -> list[tuple[Fraction, float]]:
    """Corners, centre and a ``density x density`` interior grid (log-spaced in depth)."""
    pts = []
    for x in (Fraction(0), Fraction(1)):
        for q in (inner, outer):
            pts.append((start + x * width, 2.0 ** -q))
    ymid = 0.5 * (inner + outer)
    pts.append((start + width / 2, 2.0 ** -ymid))
    for i in range(density):
        x = Fraction(2 * i + 1, 2 * density)
        for j in range(density):
            y = outer + (inner - outer) * (j + 0.5) / density
            pts.append((start + x * width, 2.0 ** -y))
    return pts


def _pick_blocks(card: int, limit: int) -> list[int]:
    if card <= limit:
        return list(range(card))
    idx = {0, card - 1}
    for i in range(limit - 2):
        idx.add((i + 1) * (card - 1) // (limit - 1))
    return sorted(idx)


def certify_minorant_bound(fld: HarmonicField, bundle: ConstructionBundle, M: Minorant,
                           sample_density: int = 3, max_blocks: int = 64) -> CertificationResult:
    """Smallest ``A = 2^j`` (``j <= 40``) with ``u >= M(|z|)`` at every block sample.

    ``u`` is computed once per unit mass and rescaled, which is exact by
    linearity.  Blocks are sampled evenly in index order (all of them when
    there are at most ``max_blocks``).
    """
    ratios: list[tuple[float, tuple[float, float]]] = []
    unit = fld.with_scale(1.0)
    nblocks = 0
    for k in bundle.omega:
        st = bundle.states[k]
        inner, outer = st.depths
        if inner > GUARD_EXPONENT:
            continue
        starts = list(st.R.starts()) if st.R.card <= max_blocks else None
        picks = _pick_blocks(st.R.card, max_blocks)
        for i in picks:
            start = starts[i] if starts is not None else _nth_start(st.R, i)
            nblocks += 1
            for phi, delta in block_samples(start, st.R.length, inner, outer, sample_density):
                u = unit.local(phi, delta).real
                m = math.exp(M.log_at_depth(-math.log(delta)))
                ratios.append((u / m, (float(phi), delta)))
    if not ratios:
        raise DomainError("no blocks within the evaluation guard")
    per_unit, worst = min(ratios, key=lambda t: t[0])
    for j in range(A_MAX_EXPONENT + 1):
        A = float(1 << j)
        if A * per_unit >= 1.0:
            return CertificationResult(A * per_unit, A, len(ratios), nblocks, per_unit, worst)
    raise CertificationFailed(f"u/M stays below 1 up to A = 2^{A_MAX_EXPONENT}", worst)


def _nth_start(fam, i: int) -> Fraction:
    """Start of the ``i``-th arc of a regular family in lexicographic order."""
    pos = fam.offset
    digits = []
    for count, _ in reversed(fam.levels):
        i, d = divmod(i, count)
        digits.append(d)
    for (count, step), d in zip(fam.levels, reversed(digits)):
        pos += d * step
    return pos


# ---------------------------------------------------------------------------
# Blaschke factors


def blaschke_factor(zeta: complex, z: complex) -> complex:
    """``(zeta - z) / (1 - conj(zeta) z) * conj(zeta) / |zeta|``; ``b(z) = z`` at ``zeta = 0``."""
    _check_point(zeta)
    if zeta == 0:
        return complex(z)
    return (zeta - z) / (1.0 - zeta.conjugate() * z) * zeta.conjugate() / abs(zeta)


@dataclass
class BlaschkeData:
    zeros: list[complex]

    def __post_init__(self):
        for z in self.zeros:
            _check_point(z)

    def arcs(self) -> list[tuple[float, float]]:
        """``I_zeta = {|t - theta| <= 1 - r}`` as (lo, hi) radians."""
        out = []
        for z in self.zeros:
            r, th = abs(z), math.atan2(z.imag, z.real)
            out.append((th - (1.0 - r), th + (1.0 - r)))
        return out


def blaschke_product(data: BlaschkeData, z: complex) -> complex:
    out = 1.0 + 0.0j
    for zeta in data.zeros:
        out *= blaschke_factor(zeta, z)
    return out


def log_abs_blaschke(zeta: complex, z: complex) -> float:
    """``log |b_zeta(z)|`` via ``1 - |b|^2 = (1-|zeta|^2)(1-|z|^2)/|1 - conj(zeta) z|^2``."""
    _check_point(z)
    if zeta == 0:
        return math.log(abs(z)) if z else -math.inf
    one_minus = (1.0 - abs(zeta) ** 2) * (1.0 - abs(z) ** 2) / abs(1.0 - zeta.conjugate() * z) ** 2
    return 0.5 * math.log1p(-min(one_minus, 1.0)) if one_minus < 1.0 else -math.inf


@dataclass
class BlaschkeWitness:
    c_witness: float
    evaluated: int
    skipped: int


def local_grid(zeta: complex, n_depth: int = 17, n_angle: int = 33, reach: float = 16.0) -> list[complex]:
    """Grid scaled to ``1 - |zeta|`` around ``zeta``: depths ``d 2^(j/2)``, angles ``+-reach d``."""
    d = 1.0 - abs(zeta)
    th = math.atan2(zeta.imag, zeta.real)
    pts = []
    half = (n_depth - 1) // 2
    for j in range(-half, half + 1):
        dz = d * 2.0 ** (j / 2.0)
        if not 0 < dz < 1:
            continue
        for x in np.linspace(-reach, reach, n_angle):
            pts.append((1.0 - dz) * cmath.exp(1j * (th + x * d)))
    return pts


def check_blaschke_lower_bound(zeta: complex, eps: float, grid: Sequence[complex] | None = None
                               ) -> BlaschkeWitness:
    """``max (-log|b_zeta|) / (P * chi_{I_zeta})`` over grid points with ``|z - zeta| >= eps (1-|z|)``."""
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    _check_point(zeta)
    grid = local_grid(zeta) if grid is None else grid
    (lo, hi), = BlaschkeData([zeta]).arcs()
    worst, used, skipped = 0.0, 0, 0
    for z in grid:
        if abs(z - zeta) < eps * (1.0 - abs(z)):
            skipped += 1
            continue
        used += 1
        worst = max(worst, -log_abs_blaschke(zeta, z) / arc_poisson(lo, hi, z))
    return BlaschkeWitness(worst, used, skipped)


# ---------------------------------------------------------------------------
# Harnack


@dataclass
class HarnackSample:
    """A positive harmonic ``v`` on the disc of radius ``2R`` about ``center``."""

    v: Callable[[complex], float]
    center: complex
    R: float


def atomic_harnack_sample(angles: Sequence[float], masses: Sequence[float], center: complex, R: float
                          ) -> HarnackSample:
    """``v = P * mu`` for a positive atomic measure (angles in radians); ``u = -v``."""
    if abs(center) + 2 * R >= 1:
        raise DomainError("disc of radius 2R must lie inside the unit disc")
    ang, mass = np.asarray(angles, dtype=float), np.asarray(masses, dtype=float)

    def v(z):
        w = np.exp(1j * ang)
        return float(np.sum(mass * (1 - abs(z) ** 2) / np.abs(w - z) ** 2))

    return HarnackSample(v, center, R)


def kernel_harnack_sample(center: complex, R: float, alpha: float = 0.0) -> HarnackSample:
    """Poisson kernel of the disc ``D(center, 2R)`` with pole at angle ``alpha``: the extremal case."""
    pole = center + 2 * R * cmath.exp(1j * alpha)

    def v(z):
        return ((2 * R) ** 2 - abs(z - center) ** 2) / abs(pole - z) ** 2

    return HarnackSample(v, center, R)


def harnack_propagation_check(samples: Sequence[HarnackSample], n_radii: int = 9, n_angles: int = 32) -> float:
    """Worst ``v(z) (2R + d) / (v(c) (2R - d))`` over grids with ``d = |z - c| <= R``."""
    worst = math.inf
    for smp in samples:
        vc = smp.v(smp.center)
        if vc <= 0:
            raise DomainError("Harnack samples must be positive at the centre")
        for d in np.linspace(0.0, smp.R, n_radii):
            for t in np.linspace(0.0, TWO_PI, n_angles, endpoint=False):
                z = smp.center + d * cmath.exp(1j * t)
                ratio = smp.v(z) * (2 * smp.R + d) / (vc * (2 * smp.R - d))
                worst = min(worst, ratio)
    return worst
