"""Nested Cantor-type arc families, blocks, boundary marks and the limiting measure.

Every generation is a regular :class:`ArcFamily`, so all checks below are
structural and exact even when the families hold ``2**100`` arcs.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

import numpy as np

from .dyadic import Arc, ArcFamily, DyadicAngle
from .entropy import LN2, entropy_from_gaps, radial_integral_y
from .errors import DomainError, InfeasibleError, InvariantViolation
from .geometry import DEFAULT_STAR_T, TWO_PI, PolarRectangle
from .minorant import ControlSequences
from .report import VerificationReport


def _pow2(n: int) -> Fraction:
    return Fraction(1, 1 << -n) if n < 0 else Fraction(1 << n)


@dataclass(frozen=True)
class GenerationState:
    """Generation ``k``: the ``J`` arcs and, on growth steps, ``R``, ``I`` and block depths."""

    k: int
    J: ArcFamily
    I: Optional[ArcFamily] = None
    R: Optional[ArcFamily] = None
    depths: Optional[tuple[int, int]] = None   # (inner, outer) exponents of 1 - |z|

    @property
    def refined(self) -> bool:
        return self.R is not None

    @property
    def marks(self) -> Optional[ArcFamily]:
        """Midpoints of the ``I`` arcs, as a family of zero-length arcs."""
        if self.I is None:
            return None
        return ArcFamily(self.I.levels, Fraction(0), self.I.offset + self.I.length / 2)

    def mark_angles(self, limit: int | None = None) -> list[Fraction]:
        return list(self.marks.starts(limit)) if self.I is not None else []

    def blocks(self, limit: int | None = None) -> list[PolarRectangle]:
        if self.R is None:
            return []
        inner, outer = self.depths
        return [PolarRectangle(a, inner, outer) for a in self.R.arcs(limit)]

    def block_count(self) -> int:
        return self.R.card if self.R is not None else 0


def init_generation(seqs: ControlSequences) -> GenerationState:
    """``2^(e+p)`` equispaced arcs of length ``2^-q`` at ``k0``, the first starting at 0."""
    k = seqs.k0
    count = 1 << (seqs.e[k] + seqs.p[k])
    length = _pow2(-seqs.q[k])
    if count * length > 1:
        raise InfeasibleError(f"{count} disjoint arcs of length {length} do not fit on the circle")
    fam = ArcFamily(((count, Fraction(1, count)),), length)
    fam.check_disjoint()
    return GenerationState(k, fam)


def step_generation(prev: GenerationState, seqs: ControlSequences, k: int) -> GenerationState:
    """Generation ``k`` from ``k - 1``: refine on growth steps, copy on plateaus."""
    if prev.k != k - 1:
        raise DomainError("generations must be stepped one at a time")
    if k > seqs.K:
        raise DomainError("k beyond the computed control sequences")
    if seqs.L[k] != k:
        return GenerationState(k, prev.J)
    # feasibility chain: |R| <= |parent|  <=>  m_{L(k-1)} + 1 - m_k <= 0
    if seqs.m[seqs.L[k - 1]] + 1 - seqs.m[k] > 0:
        raise InvariantViolation("block arc does not fit in its parent arc", k)
    P = 1 << seqs.p[k]
    h = _pow2(-seqs.q[k])
    parent = prev.J
    r_len = 2 * P * h
    if r_len != _pow2(seqs.p[k] - seqs.q[k] + 1) or r_len > parent.length:
        raise InvariantViolation("block arc length or containment fails", k)
    R = ArcFamily(parent.levels, r_len, parent.offset)
    J = parent.refine(P, 2 * h, h)
    I = parent.refine(P, 2 * h, h, shift=h)
    return GenerationState(k, J, I, R, (seqs.q[k], seqs.q[k - 1]))


@dataclass
class ConstructionBundle:
    seqs: ControlSequences
    K: int
    states: dict[int, GenerationState]
    omega: list[int]                 # generations whose blocks form Omega
    FN: dict[int, list[int]]         # N -> generations whose marks form F_N
    intervals: dict[int, ArcFamily]  # k -> between-mark intervals of length 2^(1-q_k)

    def blocks(self, limit: int | None = None) -> list[tuple[int, PolarRectangle]]:
        out = []
        for k in self.omega:
            out.extend((k, b) for b in self.states[k].blocks(limit))
        return out

    def marks(self, N: int, limit: int | None = None) -> list[Fraction]:
        """Sorted angles (turns) of ``F_N``."""
        if N not in self.FN:
            raise DomainError(f"F_N is only defined for N in {sorted(self.FN)}")
        pts: list[Fraction] = []
        for k in self.FN[N]:
            pts.extend(self.states[k].mark_angles(limit))
        return sorted(pts)

    def mark_count(self, N: int) -> int:
        return sum(self.states[k].I.card for k in self.FN[N])


def build_bundle(seqs: ControlSequences, K: int | None = None) -> ConstructionBundle:
    K = seqs.K if K is None else K
    if not seqs.k0 <= K <= seqs.K:
        raise DomainError(f"need k0 = {seqs.k0} <= K <= {seqs.K}")
    state = init_generation(seqs)
    states = {state.k: state}
    for k in range(seqs.k0 + 1, K + 1):
        state = step_generation(state, seqs, k)
        states[k] = state
    xz = [k for k in seqs.XZ if seqs.k0 < k <= K]
    FN = {N: [k for k in xz if k <= N] for N in xz}
    intervals = {}
    for k in xz:
        st = states[k]
        P, h = 1 << seqs.p[k], st.I.length
        if P > 1:
            intervals[k] = ArcFamily(st.R.levels + ((P - 1, 2 * h),), 2 * h, st.R.offset + 3 * h / 2)
    return ConstructionBundle(seqs, K, states, xz, FN, intervals)


# ---------------------------------------------------------------------------
# entropy of F_N through gap multisets


@dataclass(frozen=True)
class _Cell:
    first: Fraction
    last: Fraction
    gaps: Counter


def _scaled(c: Counter, n: int) -> Counter:
    return Counter({g: v * n for g, v in c.items()})


def _combine(child: Optional[_Cell], P: int, h: Fraction, with_marks: bool) -> Optional[_Cell]:
    """Content of a parent cell holding ``P`` child cells at spacing ``2h``.

    With marks, a mark sits at ``(2j + 3/2) h`` after child ``j``.
    """
    if with_marks:
        if child is None:
            gaps = Counter({2 * h: P - 1}) if P > 1 else Counter()
            return _Cell(3 * h / 2, (2 * P - Fraction(1, 2)) * h, gaps)
        gaps = _scaled(child.gaps, P)
        gaps[3 * h / 2 - child.last] += P
        if P > 1:
            gaps[h / 2 + child.first] += P - 1
        return _Cell(child.first, (2 * P - Fraction(1, 2)) * h, gaps)
    if child is None:
        return None
    gaps = _scaled(child.gaps, P)
    if P > 1:
        gaps[2 * h + child.first - child.last] += P - 1
    return _Cell(child.first, 2 * (P - 1) * h + child.last, gaps)


def fn_gap_multiset(bundle: ConstructionBundle, N: int) -> Counter:
    """Multiset of arcs complementary to ``F_N`` as ``{length: count}``."""
    if N not in bundle.FN:
        raise DomainError(f"F_N is only defined for N in {sorted(bundle.FN)}")
    seqs = bundle.seqs
    included = set(bundle.FN[N])
    cell: Optional[_Cell] = None
    for k in range(N, seqs.k0, -1):
        if seqs.L[k] != k:
            continue
        cell = _combine(cell, 1 << seqs.p[k], _pow2(-seqs.q[k]), k in included)
    top = bundle.states[seqs.k0].J
    (n0, spacing), = top.levels
    gaps = _scaled(cell.gaps, n0)
    gaps[spacing + cell.first - cell.last] += n0
    return +gaps


def kappa_FN(bundle: ConstructionBundle, N: int, s: float) -> float:
    return entropy_from_gaps(fn_gap_multiset(bundle, N), s)


# ---------------------------------------------------------------------------
# statements


def interval_entropy(bundle: ConstructionBundle, k: int, s: float) -> float:
    """``sum |I| (log 1/|I|)^s`` over the between-mark intervals of generation ``k``."""
    fam = bundle.intervals.get(k)
    if fam is None:
        return 0.0
    return float(fam.total_length) * ((bundle.seqs.q[k] - 1) * LN2) ** s


def block_area(bundle: ConstructionBundle, k: int, alpha: float) -> float:
    """``H_alpha`` of all generation-``k`` blocks (disjointness checked separately)."""
    st = bundle.states[k]
    inner, outer = st.depths
    width = TWO_PI * float(st.R.total_length)
    return width * radial_integral_y(outer * LN2, inner * LN2, alpha)


def star_inclusion_margin(state: GenerationState, t: float = DEFAULT_STAR_T, grid: int = 9) -> float:
    """Smallest ``(1-|z|) / (t dist(z, marks))`` over a grid on one block.

    Blocks are translates of each other together with their own marks, so one
    representative suffices; distance to a subset of the marks bounds the
    distance to ``F_N`` from above.  A value above 1 certifies inclusion.
    """
    inner, outer = state.depths
    h = TWO_PI * float(state.I.length)
    width = TWO_PI * float(state.R.length)
    P = state.R.length / (2 * state.I.length)
    thetas = np.linspace(0.0, width, grid)
    depths = np.exp(-LN2 * np.linspace(outer, inner, grid))
    worst = math.inf
    for th in thetas:
        j = (th / h - 1.5) / 2.0
        cand = sorted({min(max(int(x), 0), int(P) - 1) for x in (math.floor(j), math.ceil(j))})
        marks = np.array([(2 * c + 1.5) * h for c in cand])
        gap = np.abs(marks - th).min()
        r = 1.0 - depths
        dist = np.sqrt(depths ** 2 + 4.0 * r * math.sin(gap / 2.0) ** 2)
        worst = min(worst, float(np.min(depths / (t * dist))))
    return worst


def verify_statements(bundle: ConstructionBundle, s: float, t: float = DEFAULT_STAR_T,
                      report: VerificationReport | None = None, strict: bool = True) -> VerificationReport:
    """Exact statements (disjointness, counts, total length) and comparability ratios."""
    seqs = bundle.seqs
    rep = report or VerificationReport()
    rep.meta.update({"k0": seqs.k0, "K": bundle.K, "s": s, "omega_generations": bundle.omega})

    def exact(name, ok, detail, k):
        rep.check(name, ok, detail)
        if strict and not ok:
            raise InvariantViolation(f"{name}: {detail}", k)

    prev = None
    for k in range(seqs.k0, bundle.K + 1):
        st = bundle.states[k]
        try:
            st.J.check_disjoint()
            ok = True
        except InvariantViolation:
            ok = False
        exact(f"J_disjoint[{k}]", ok, "generation arcs pairwise disjoint", k)
        exact(f"card_J[{k}]", st.J.card == 1 << seqs.e[k + 1], f"2^{seqs.e[k + 1]} arcs", k)
        exact(f"total_length_J[{k}]", st.J.total_length == _pow2(-seqs.m[k]), f"2^-{seqs.m[k]}", k)
        exact(f"J_length[{k}]", st.J.length == _pow2(-seqs.q[seqs.L[k]]), f"2^-{seqs.q[seqs.L[k]]}", k)
        if prev is not None:
            nested = prev.J.contains_family(st.J) if st.refined else prev.J == st.J
            exact(f"J_nested[{k}]", nested, "each arc inside its parent", k)
        if st.refined and prev is not None:
            try:
                st.R.check_disjoint()
                ok = prev.J.length >= st.R.length and st.R.offset == prev.J.offset
            except InvariantViolation:
                ok = False
            exact(f"blocks_disjoint_within[{k}]", ok, "block arcs disjoint and inside parents", k)
        prev = st
    radial = [bundle.states[k].depths for k in bundle.omega]
    ok = all(a[0] <= b[1] for a, b in zip(radial, radial[1:]))
    exact("blocks_disjoint_across", ok, f"radial exponent ranges {radial}", bundle.omega[0] if bundle.omega else 0)

    for k in bundle.omega:
        target = seqs.q[k] ** s * 2.0 ** -seqs.m[k]
        rep.ratio("interval_entropy").add(k, interval_entropy(bundle, k, s) / target)
        rep.ratio("block_area").add(k, block_area(bundle, k, s) / target)
        # one power of log lower: the exponent whose size matches the target
        rep.ratio("block_area_shifted").add(k, block_area(bundle, k, s - 1.0) / target)
        margin = star_inclusion_margin(bundle.states[k], t)
        rep.check(f"star_inclusion[{k}]", margin > 1.0, "blocks inside the star of their marks", margin)
    for N in sorted(bundle.FN):
        rep.ratio("kappa_FN").add(N, kappa_FN(bundle, N, s) / seqs.full_sum(N))
    return rep


# ---------------------------------------------------------------------------
# measure


@dataclass(frozen=True)
class AtomicMeasure:
    atoms: list[tuple[DyadicAngle, Fraction]]

    @property
    def total_mass(self) -> Fraction:
        return sum((m for _, m in self.atoms), Fraction(0))

    def mass_in(self, arc: Arc) -> Fraction:
        lo = arc.start.turns
        return sum((m for a, m in self.atoms if (a.turns - lo) % 1 < arc.length), Fraction(0))


@dataclass(frozen=True)
class CantorMeasure:
    """Equal atoms at the centres of the arcs of a regular family."""

    family: ArcFamily
    atom_mass: Fraction

    @property
    def card(self) -> int:
        return self.family.card

    @property
    def total_mass(self) -> Fraction:
        return self.card * self.atom_mass

    def atom_angles(self, limit: int | None = None) -> Iterator[Fraction]:
        half = self.family.length / 2
        for a in self.family.starts(limit):
            yield a + half

    def to_atomic(self, limit: int | None = 1 << 20) -> AtomicMeasure:
        return AtomicMeasure([(DyadicAngle.from_fraction(a), self.atom_mass) for a in self.atom_angles(limit)])

    def mass_per_cell(self, level: int) -> Fraction:
        """Mass inside one cell of digit level ``level`` (its finer levels)."""
        n = 1
        for count, _ in self.family.levels[level:]:
            n *= count
        return n * self.atom_mass


def build_measure(bundle: ConstructionBundle, K: int | None = None) -> CantorMeasure:
    """Generation-``K`` approximation: ``2^e_{K+1}`` atoms of mass ``2^-e_{K+1}``."""
    K = bundle.K if K is None else K
    seqs = bundle.seqs
    fam = bundle.states[K].J
    mass = _pow2(-seqs.e[K + 1])
    if fam.card * mass != 1:
        raise InvariantViolation("measure does not have unit mass", K)
    return CantorMeasure(fam, mass)


def generation_mass(bundle: ConstructionBundle, measure: CantorMeasure, j: int) -> Fraction:
    """Mass the measure assigns to a single generation-``j`` arc (structural)."""
    depth = len(bundle.states[j].J.levels)
    return measure.mass_per_cell(depth)


# ---------------------------------------------------------------------------
# Whitney grid on the blocks and the Stolz distribution bound

GRID_DEPTH = 0.75
GRID_SPACING = 0.5


@dataclass
class BlockGrid:
    """Point grid in one block, in local coordinates (angle from block start, radians).

    Layer ``j`` sits at ``1 - |z| = 0.75 * 2^-j`` with angular spacing
    ``0.5 * 2^-j``, points centred in their cells.
    """

    width: float
    layers: list[tuple[int, float, float, int]]   # (j, depth, spacing, count)

    @property
    def count(self) -> int:
        return sum(n for *_, n in self.layers)

    def points(self, start: float = 0.0, limit: int = 1 << 22) -> np.ndarray:
        if self.count > limit:
            raise DomainError(f"grid has {self.count} points, above limit {limit}")
        out = [(1.0 - d) * np.exp(1j * (start + (np.arange(n) + 0.5) * dt)) for _, d, dt, n in self.layers]
        return np.concatenate(out) if out else np.zeros(0, dtype=complex)


def block_grid(state: GenerationState) -> BlockGrid:
    inner, outer = state.depths
    width = TWO_PI * float(state.R.length)
    layers = []
    for j in range(outer, inner):
        dt = GRID_SPACING * 2.0 ** -j
        n = int(width / dt)
        if n:
            layers.append((j, GRID_DEPTH * 2.0 ** -j, dt, n))
    return BlockGrid(width, layers)


def grid_points(bundle: ConstructionBundle, limit: int = 1 << 22) -> np.ndarray:
    """All grid points over all blocks (small constructions only)."""
    out = []
    for k in bundle.omega:
        st = bundle.states[k]
        g = block_grid(st)
        if g.count * st.block_count() > limit:
            raise DomainError("grid too large to enumerate")
        for arc in st.R.arcs(limit):
            out.append(g.points(arc.start.radians))
    return np.concatenate(out) if out else np.zeros(0, dtype=complex)


def block_h_lower_bound(grid: BlockGrid, n: int, aperture: float = 2.0, exact_cap: int = 4096) -> float:
    """Lower bound for the measure (radians) inside one block where ``phi >= n``.

    Only the block's own points are counted.  Small layers contribute their
    Stolz arcs exactly; a large layer contributes the guaranteed count
    ``ceil(2h/dt) - 1`` wherever the whole Stolz arc stays inside the layer.
    """
    from .entropy import _halfwidth, weighted_coverage
    lo, hi, w = [], [], []
    for _, d, dt, cnt in grid.layers:
        h = float(_halfwidth(np.array([d]), aperture)[0])
        if cnt <= exact_cap:
            c = (np.arange(cnt) + 0.5) * dt
            lo.append(np.maximum(c - h, 0.0))
            hi.append(np.minimum(c + h, grid.width))
            w.append(np.ones(cnt))
        else:
            guaranteed = max(0, math.ceil(2.0 * h / dt - 1e-9) - 1)
            a, b = h, cnt * dt - h
            if guaranteed and b > a:
                lo.append(np.array([a]))
                hi.append(np.array([b]))
                w.append(np.array([float(guaranteed)]))
    if not lo:
        return 0.0
    return weighted_coverage(np.concatenate(lo), np.concatenate(hi), np.concatenate(w), n)


def h_E_lower_bound(bundle: ConstructionBundle, k: int, n: int | None = None, aperture: float = 2.0) -> float:
    """Lower bound for ``h_E(n)`` (default ``n = 2 q_k``) from generation-``k`` blocks alone."""
    st = bundle.states[k]
    if k not in bundle.omega:
        raise DomainError(f"generation {k} carries no blocks")
    n = 2 * bundle.seqs.q[k] if n is None else n
    per_block = block_h_lower_bound(block_grid(st), n, aperture)
    return st.block_count() * per_block / TWO_PI
