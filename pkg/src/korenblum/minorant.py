"""Minorants, the convergence classifier and the integer control sequences.

Throughout, a point at distance ``t`` from the circle is described by
``y = log(1/t)``; minorants are evaluated through ``log M(1 - e^{-y})`` so
that depths like ``t = 2**-(2**20)`` never underflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from scipy import integrate

from .errors import DomainError, InfeasibleError, InvariantViolation

LN2 = math.log(2.0)
FAMILIES = ("power", "logpower", "table")


@dataclass(frozen=True)
class Minorant:
    """A non-decreasing positive function ``M`` on ``(0, 1)``.

    ``power``:    ``M(r) = a (1-r)^-p``
    ``logpower``: ``M(r) = a (log 1/(1-r))^p``
    ``table``:    samples ``(r_i, M_i)``, ``log M`` linear in ``log 1/(1-r)``
    """

    family: str
    a: float = 1.0
    p: float = 1.0
    samples: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown minorant family {self.family!r}")
        if self.family == "table":
            if len(self.samples) < 2:
                raise DomainError("table minorant needs at least two samples")
            rs = [r for r, _ in self.samples]
            vs = [v for _, v in self.samples]
            if any(not 0 < r < 1 for r in rs) or any(b <= a for a, b in zip(rs, rs[1:])):
                raise DomainError("table radii must be strictly increasing in (0, 1)")
            if any(v <= 0 for v in vs) or any(b < a for a, b in zip(vs, vs[1:])):
                raise DomainError("table values must be positive and non-decreasing")
        elif self.a <= 0 or self.p <= 0:
            raise DomainError("minorant parameters a, p must be positive")

    @classmethod
    def parse(cls, text: str) -> "Minorant":
        """Parse ``family:a,p`` or ``table:r1=v1,r2=v2,...``."""
        try:
            family, _, params = text.strip().partition(":")
            family = family.strip().lower()
            if family == "table":
                pairs = [item.split("=") for item in params.split(",") if item.strip()]
                return cls("table", samples=tuple((float(r), float(v)) for r, v in pairs))
            a, p = (float(x) for x in params.split(","))
        except (ValueError, TypeError) as exc:
            raise DomainError(f"cannot parse minorant {text!r}") from exc
        return cls(family, a, p)

    def describe(self) -> str:
        if self.family == "table":
            return "table:" + ",".join(f"{r!r}={v!r}" for r, v in self.samples)
        return f"{self.family}:{self.a!r},{self.p!r}"

    def scaled(self, c: float) -> "Minorant":
        """The minorant ``c * M``."""
        if self.family == "table":
            return Minorant("table", samples=tuple((r, c * v) for r, v in self.samples))
        return Minorant(self.family, self.a * c, self.p)

    @property
    def y_range(self) -> tuple[float, float]:
        if self.family == "table":
            return -math.log1p(-self.samples[0][0]), -math.log1p(-self.samples[-1][0])
        return 0.0, math.inf

    def log_at_depth(self, y: float) -> float:
        """``log M(1 - e^{-y})``."""
        if self.family == "power":
            return math.log(self.a) + self.p * y
        if self.family == "logpower":
            if y <= 0:
                raise DomainError("logpower minorant needs r > 0")
            return math.log(self.a) + self.p * math.log(y)
        lo, hi = self.y_range
        if not lo <= y <= hi:
            raise DomainError(f"depth y={y} outside table range [{lo}, {hi}]")
        ys = [-math.log1p(-r) for r, _ in self.samples]
        logs = [math.log(v) for _, v in self.samples]
        return float(np.interp(y, ys, logs))

    def __call__(self, r: float) -> float:
        return minorant_eval(self, r)

    def T(self, t: float) -> float:
        """``T(t) = M(1 - t)``."""
        return minorant_eval(self, 1.0 - t)


def minorant_eval(M: Minorant, radius: float) -> float:
    if not 0.0 < radius < 1.0:
        raise DomainError(f"radius {radius} outside (0, 1)")
    return math.exp(M.log_at_depth(-math.log1p(-radius)))


def beta_of(s: float) -> float:
    return max(0.0, s - 1.0)


# ---------------------------------------------------------------------------
# convergence classifier


class Verdict(str, Enum):
    CONVERGENT = "Convergent"
    DIVERGENT = "Divergent"
    UNDECIDED = "Undecided"


@dataclass
class Classification:
    verdict: Verdict
    s: float
    depth_exponents: list[int]       # delta_j = 2**-depth_exponents[j]
    partial_integrals: list[float]   # integral from delta_j to 1/2
    increments: list[float]
    ratios: list[float]
    note: str = ""


def _integrand(M: Minorant, beta: float):
    def f(y):
        return y ** beta * math.exp(-M.log_at_depth(y))
    return f


def classify_minorant(M: Minorant, s: float, quad_tolerance: float = 1e-10, j_max: int = 20,
                      decay_ratio: float = 0.8, flat_ratio: float = 0.97) -> Classification:
    """Numerical evidence for finiteness of ``int_0 t^-1 (log 1/t)^beta dt / M(1-t)``.

    The integral is taken over doubly dyadic blocks ``2^-(2^(j+1)) < t < 2^-(2^j)``,
    i.e. ``y in [2^j log 2, 2^(j+1) log 2]``.  Tail increments that shrink by a
    fixed factor mean Convergent; increments that stay bounded below mean
    Divergent; anything else is Undecided.
    """
    beta = beta_of(s)
    f = _integrand(M, beta)
    lo_y, hi_y = M.y_range
    increments: list[float] = []
    exps: list[int] = []
    partial: list[float] = []
    total = 0.0
    note = ""
    for j in range(j_max):
        y0, y1 = (1 << j) * LN2, (1 << (j + 1)) * LN2
        if y0 < lo_y or y1 > hi_y:
            note = "table range exhausted"
            break
        try:
            val, err = integrate.quad(f, y0, y1, epsrel=1e-12, epsabs=0.0, limit=200)
        except (OverflowError, ValueError, ZeroDivisionError) as exc:
            note = f"quadrature failure: {exc}"
            break
        if not math.isfinite(val) or err > 1e-6 * max(abs(val), 1e-300) + 1e-300:
            note = "quadrature failure: inaccurate block"
            break
        increments.append(val)
        total += val
        exps.append(1 << (j + 1))
        partial.append(total)
    ratios = [b / a if a > 0 else 0.0 for a, b in zip(increments, increments[1:])]
    verdict = Verdict.UNDECIDED
    if len(increments) >= 6 and not note.startswith("quadrature"):
        tail = ratios[len(ratios) // 2:]
        tail_inc = increments[len(increments) // 2:]
        if all(r <= decay_ratio for r in tail) or all(v <= quad_tolerance * max(total, 1.0) for v in tail_inc):
            verdict = Verdict.CONVERGENT
        elif all(r >= flat_ratio for r in tail):
            verdict = Verdict.DIVERGENT
    return Classification(verdict, s, exps, partial, increments, ratios, note)


def logpower_partial_integral(a: float, p: float, s: float, y_hi: float, y_lo: float = LN2) -> float:
    """Closed form of ``int_{y_lo}^{y_hi} y^beta / (a y^p) dy``."""
    e = beta_of(s) - p
    if abs(e + 1.0) < 1e-15:
        return (math.log(y_hi) - math.log(y_lo)) / a
    return (y_hi ** (e + 1.0) - y_lo ** (e + 1.0)) / ((e + 1.0) * a)


@dataclass
class RegularityProfile:
    depths: list[float]   # y = log 1/t, increasing
    ratios: list[float]
    flagged: bool


def regularity_check(M: Minorant, s: float, t_grid: Sequence[float] | None = None) -> RegularityProfile:
    """Profile of ``(log 1/t)^(beta+1) / M(1-t)`` along a decreasing ``t`` grid.

    The flag is raised when the tail of the profile is not non-increasing or
    has not dropped below a tenth of its starting value.
    """
    beta = beta_of(s)
    if t_grid is None:
        lo, hi = M.y_range
        ys = [y for y in ((1 << j) * LN2 for j in range(1, 21)) if lo <= y <= hi]
        if len(ys) < 2:
            return RegularityProfile(ys, [], True)
    else:
        ys = [-math.log(t) for t in t_grid]
        if any(b <= a for a, b in zip(ys, ys[1:])):
            raise DomainError("t grid must be strictly decreasing")
    logs = [(beta + 1.0) * math.log(y) - M.log_at_depth(y) for y in ys]
    ratios = [math.exp(v) for v in logs]
    tail = logs[len(logs) // 2:]
    monotone = all(b <= a + 1e-12 for a, b in zip(tail, tail[1:]))
    flagged = not (monotone and tail[-1] < tail[0] - math.log(10.0))
    return RegularityProfile(ys, ratios, flagged)


# ---------------------------------------------------------------------------
# control sequences


@dataclass
class ControlSequences:
    """Integer bookkeeping ``q, m0, m1, m, e, p, L`` indexed by ``k`` (index 0 unused)."""

    s: float
    K: int
    sigma: int
    q: list[int]
    m0: list[int]
    m1: list[int]
    m: list[int]
    e: list[int]
    p: list[int]
    L: list[int]
    W: list[int]
    Z: list[int]
    X: list[int]
    Y: list[int]
    k0: int
    m_floor: int
    runs: list[tuple[int, int]] = field(default_factory=list)

    def full_sum(self, N: int) -> float:
        """``sum_{k <= N} q_k^s 2^-m_k``."""
        return math.fsum(self.q[k] ** self.s * 2.0 ** -self.m[k] for k in range(1, N + 1))

    def restricted_sum(self, N: int) -> float:
        """Sum over ``k in X cap Z cap [1, N]``."""
        xz = set(self.X) & set(self.Z)
        return math.fsum(self.q[k] ** self.s * 2.0 ** -self.m[k] for k in range(1, N + 1) if k in xz)

    @property
    def XZ(self) -> list[int]:
        z = set(self.Z)
        return [k for k in self.X if k in z]

    def sum_profile(self) -> list[dict]:
        rows = []
        for N in range(self.k0, self.K + 1):
            full, restricted = self.full_sum(N), self.restricted_sum(N)
            rows.append({"N": N, "S": full, "S_XZ": restricted,
                         "ratio": full / restricted if restricted > 0 else math.inf})
        return rows

    def flags(self, k: int) -> str:
        out = ""
        for name, members in (("W", self.W), ("Z", self.Z), ("X", self.X), ("Y", self.Y)):
            if k in members:
                out += name
        return out


def _floor_log2(x: float) -> int:
    n = round(x)
    if abs(x - n) < 1e-9:
        return int(n)
    return math.floor(x)


def discretize(M: Minorant, q: int) -> int:
    """``max(1, floor(log2 M(1 - 2^-q)))``."""
    return max(1, _floor_log2(M.log_at_depth(q * LN2) / LN2))


def control_sequences(M: Minorant, s: float, K: int, m_floor: int = 10) -> ControlSequences:
    """Run the integer recursion up to ``K`` and locate the starting index ``k0``.

    ``k0`` is the least ``k >= 2`` with ``m_k > m_floor``, ``L(k) = k`` and
    ``q_k - p_k - e_k = m_k``.
    """
    if K < 2:
        raise DomainError("K must be at least 2")
    if s <= 0:
        raise DomainError("s must be positive")
    sigma = max(1, math.floor(s + 1.0))
    q = [0] + [1 << k for k in range(1, K + 2)]
    m0 = [0, 1] + [discretize(M, q[k]) for k in range(2, K + 2)]
    W = [k for k in range(2, K + 1) if m0[k - 1] == m0[k] < m0[k + 1]]
    wset = set(W)
    m1 = [0] + [m0[k] + 1 if k in wset else m0[k] for k in range(1, K + 1)]
    m = [0, 1]
    for k in range(2, K + 1):
        m.append(min(m1[k], 2 * m[k - 1], m[k - 1] + sigma))
    Z = [k for k in range(1, K + 1) if m[k] == m0[k]]
    e = [0] * (K + 2)
    L = [0] * (K + 1)
    L[1] = 1
    for k in range(2, K + 1):
        if m[k] > m[k - 1]:
            L[k] = k
            e[k + 1] = q[k] - m[k]
        else:
            L[k] = L[k - 1]
            e[k + 1] = e[k]
    p = [0] + [e[k + 1] - e[k] for k in range(1, K + 1)]
    k0 = None
    for k in range(2, K + 1):
        if m[k] > m_floor and L[k] == k and q[k] - p[k] - e[k] == m[k]:
            k0 = k
            break
    if k0 is None:
        raise InfeasibleError(f"no starting index k0 <= {K} with m_k0 > {m_floor}")
    X = [k for k in range(k0, K + 1) if L[k] == k]
    Y = [k for k in range(k0, K + 1) if L[k] < k]
    seqs = ControlSequences(s, K, sigma, q[:K + 1], m0[:K + 1], m1, m, e, p, L, W, Z, X, Y, k0, m_floor)
    check_invariants(seqs)
    seqs.runs = y_run_decomposition(seqs)
    return seqs


def check_invariants(seqs: ControlSequences) -> None:
    """Assert every listed relation of the control sequences; raise with the index."""
    K, q, m0, m1, m, e, p, L = seqs.K, seqs.q, seqs.m0, seqs.m1, seqs.m, seqs.e, seqs.p, seqs.L
    wset, zset = set(seqs.W), set(seqs.Z)
    if m0[1] != 1 or m[1] != 1 or L[1] != 1 or e[1] != 0 or e[2] != 0:
        raise InvariantViolation("initial values broken", 1)
    for k in range(1, K + 1):
        if q[k] != 1 << k:
            raise InvariantViolation("q_k != 2^k", k)
        if m1[k] != m0[k] + (1 if k in wset else 0):
            raise InvariantViolation("m1 does not follow W", k)
        if k > 1:
            if m[k] != min(m1[k], 2 * m[k - 1], m[k - 1] + seqs.sigma):
                raise InvariantViolation("m_k != min(m1_k, 2 m_{k-1}, m_{k-1} + sigma)", k)
            if m[k] < m[k - 1]:
                raise InvariantViolation("m not non-decreasing", k)
            grew = m[k] > m[k - 1]
            if grew and (L[k] != k or e[k + 1] != q[k] - m[k]):
                raise InvariantViolation("growth step bookkeeping broken", k)
            if not grew and (L[k] != L[k - 1] or e[k + 1] != e[k]):
                raise InvariantViolation("plateau step bookkeeping broken", k)
        if (m[k] == m0[k]) != (k in zset):
            raise InvariantViolation("Z membership wrong", k)
        if p[k] != e[k + 1] - e[k] or p[k] < 0 or e[k] < 0 or e[k + 1] < 0:
            raise InvariantViolation("p_k = e_{k+1} - e_k >= 0 fails", k)
        if e[L[k] + 1] != e[k + 1] or m[L[k]] != m[k]:
            raise InvariantViolation("e_{L(k)+1} = e_{k+1}, m_{L(k)} = m_k fails", k)
    for k in seqs.X:
        if q[k] != p[k] + e[k] + m[k]:
            raise InvariantViolation("q_k = p_k + e_k + m_k fails on X", k)
    if not set(seqs.Y) <= zset:
        raise InvariantViolation("Y is not contained in Z", min(set(seqs.Y) - zset))
    k0 = seqs.k0
    if not (m[k0] > seqs.m_floor and L[k0] == k0 and q[k0] - p[k0] - e[k0] == m[k0]):
        raise InvariantViolation("k0 conditions fail", k0)


def y_run_decomposition(seqs: ControlSequences, require_w: bool = False) -> list[tuple[int, int]]:
    """Maximal runs ``[v_l, w_l]`` composing ``Y``.

    For each run followed by a computed index, asserts ``w_l + 1`` lies in
    ``X cap Z``, ``m`` jumps by exactly one there and is constant on the run.
    Membership of ``w_l + 1`` in ``W`` is only enforced with ``require_w``.
    """
    runs: list[tuple[int, int]] = []
    for k in seqs.Y:
        if runs and runs[-1][1] == k - 1:
            runs[-1] = (runs[-1][0], k)
        else:
            runs.append((k, k))
    xset, zset, wset = set(seqs.X), set(seqs.Z), set(seqs.W)
    m = seqs.m
    for v, w in runs:
        if any(m[k] != m[w] for k in range(v, w + 1)):
            raise InvariantViolation("m not constant on Y run", v)
        if w >= seqs.K:
            continue
        nxt = w + 1
        if nxt not in xset or nxt not in zset:
            raise InvariantViolation("run successor not in X cap Z", nxt)
        if m[nxt] != m[w] + 1:
            raise InvariantViolation("m does not step by one after run", nxt)
        if require_w and nxt not in wset:
            raise InvariantViolation("run successor not in W", nxt)
    return runs


def run_successors_outside_w(seqs: ControlSequences) -> list[int]:
    """Successors ``w_l + 1`` of Y runs that are not in ``W`` (diagnostic)."""
    wset = set(seqs.W)
    return [w + 1 for _, w in seqs.runs if w < seqs.K and w + 1 not in wset]
