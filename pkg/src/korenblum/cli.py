"""Command-line driver.

Exit codes: 0 pass, 1 usage or parse error, 2 undecided, 3 infeasible,
4 invariant violation, 5 a check or certification failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import platform
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import scipy

from . import svg
from .acceptance import criterion_status, run_acceptance
from .config import RunConfig, load_config
from .construction import build_bundle, build_measure, verify_statements
from .entropy import h_E, phi_E, s_entropy, sigma_t, sigma_tilde
from .errors import CertificationFailed, DomainError, InfeasibleError, InvariantViolation, KorenblumError
from .example import build_worked_example
from .harmonic import GUARD_EXPONENT, HarmonicField, certify_minorant_bound
from .minorant import Verdict, check_invariants, classify_minorant, control_sequences, regularity_check
from .report import VerificationReport

EXIT_OK, EXIT_USAGE, EXIT_UNDECIDED, EXIT_INFEASIBLE, EXIT_INVARIANT, EXIT_FAILED = range(6)
MAX_SVG_BLOCKS = 1 << 16


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fraction(text: str) -> Fraction:
    return Fraction(text.strip())


def _fmt(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _environment() -> dict:
    return {"python": platform.python_version(), "numpy": np.__version__, "scipy": scipy.__version__}


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# commands


def cmd_classify(cfg: RunConfig, args) -> int:
    M = cfg.M
    c = classify_minorant(M, cfg.s, cfg.quad_tolerance, decay_ratio=cfg.decay_ratio, flat_ratio=cfg.flat_ratio)
    reg = regularity_check(M, cfg.s)
    if args.json:
        print(_dump({"minorant": M.describe(), "s": cfg.s, "verdict": c.verdict.value, "note": c.note,
                     "depth_exponents": c.depth_exponents, "partial_integrals": c.partial_integrals,
                     "increments": c.increments, "regularity_flagged": reg.flagged}), end="")
    else:
        print(f"{M.describe()}  s={cfg.s:g}  verdict: {c.verdict.value}")
        print("depth_exponent,partial_integral,increment")
        for e, p, i in zip(c.depth_exponents, c.partial_integrals, c.increments):
            print(f"{e},{p:.12g},{i:.12g}")
        if reg.flagged:
            print("note: regularity profile flagged")
        if c.note:
            print(f"note: {c.note}")
    return EXIT_UNDECIDED if c.verdict == Verdict.UNDECIDED else EXIT_OK


def _sequences_csv(seqs) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "q", "m0", "m1", "m", "e", "p", "L", "flags"])
    for k in range(1, seqs.K + 1):
        w.writerow([k, seqs.q[k], seqs.m0[k], seqs.m1[k], seqs.m[k], seqs.e[k], seqs.p[k], seqs.L[k], seqs.flags(k)])
    return buf.getvalue()


def _family_dict(fam) -> dict:
    return {"levels": [[c, _fmt(st)] for c, st in fam.levels], "length": _fmt(fam.length),
            "offset": _fmt(fam.offset), "card": fam.card}


def _tamper(seqs) -> None:
    """Fault injection for the driver's own tests: break ``m`` after ``k0``."""
    seqs.m[seqs.k0 + 1 if seqs.k0 < seqs.K else seqs.k0] += 3
    check_invariants(seqs)


def cmd_construct(cfg: RunConfig, args) -> int:
    M = cfg.M
    verdict = classify_minorant(M, cfg.s, cfg.quad_tolerance, decay_ratio=cfg.decay_ratio,
                                flat_ratio=cfg.flat_ratio).verdict
    if verdict == Verdict.UNDECIDED:
        print("minorant classification undecided", file=sys.stderr)
        return EXIT_UNDECIDED
    if verdict == Verdict.CONVERGENT:
        raise InfeasibleError("the construction needs a divergent minorant")
    seqs = control_sequences(M, cfg.s, cfg.depth, m_floor=cfg.m_floor)
    if args.inject_fault:
        _tamper(seqs)
    bundle = build_bundle(seqs, cfg.depth)
    rep = VerificationReport()
    rep.meta.update({"config": cfg.echo(), "environment": _environment()})
    verify_statements(bundle, cfg.s, cfg.star_t, rep)
    measure = build_measure(bundle)
    if any(bundle.states[k].depths[0] <= GUARD_EXPONENT for k in bundle.omega):
        res = certify_minorant_bound(HarmonicField(measure), bundle, M, cfg.sample_density, cfg.max_blocks)
        rep.check("certified_minorant_bound", res.min_ratio >= 1.0,
                  f"A = {res.A:g} on {res.samples} samples", res.min_ratio)
        rep.meta["A"] = res.A
    out = Path(cfg.out)
    _write(out / "sequences.csv", _sequences_csv(seqs))
    _write(out / "arcs.json", _dump({str(k): {"J": _family_dict(st.J), "refined": st.refined}
                                     for k, st in sorted(bundle.states.items())}))
    _write(out / "blocks.json", _dump({str(k): {"R": _family_dict(bundle.states[k].R),
                                                "depth_exponents": list(bundle.states[k].depths)}
                                       for k in bundle.omega}))
    _write(out / "measure.json", _dump({"family": _family_dict(measure.family), "atom_mass": _fmt(measure.atom_mass),
                                        "total_mass": _fmt(measure.total_mass), "A": rep.meta.get("A")}))
    _write(out / "report.json", rep.to_json())
    _write(out / "figure.svg", _construction_svg(bundle, cfg))
    _summary(rep, args)
    return EXIT_OK if rep.passed else EXIT_FAILED


def _construction_svg(bundle, cfg: RunConfig) -> str:
    blocks = []
    total = sum(bundle.states[k].block_count() for k in bundle.omega)
    if total <= MAX_SVG_BLOCKS:
        for _, b in bundle.blocks(MAX_SVG_BLOCKS):
            t0, t1 = b.theta_range
            di, do = b.depth_range
            blocks.append((t0, t1, di, do))
    marks, stars = [], []
    if bundle.FN:
        N = min(bundle.FN)
        if bundle.mark_count(N) <= svg.MAX_MARKS:
            marks = [2 * math.pi * float(a) for a in bundle.marks(N)]
            if len(marks) <= 256:
                stars = [marks]
    return svg.render(blocks, marks, stars, cfg.star_t, title=f"{cfg.minorant} s={cfg.s:g} K={cfg.depth}")


def cmd_verify(cfg: RunConfig, args) -> int:
    if args.inject_fault:
        seqs = control_sequences(cfg.M, cfg.s, max(cfg.depth, 3), m_floor=cfg.m_floor)
        _tamper(seqs)
    rep = run_acceptance(cfg)
    rep.meta["environment"] = _environment()
    _write(Path(cfg.out) / "report.json", rep.to_json())
    if args.json:
        print(rep.to_json(), end="")
    else:
        for n, ok in criterion_status(rep).items():
            print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}")
    for c in rep.failures():
        print(f"failed check: {c.name} ({c.detail})", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_FAILED


def cmd_example(cfg: RunConfig, args) -> int:
    if not cfg.s > 1:
        raise DomainError("the worked example needs s > 1")
    ex = build_worked_example(cfg.s, cfg.depth)
    rep = ex.report
    rep.meta["environment"] = _environment()
    out = Path(cfg.out)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "n", "m", "growth", "area_s", "area_1_partial", "area_0_partial", "kappa_s"])
    for i, g in enumerate(ex.generations):
        w.writerow([g.k, g.n, g.m, f"{g.growth(cfg.s):.12g}", f"{g.area(cfg.s):.12g}",
                    f"{rep.ratios['area_1_partial'].values[i]:.12g}",
                    f"{rep.ratios['area_0_partial'].values[i]:.12g}", f"{g.kappa(cfg.s):.12g}"])
    _write(out / "example.csv", buf.getvalue())
    _write(out / "report.json", rep.to_json())
    blocks = []
    for g in ex.generations:
        if g.m <= 64:
            for a in g.intervals.starts():
                t0 = 2 * math.pi * float(a)
                blocks.append((t0, t0 + 2 * math.pi * float(g.interval_length), 2.0 ** -g.n, 2.0 ** (-g.n / 2)))
    _write(out / "figure.svg", svg.render(blocks, title=f"worked example s={cfg.s:g}"))
    _summary(rep, args)
    return EXIT_OK if rep.passed else EXIT_FAILED


def _read_boundary(path: str) -> list[Fraction]:
    pts = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            try:
                pts.append(_fraction(line))
            except ValueError as exc:
                raise DomainError(f"bad boundary angle {line!r}") from exc
    return pts


def _read_points(path: str) -> list[complex]:
    pts = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            try:
                x, y = (float(v) for v in line.replace(" ", "").split(","))
            except ValueError as exc:
                raise DomainError(f"bad point {line!r}; expected 'x,y'") from exc
            pts.append(complex(x, y))
    return pts


def cmd_entropy(cfg: RunConfig, args) -> int:
    F = _read_boundary(args.boundary)
    res = {"kappa_s": s_entropy(F, cfg.s).value, "s": cfg.s, "points_in_F": len(F)}
    if args.points:
        E = _read_points(args.points)
        res.update({"sigma_t": sigma_t(F, E, cfg.star_t), "sigma_tilde": sigma_tilde(F, E, cfg.star_t),
                    "t": cfg.star_t, "points_in_E": len(E)})
    if args.json:
        print(_dump(res), end="")
    else:
        for k in sorted(res):
            print(f"{k},{res[k]}")
    return EXIT_OK


def cmd_h_profile(cfg: RunConfig, args) -> int:
    E = _read_points(args.points)
    rows = [(n, h_E(n, E, cfg.aperture)) for n in range(1, args.n_max + 1)]
    zetas = [2 * math.pi * i / args.grid for i in range(args.grid)]
    phis = [(z, phi_E(z, E, cfg.aperture)) for z in zetas]
    if args.json:
        print(_dump({"aperture": cfg.aperture, "h_E": [[n, v] for n, v in rows],
                     "phi_E": [[z, v] for z, v in phis]}), end="")
    else:
        print("n,h_E")
        for n, v in rows:
            print(f"{n},{v:.12g}")
        print("zeta,phi_E")
        for z, v in phis:
            print(f"{z:.12g},{v}")
    return EXIT_OK


def _summary(rep: VerificationReport, args) -> None:
    if args.json:
        print(rep.to_json(), end="")
        return
    passed = sum(c.passed for c in rep.checks)
    print(f"{passed}/{len(rep.checks)} checks passed")
    for name, series in sorted(rep.ratios.items()):
        lo, hi = series.bracket
        print(f"ratio {name}: [{lo:.6g}, {hi:.6g}]")
    for c in rep.failures():
        print(f"FAILED {c.name}: {c.detail}")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI-style run configuration")
    common.add_argument("--depth", type=int, help="construction depth K")
    common.add_argument("--s", type=float, help="space index s > 0")
    common.add_argument("--minorant", help="FAMILY:a,p or table:r=v,...")
    common.add_argument("--out", help="output directory")
    common.add_argument("--json", action="store_true", help="machine-readable output on stdout")
    common.add_argument("--seed", type=int, help="seed for randomized checks")
    common.add_argument("--aperture", type=float, help="Stolz angle aperture (> 1)")
    common.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)

    p = _Parser(prog="korenblum", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("classify-minorant", parents=[common], help="convergence verdict for a minorant")
    sub.add_parser("construct", parents=[common], help="build the Cantor construction and its artifacts")
    sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    sub.add_parser("example-s", parents=[common], help="the s > 1 worked example")
    e = sub.add_parser("entropy", parents=[common], help="kappa_s and star sums for given sets")
    e.add_argument("--boundary", required=True, help="file with one boundary angle (turns) per line")
    e.add_argument("--points", help="file with one point 'x,y' per line")
    h = sub.add_parser("h-profile", parents=[common], help="Stolz counts phi_E and distribution h_E")
    h.add_argument("--points", required=True, help="file with one point 'x,y' per line")
    h.add_argument("--n-max", type=int, default=10)
    h.add_argument("--grid", type=int, default=64)
    return p


COMMANDS = {
    "classify-minorant": cmd_classify,
    "construct": cmd_construct,
    "verify": cmd_verify,
    "example-s": cmd_example,
    "entropy": cmd_entropy,
    "h-profile": cmd_h_profile,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config).updated(depth=args.depth, s=args.s, minorant=args.minorant,
                                               out=args.out, seed=args.seed, aperture=args.aperture)
        return COMMANDS[args.command](cfg, args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except CertificationFailed as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KorenblumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
