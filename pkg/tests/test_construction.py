from fractions import Fraction

import pytest

from korenblum.construction import (
    block_area,
    build_bundle,
    build_measure,
    fn_gap_multiset,
    generation_mass,
    h_E_lower_bound,
    init_generation,
    interval_entropy,
    kappa_FN,
    star_inclusion_margin,
    step_generation,
    verify_statements,
)
from korenblum.dyadic import explicit_disjoint
from korenblum.entropy import complementary_arcs, h_alpha_area, s_entropy
from korenblum.errors import DomainError, InvariantViolation
from korenblum.minorant import Minorant, control_sequences
from korenblum.report import VerificationReport


@pytest.fixture(scope="module")
def seqs1():
    return control_sequences(Minorant.parse("logpower:1,1"), 1.0, 6, m_floor=1)


@pytest.fixture(scope="module")
def seqs2():
    return control_sequences(Minorant.parse("logpower:1,2"), 2.0, 6, m_floor=1)


def test_initial_generation(seqs1):
    st = init_generation(seqs1)
    assert st.k == 2
    assert st.J.card == 4 and st.J.length == Fraction(1, 16)
    assert st.J.total_length == Fraction(1, 1 << seqs1.m[2])
    assert not st.refined


def test_generation_counts_and_lengths(seqs1):
    b = build_bundle(seqs1, 6)
    assert b.omega == [4, 5, 6]
    assert b.FN == {4: [4], 5: [4, 5], 6: [4, 5, 6]}
    for k, st in b.states.items():
        assert st.J.card == 1 << seqs1.e[k + 1]
        assert st.J.total_length == Fraction(1, 1 << seqs1.m[k])
    assert b.states[5].depths == (32, 16)
    assert b.states[3].J is b.states[2].J   # plateau step copies


def test_explicit_disjointness_small_generation(seqs1):
    b = build_bundle(seqs1, 4)
    st = b.states[4]
    assert explicit_disjoint(list(st.J.starts()), st.J.length)
    assert explicit_disjoint(list(st.R.starts()), st.R.length)
    assert b.states[3].J.contains_family(st.J)


def test_block_area_matches_explicit_sum(seqs1):
    b = build_bundle(seqs1, 4)
    explicit = h_alpha_area(b.states[4].blocks(), 1.0)
    assert block_area(b, 4, 1.0) == pytest.approx(explicit, rel=1e-12)


def test_kappa_FN_matches_explicit(seqs1, seqs2):
    b = build_bundle(seqs1, 4)
    assert kappa_FN(b, 4, 1.0) == pytest.approx(s_entropy(b.marks(4), 1.0).value, rel=1e-12)
    b2 = build_bundle(seqs2, 4)
    for N in (3, 4):
        if b2.mark_count(N) <= 1 << 16:
            assert kappa_FN(b2, N, 2.0) == pytest.approx(s_entropy(b2.marks(N), 2.0).value, rel=1e-12)


def test_gap_multiset_is_exact(seqs2):
    b = build_bundle(seqs2, 4)
    gaps = fn_gap_multiset(b, 3)
    explicit = {}
    for _, length in complementary_arcs(b.marks(3)):
        explicit[length] = explicit.get(length, 0) + 1
    assert dict(gaps) == explicit
    assert sum(c * g for g, c in gaps.items()) == 1


def test_interval_entropy_positive(seqs1):
    b = build_bundle(seqs1, 6)
    values = [interval_entropy(b, k, 1.0) for k in b.omega]
    assert all(v > 0 for v in values)


def test_verify_statements_pass(seqs1, seqs2):
    for seqs, s in ((seqs1, 1.0), (seqs2, 2.0)):
        rep = VerificationReport()
        verify_statements(build_bundle(seqs, 6), s, 0.1, rep)
        assert rep.passed, [c.name for c in rep.failures()]
        assert rep.ratios["kappa_FN"].width < 2.0


def test_star_margin_exceeds_one(seqs1):
    b = build_bundle(seqs1, 5)
    assert star_inclusion_margin(b.states[5]) > 1.0


def test_step_checks(seqs1):
    st = init_generation(seqs1)
    with pytest.raises(DomainError):
        step_generation(st, seqs1, 4)
    bad = control_sequences(Minorant.parse("logpower:1,1"), 1.0, 6, m_floor=1)
    bad.m[4] = bad.m[3]   # fake growth step with no room
    bad.L[4] = 4
    b = build_bundle(seqs1, 3)
    with pytest.raises(InvariantViolation):
        step_generation(b.states[3], bad, 4)


def test_measure_unit_mass_and_nesting(seqs1):
    b = build_bundle(seqs1, 5)
    mu = build_measure(b, 5)
    assert mu.total_mass == 1
    assert generation_mass(b, mu, 4) == Fraction(1, b.states[4].J.card)
    small = build_measure(b, 4).to_atomic()
    assert small.total_mass == 1
    arc = b.states[4].J.arcs(limit=1 << 14)[0]
    assert small.mass_in(arc) == Fraction(1, b.states[4].J.card)


def test_stolz_lower_bound_ratio(seqs1):
    b = build_bundle(seqs1, 5)
    ratios = [h_E_lower_bound(b, k) * 2.0 ** seqs1.m[k] for k in b.omega if k <= 5]
    assert min(ratios) > 1.0
