from fractions import Fraction

import pytest

from korenblum.entropy import s_entropy
from korenblum.errors import DomainError
from korenblum.example import choose_sequences, build_worked_example


@pytest.fixture(scope="module")
def ex2():
    return build_worked_example(2.0, 8)


def test_sequences_frozen(ex2):
    assert ex2.scale == 8 and ex2.exponent == 3
    assert [g.n for g in ex2.generations] == [8, 64, 216, 512, 1000, 1728, 2744, 4096]
    assert [g.m for g in ex2.generations][:2] == [1, 2097152]
    assert float(ex2.weight_sum()) == pytest.approx(0.5659277565192744, rel=1e-12)


def test_n_even_and_increasing():
    seq = choose_sequences(2.0, 6, 8)
    ns = [n for n, _ in seq]
    assert all(n % 2 == 0 for n in ns)
    assert ns == sorted(set(ns))


def test_intervals_disjoint_and_fit(ex2):
    end = Fraction(0)
    for g in ex2.generations:
        fam = g.intervals
        fam.check_disjoint()
        assert fam.offset >= end
        end = fam.offset + fam.span_below(0)
    assert end <= 1


def test_report_checks(ex2):
    status = {c.name: c.passed for c in ex2.report.checks}
    assert status["weight_sum_below_one"]
    assert status["growth_increasing"]
    assert status["area_s_increasing"]
    # the literal first-order area sums grow; the zeroth-order sums level off
    assert not status["area_1_bounded"]
    assert ex2.report.meta["area_0_bounded"]


def test_shifted_area_tracks_growth(ex2):
    series = ex2.report.ratios["area_shifted_over_growth"]
    assert series.width < 1.02
    tail = series.values[1:]
    assert max(tail) / min(tail) == pytest.approx(1.0, abs=1e-9)
    assert series.values[-1] == pytest.approx(1.13204, rel=1e-4)


def test_kappa_matches_explicit_for_small_generation(ex2):
    g = ex2.generations[0]
    marks = list(g.mark_family().starts())
    assert g.kappa(2.0) == pytest.approx(s_entropy(marks, 2.0).value, rel=1e-12)


def test_rejects_s_at_most_one():
    with pytest.raises(DomainError):
        build_worked_example(1.0, 8)
    with pytest.raises(DomainError):
        build_worked_example(2.0, 0)
