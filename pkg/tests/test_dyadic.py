from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from korenblum.dyadic import Arc, ArcFamily, DyadicAngle, concatenate, explicit_disjoint
from korenblum.errors import DomainError, InvariantViolation


def test_angle_canonical_form():
    a = DyadicAngle.from_fraction(Fraction(6, 8))
    assert (a.numerator, a.log2_denominator) == (3, 2)
    assert DyadicAngle.from_fraction(Fraction(5, 4)) == DyadicAngle(1, 2)
    assert DyadicAngle.from_fraction(0) == DyadicAngle(0, 0)
    with pytest.raises(DomainError):
        DyadicAngle(2, 3)
    with pytest.raises(DomainError):
        DyadicAngle.from_fraction(Fraction(1, 3))


def test_angle_addition_wraps():
    a = DyadicAngle.from_fraction(Fraction(3, 4)) + DyadicAngle.from_fraction(Fraction(1, 2))
    assert a.turns == Fraction(1, 4)


def test_arc_split_and_concatenate():
    arc = Arc(DyadicAngle.from_fraction(Fraction(1, 4)), 2)
    parts = arc.split(3)
    assert len(parts) == 8
    assert sum(p.length for p in parts) == arc.length
    assert concatenate(parts) == arc
    with pytest.raises(DomainError):
        concatenate([parts[0], parts[2]])


def test_arc_containment_across_zero():
    big = Arc(DyadicAngle.from_fraction(Fraction(7, 8)), 2)   # [7/8, 9/8)
    small = Arc(DyadicAngle.from_fraction(Fraction(1, 16)), 4)
    assert big.contains_arc(small)
    assert big.intersects(small)
    assert not small.contains_arc(big)


def test_family_card_and_disjointness():
    fam = ArcFamily(((4, Fraction(1, 4)), (2, Fraction(1, 16))), Fraction(1, 32))
    assert fam.card == 8
    assert fam.total_length == Fraction(1, 4)
    fam.check_disjoint()
    starts = list(fam.starts())
    assert starts == sorted(starts)
    assert explicit_disjoint(starts, fam.length)


def test_family_overlap_detected():
    bad = ArcFamily(((4, Fraction(1, 8)), (3, Fraction(1, 16))), Fraction(1, 32))
    with pytest.raises(InvariantViolation):
        bad.check_disjoint()
    assert not explicit_disjoint(list(bad.starts()), bad.length)


def test_refinement_nesting():
    parent = ArcFamily(((4, Fraction(1, 4)),), Fraction(1, 8))
    child = parent.refine(2, Fraction(1, 32), Fraction(1, 64), shift=Fraction(1, 64))
    assert parent.contains_family(child)
    too_far = parent.refine(2, Fraction(1, 16), Fraction(1, 16), shift=Fraction(1, 32))
    assert not parent.contains_family(too_far)


def test_enumeration_limit():
    fam = ArcFamily(((1 << 20, Fraction(1, 1 << 20)),), Fraction(1, 1 << 21))
    with pytest.raises(DomainError):
        list(fam.starts(limit=1000))


@given(st.integers(0, 6), st.lists(st.tuples(st.integers(1, 4), st.integers(1, 3)), min_size=1, max_size=3))
def test_structural_matches_explicit(length_exp, raw_levels):
    # build levels from coarse to fine with dyadic steps
    levels, e = [], 0
    for count, gap in raw_levels:
        e += gap
        levels.append((count, Fraction(1, 1 << e)))
    length = Fraction(1, 1 << (e + length_exp))
    fam = ArcFamily(tuple(levels), length)
    try:
        fam.check_disjoint()
        structural = True
    except InvariantViolation:
        structural = False
    if structural:
        assert explicit_disjoint(list(fam.starts()), length)
