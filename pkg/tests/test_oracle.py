"""Tests for the bounded brute-force oracle and the cross-check report."""
from fractions import Fraction

import pytest

from cellcover.errors import InputError
from cellcover.models.schemas import SearchBounds
from cellcover.services.groups import GeneratorScheme, from_generators, member
from cellcover.services.homs import end_group, hom_group
from cellcover.services.oracle import (
    brute_homs,
    brute_member,
    candidate_entries,
    cross_check,
    hom_slice,
)
from cellcover.utils.exactlin import RationalMatrix


def scheme(n, *items):
    return GeneratorScheme.of(n, items)


RIGID = scheme(2, ((1, 0), {7}), ((0, 1), {11}), ((1, 1), {13}))


def test_brute_member_finds_expansions():
    """Bounded prime powers of the generators are found."""
    s = scheme(2, ((1, 0), {3}), ((0, 1), ()))
    bounds = SearchBounds(max_exponent=3)
    assert brute_member(s, ("1/9", 2), bounds)
    assert brute_member(s, (0, 0), bounds)
    assert not brute_member(s, (0, "1/3"), bounds)


def test_brute_member_is_bounded():
    """Denominators beyond the bound are not found even for members."""
    s = scheme(1, ((1,), {2}))
    assert not brute_member(s, ("1/16",), SearchBounds(max_exponent=2))
    assert member(from_generators(s), ("1/16",))


def test_brute_member_rejects_bad_length():
    with pytest.raises(InputError):
        brute_member(scheme(1, ((1,), ())), (1, 2), SearchBounds())


def test_candidate_entries():
    """Entries range over bounded numerators and allowed denominators."""
    entries = candidate_entries(SearchBounds(max_numerator=1, max_exponent=1, primes=[2]))
    assert entries == [Fraction(-1), Fraction(-1, 2), Fraction(0), Fraction(1, 2), Fraction(1)]


def test_brute_homs_integers(integers):
    """Hom(ℤ, ℤ) in the box is every integer up to the bound."""
    found = brute_homs(scheme(1, ((1,), ())), integers, SearchBounds(max_numerator=3, max_exponent=1))
    assert {f.entries[0][0] for f in found} == set(range(-3, 4))


def test_brute_homs_divisible_to_free(integers):
    """Only zero maps ℤ[1/2] to ℤ once 1/4 is tested."""
    found = brute_homs(scheme(1, ((1,), {2})), integers, SearchBounds(max_numerator=3, max_exponent=2))
    assert found == {RationalMatrix.zero(1, 1)}


@pytest.mark.parametrize("bounds", [
    SearchBounds(),
    SearchBounds(max_numerator=8, max_exponent=0),
    SearchBounds(max_numerator=20, max_exponent=1),
    SearchBounds(max_numerator=4, max_exponent=2, primes=[2]),
])
def test_brute_homs_divisible_to_free_any_bounds(integers, z_half, bounds):
    """ℤ[1/2] → ℤ is zero whatever the box, and the exact slice agrees."""
    found = brute_homs(scheme(1, ((1,), {2})), integers, bounds)
    assert found == {RationalMatrix.zero(1, 1)}
    assert cross_check(hom_slice(hom_group(z_half, integers), bounds), found).agree


def test_brute_homs_match_hom_group(integers, z_half):
    """The exact Hom group and the brute search agree on the box."""
    bounds = SearchBounds(max_numerator=3, max_exponent=1)
    report = cross_check(
        hom_slice(hom_group(integers, z_half), bounds),
        brute_homs(scheme(1, ((1,), ())), z_half, bounds),
    )
    assert report.agree
    assert report.primary_count == 7


@pytest.mark.slow
def test_brute_homs_rigid_plane(rigid_plane):
    """Endomorphisms of the rigid plane in the box are n·Id."""
    bounds = SearchBounds(max_numerator=2, max_exponent=1)
    found = brute_homs(RIGID, rigid_plane, bounds)
    assert found == {RationalMatrix.identity(2).scale(n) for n in range(-2, 3)}
    assert cross_check(hom_slice(end_group(rigid_plane), bounds), found).agree


def test_brute_member_is_one_sided(rigid_plane):
    """Anything the oracle finds is a member."""
    bounds = SearchBounds(max_exponent=2)
    for v in ((1, 0), ("1/7", 0), ("1/13", "1/13"), ("1/49", "1/11"), ("1/2", 0), (0, "1/7")):
        if brute_member(RIGID, v, bounds):
            assert member(rigid_plane, v)


def test_cross_check_reports_discrepancies():
    """Disagreements are listed on both sides."""
    report = cross_check({1, 2}, {2, 3})
    assert not report.agree
    assert report.only_in_primary == ["1"]
    assert report.only_in_oracle == ["3"]


def test_cross_check_renders_matrices():
    report = cross_check({RationalMatrix.identity(1).scale(Fraction(1, 2))}, set())
    assert report.only_in_primary == [[["1/2"]]]
