"""Tests for Hom and End groups."""
from fractions import Fraction

import pytest

from cellcover.errors import InputError
from cellcover.services.groups import GeneratorScheme, from_generators, line, member
from cellcover.services.homs import (
    end_group,
    hom_group,
    invariance_witness,
    is_fully_invariant,
    is_hom_zero,
    scalar_ring_recognize,
)
from cellcover.utils.exactlin import RationalMatrix


def test_hom_integers(integers):
    """Hom(ℤ, ℤ) = ℤ."""
    hom = hom_group(integers, integers)
    assert hom.carrier == line((1,))


def test_hom_divisible_to_reduced(z_half, integers):
    """A 2-divisible element must map to a 2-divisible element of ℤ."""
    assert hom_group(z_half, integers).is_zero
    assert is_hom_zero(z_half, integers)
    assert not is_hom_zero(integers, integers)


def test_hom_into_localization(integers, z_half):
    """Hom(ℤ, Z[1/2]) = Z[1/2]."""
    assert hom_group(integers, z_half).carrier == line((1,), {2})


def test_end_rank_one(z_third):
    """End(Z[1/p]) = Z[1/p]·Id."""
    ring = scalar_ring_recognize(end_group(z_third))
    assert ring.scalar and ring.inverted_primes == {3}


def test_end_rigid_plane_is_integers():
    """Three independent divisible lines force scalar integer endomorphisms."""
    g = from_generators(GeneratorScheme.of(2, [((1, 0), {3}), ((0, 1), {5}), ((1, 1), {7})]))
    ends = end_group(g)
    assert ends.rank == 1
    assert ends.contains(RationalMatrix.identity(2))
    ring = scalar_ring_recognize(ends)
    assert ring.scalar and not ring.inverted_primes


def test_end_free_plane(lattice2):
    """End(ℤ²) is all integer matrices."""
    ends = end_group(lattice2)
    assert ends.rank == 4
    assert ends.contains(RationalMatrix.from_rows([[0, 1], [1, 0]]))
    assert not ends.contains(RationalMatrix.from_rows([["1/2", 0], [0, 0]]))
    assert not scalar_ring_recognize(ends).scalar


def test_scalar_ring_of_localized_integers(z_half, integers):
    """Scalar rings ℤ and Z[1/2]."""
    assert scalar_ring_recognize(end_group(integers)).describe() == "Z"
    assert scalar_ring_recognize(end_group(z_half)).describe() == "Z[1/2]"


def test_hom_respects_complement():
    """Homs out of a line in ℚ² vanish on the fixed complement."""
    a = line((1, 1))
    hom = hom_group(a, line((1,)))
    assert hom.rank == 1
    (f, _), = hom.generating_maps
    assert f.apply((1, 1)) in {(1,), (-1,)}
    assert f.apply(tuple(c for c in a.complement.column(0))) == (0,)


def test_hom_generators_map_into_codomain(marked_plane, z_third):
    """Every generating map sends the domain generators into the codomain."""
    hom = hom_group(marked_plane, z_third)
    assert hom.rank == 2
    for f, primes in hom.generating_maps:
        for col in marked_plane.base_lattice.columns():
            assert member(z_third, f.apply(col))


def test_fully_invariant_trivial_cases(lattice2):
    """0 and G are always fully invariant."""
    assert is_fully_invariant(lattice2, line((0, 0)))
    assert is_fully_invariant(lattice2, lattice2)


def test_divisible_part_is_fully_invariant(marked_plane):
    """The 3-divisible part survives every endomorphism."""
    assert is_fully_invariant(marked_plane, line((1, 1), {3}))


def test_fully_invariant_witness(lattice2):
    """A swap moves ℤe1 out of itself."""
    f = invariance_witness(lattice2, line((1, 0)))
    assert f is not None
    assert not member(line((1, 0)), f.apply((1, 0)))


def test_fully_invariant_requires_subgroup(integers):
    """The candidate must lie in the group."""
    with pytest.raises(InputError):
        is_fully_invariant(integers, line((Fraction(1, 2),)))
