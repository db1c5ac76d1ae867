"""Tests for free kernels: separable summands, section subgroups and traces."""
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cellcover.errors import ConstructionError, CoverError, InputError, SurjectivityError
from cellcover.services.covers import CoverInstance
from cellcover.services.freekernel import (
    FreeGroupWithBasis,
    _lift,
    search_free_kernel_covers,
    section_subgroup,
    separable_summand,
    trace_free_kernel,
)
from cellcover.services.groups import GeneratorScheme, line, member, zero_group
from cellcover.utils.exactlin import RationalMatrix


def _condition(cert, label):
    return next(c for c in cert.conditions if c.label == label)


# ── Separable summands ────────────────────────────────────────────────────────


def test_summand_single_generator():
    """(2,2,0) in ℤ³ needs the first two basis vectors."""
    split = separable_summand(FreeGroupWithBasis.standard(3), [(2, 2, 0)])
    assert split.support == (0, 1)
    assert split.summand.shape == (3, 2)
    assert split.complement.columns() == [(0, 0, 1)]


def test_summand_two_generators():
    """Supports of several generators are merged."""
    k = FreeGroupWithBasis.standard(4)
    split = separable_summand(k, [(1, 0, 1, 0), (0, 0, 0, 3)])
    assert split.support == (0, 2, 3)
    assert abs(split.basis_change_determinant(k)) == 1


def test_summand_without_generators():
    """No generators give the zero summand."""
    k = FreeGroupWithBasis.standard(2)
    split = separable_summand(k, [])
    assert split.support == ()
    assert split.summand.cols == 0
    assert split.complement.cols == 2
    assert abs(split.basis_change_determinant(k)) == 1


def test_summand_non_member():
    """Elements outside K are rejected."""
    with pytest.raises(InputError):
        separable_summand(FreeGroupWithBasis.standard(3), [("1/2", 0, 0)])


def test_free_basis_requires_free_group(z_half):
    """Divisible groups have no free basis."""
    with pytest.raises(InputError):
        FreeGroupWithBasis.of(z_half)


def test_free_basis_of_sublattice():
    """Coordinates are taken against the group's own basis."""
    k = FreeGroupWithBasis.of(line((2, 0)))
    assert k.coordinates((4, 0)) == (2,)
    with pytest.raises(InputError):
        k.coordinates((2, 0, 0))
    with pytest.raises(InputError):
        k.coordinates((0, 1))


# ── Section subgroups ─────────────────────────────────────────────────────────


def test_section_subgroup_lifts_generators(lattice2):
    """Generators of M lift to elements of G mapping onto them."""
    projection = RationalMatrix.from_rows([[0, 1]])
    lifted = section_subgroup(lattice2, projection, GeneratorScheme.of(1, [((1,), ())]))
    (g,) = lifted.generators
    assert projection.apply(g.vector) == (1,)
    assert member(lattice2, g.vector)


def test_section_subgroup_keeps_divisibility(marked_plane):
    """A 3-divisible generator lifts into the 3-divisible part."""
    projection = RationalMatrix.from_rows([[1, 0]])
    lifted = section_subgroup(marked_plane, projection, GeneratorScheme.of(1, [((1,), (3,))]))
    (g,) = lifted.generators
    assert g.inverted_primes == frozenset({3})
    assert projection.apply(g.vector) == (1,)
    assert member(line(g.vector, {3}), g.vector)
    assert member(marked_plane, tuple(c / 27 for c in g.vector))


def test_section_subgroup_not_onto(lattice2):
    """A zero projection has nothing to lift."""
    with pytest.raises(SurjectivityError):
        section_subgroup(lattice2, RationalMatrix.zero(1, 2), GeneratorScheme.of(1, [((1,), ())]))


def test_section_subgroup_shape_mismatch(lattice2):
    with pytest.raises(InputError):
        section_subgroup(lattice2, RationalMatrix.identity(2), GeneratorScheme.of(1, [((1,), ())]))


def test_lift_raises_past_depth(lattice2):
    """A preimage that exists but lies beyond the search depth is a construction failure."""
    projection = RationalMatrix.from_rows([[0, 1]])
    assert _lift(lattice2, projection, (Fraction(1),))[1] == 1
    with pytest.raises(ConstructionError):
        _lift(lattice2, projection, (Fraction(1),), depth=-1)


# ── Kernel traces ─────────────────────────────────────────────────────────────


def test_trace_trivial_kernel(lattice2):
    """The identity cover has nothing to trace and every check passes."""
    cert = trace_free_kernel(CoverInstance.of(lattice2, zero_group(2)))
    assert cert.passed
    assert _condition(cert, "free_summand_vanishes").witness == {"free_rank": 0}
    assert "decide_cellular" in cert.attachments


def test_trace_rejects_non_cellular(lattice2):
    """ℤ² → ℤ is not a cellular cover."""
    with pytest.raises(CoverError):
        trace_free_kernel(CoverInstance.of(lattice2, line((1, 0))))


def test_trace_rejects_divisible_kernel(marked_plane):
    """The kernel must be free."""
    with pytest.raises(CoverError):
        trace_free_kernel(CoverInstance.of(marked_plane, line((1, 1), {3})))


@pytest.mark.slow
@settings(max_examples=4)
@given(st.integers(0, 2**16))
def test_search_traces_are_consistent(seed):
    """Every cellular cover the seeded search finds traces cleanly."""
    cert = search_free_kernel_covers(seed=seed, trials=6)
    assert _condition(cert, "traces_consistent").status == "pass"
    examined = _condition(cert, "candidates_examined").witness
    assert examined["seed"] == seed
    assert examined["count"] <= 6


@settings(max_examples=5)
@given(st.integers(0, 2**16))
def test_search_is_reproducible(seed):
    """The same seed examines the same candidates."""
    first = search_free_kernel_covers(seed=seed, trials=3, max_rank=2)
    second = search_free_kernel_covers(seed=seed, trials=3, max_rank=2)
    assert first.model_dump() == second.model_dump()
