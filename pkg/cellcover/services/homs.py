"""Hom and End groups as subgroups of matrix space.

A hom ``A → B`` is stored as the unique rational matrix that agrees with it on
ℚA and vanishes on the fixed complement of ℚA. Matrices are flattened row-major.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Sequence

from cellcover.errors import InputError
from cellcover.services.groups import (
    GeneratorScheme,
    LocalizedGroup,
    from_functionals,
    from_generators,
    generator_scheme,
    image,
    is_subset,
    localize,
    member,
    zero_group,
)
from cellcover.utils.exactlin import (
    RationalMatrix,
    RationalVector,
    kron,
    kron_vector,
    nullspace,
    vector,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HomGroup:
    domain: LocalizedGroup
    codomain: LocalizedGroup
    carrier: LocalizedGroup

    @property
    def shape(self) -> tuple[int, int]:
        return self.codomain.ambient_rank, self.domain.ambient_rank

    @property
    def rank(self) -> int:
        return self.carrier.rank

    @property
    def is_zero(self) -> bool:
        return self.carrier.is_zero

    def matrix(self, flat: Sequence) -> RationalMatrix:
        rows, cols = self.shape
        flat = vector(flat)
        return RationalMatrix.from_rows([flat[i * cols:(i + 1) * cols] for i in range(rows)], cols=cols)

    def contains(self, f: RationalMatrix) -> bool:
        if f.shape != self.shape:
            raise InputError(f"matrix of shape {f.shape} for homs of shape {self.shape}")
        return member(self.carrier, f.flat())

    @cached_property
    def generating_maps(self) -> tuple[tuple[RationalMatrix, frozenset[int]], ...]:
        return tuple((self.matrix(g.vector), g.inverted_primes) for g in generator_scheme(self.carrier).generators)

    def witness(self) -> RationalMatrix | None:
        """A nonzero hom, when one exists."""
        return self.generating_maps[0][0] if self.generating_maps else None


@dataclass(frozen=True)
class ScalarRing:
    scalar: bool
    inverted_primes: frozenset[int] = frozenset()

    def describe(self) -> str:
        if not self.scalar:
            return "not a scalar ring"
        if not self.inverted_primes:
            return "Z"
        return "Z[1/" + ",".join(str(p) for p in sorted(self.inverted_primes)) + "]"


def hom_group(a: LocalizedGroup, b: LocalizedGroup) -> HomGroup:
    n_a, n_b = a.ambient_rank, b.ambient_rank
    if a.is_zero or b.is_zero:
        return HomGroup(a, b, zero_group(n_b * n_a))
    r_a, r_b = a.rank, b.rank
    units = [tuple(int(i == j) for i in range(r_a)) for j in range(r_a)]
    equalities: list[RationalVector] = []
    integrality: dict[int, list[RationalVector]] = {}
    for p in sorted(set(a.exceptional_primes) | set(b.exceptional_primes)):
        f = b.local_functional(p)
        integrality[p] = [kron_vector(f.row(i), e) for i in range(f.rows) for e in units]
        for w in a.divisible_basis(p).columns():
            coords = a.coordinates.apply(w)
            equalities.extend(kron_vector(f.row(i), coords) for i in range(f.rows))
    u = nullspace(RationalMatrix.from_rows(equalities, cols=r_b * r_a))
    if u.cols == 0:
        return HomGroup(a, b, zero_group(n_b * n_a))
    local = {p: RationalMatrix.from_rows(rows, cols=r_b * r_a) @ u for p, rows in integrality.items()}
    solutions = from_functionals(u.cols, u, local)
    lift = kron(b.base_lattice, a.domain_coordinates.transpose())
    carrier = image(solutions, lift @ u)
    logger.debug("Hom of rank %d between groups of rank %d and %d", carrier.rank, r_a, r_b)
    return HomGroup(a, b, carrier)


@lru_cache(maxsize=256)
def end_group(a: LocalizedGroup) -> HomGroup:
    return hom_group(a, a)


def is_hom_zero(a: LocalizedGroup, b: LocalizedGroup) -> bool:
    return hom_group(a, b).is_zero


def scalar_ring_recognize(hom: HomGroup) -> ScalarRing:
    """Decide whether an endomorphism group is ``ℤ[1/π]·Id`` and recover ``π``."""
    c = hom.carrier
    identity = hom.domain.identity_projector.flat() if not hom.domain.is_zero else ()
    if c.rank != 1 or not member(c, identity):
        return ScalarRing(False)
    primes = frozenset(c.exceptional_primes)
    expected = from_generators(GeneratorScheme.of(c.ambient_rank, [(identity, primes)]))
    if c != expected:
        return ScalarRing(False)
    return ScalarRing(True, primes)


def invariance_witness(g: LocalizedGroup, k: LocalizedGroup) -> RationalMatrix | None:
    """An endomorphism of ``g`` moving ``k`` outside itself, or None."""
    if not is_subset(k, g):
        raise InputError("subgroup is not contained in the group")
    for f, primes in end_group(g).generating_maps:
        source = localize(k, primes) if primes else k
        if not is_subset(image(source, f), k):
            return f
    return None


def is_fully_invariant(g: LocalizedGroup, k: LocalizedGroup) -> bool:
    return invariance_witness(g, k) is None
