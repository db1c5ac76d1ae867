"""Cellular covers with free kernel: separable summands, section subgroups and the kernel trace."""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Iterable, Sequence

from cellcover.errors import ConstructionError, CoverError, InputError, SurjectivityError
from cellcover.models.schemas import Certificate, Condition
from cellcover.services.covers import CoverInstance, decide_cellular
from cellcover.services.groups import (
    Generator,
    GeneratorScheme,
    LocalizedGroup,
    divisible_core,
    from_generators,
    generator_scheme,
    group_sum,
    image,
    intersect,
    member,
    purify,
)
from cellcover.services.homs import is_hom_zero
from cellcover.utils.exactlin import (
    RationalMatrix,
    RationalVector,
    determinant,
    hstack,
    left_inverse,
    solve_integer,
    vector,
)
from cellcover.utils.serialization import vector_to_strings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FreeGroupWithBasis:
    basis: RationalMatrix

    @property
    def ambient_rank(self) -> int:
        return self.basis.rows

    @property
    def rank(self) -> int:
        return self.basis.cols

    @classmethod
    def standard(cls, n: int) -> FreeGroupWithBasis:
        return cls(RationalMatrix.identity(n))

    @classmethod
    def of(cls, g: LocalizedGroup) -> FreeGroupWithBasis:
        if g.exceptional_primes:
            raise InputError("group has divisible directions, so it is not free")
        return cls(g.base_lattice)

    def coordinates(self, v: Sequence) -> RationalVector:
        v = vector(v)
        if len(v) != self.ambient_rank:
            raise InputError(f"vector of length {len(v)} in ambient rank {self.ambient_rank}")
        x = left_inverse(self.basis).apply(v) if self.rank else ()
        back = self.basis.apply(x) if self.rank else tuple(Fraction(0) for _ in v)
        if back != v:
            raise InputError("vector is outside the span of the basis")
        if any(c.denominator != 1 for c in x):
            raise InputError("vector is not in the free group")
        return x

    def as_group(self) -> LocalizedGroup:
        return from_generators(GeneratorScheme.of(self.ambient_rank, [(c, ()) for c in self.basis.columns()]))


@dataclass(frozen=True)
class SummandSplit:
    """``K = K2 ⊕ F`` along basis vectors; ``support`` indexes the columns spanning ``K2``."""
    support: tuple[int, ...]
    summand: RationalMatrix
    complement: RationalMatrix

    def basis_change_determinant(self, k: FreeGroupWithBasis) -> Fraction:
        combined = hstack(self.summand, self.complement)
        return determinant(left_inverse(k.basis) @ combined)


def separable_summand(k: FreeGroupWithBasis, gens: Iterable[Sequence]) -> SummandSplit:
    """Smallest basis summand of ``K`` containing ``gens``."""
    support: set[int] = set()
    for g in gens:
        coords = k.coordinates(g)
        support.update(i for i, c in enumerate(coords) if c)
    inside = tuple(sorted(support))
    outside = [i for i in range(k.rank) if i not in support]
    columns = k.basis.columns()
    return SummandSplit(
        inside,
        RationalMatrix.from_columns([columns[i] for i in inside], k.ambient_rank),
        RationalMatrix.from_columns([columns[i] for i in outside], k.ambient_rank),
    )


def _lift(source: LocalizedGroup, projection: RationalMatrix, target: RationalVector, depth: int = 64) -> RationalVector:
    if not any(target):
        return tuple(Fraction(0) for _ in range(source.ambient_rank))
    if not member(image(source, projection), target):
        raise SurjectivityError(f"{vector_to_strings(target)} has no preimage with the required divisibility")
    gens = generator_scheme(source).generators
    for e in range(depth + 1):
        cols = [tuple(c / prod(g.inverted_primes) ** e for c in g.vector) for g in gens]
        images = projection @ RationalMatrix.from_columns(cols, source.ambient_rank)
        solution = solve_integer(images, target)
        if solution is not None:
            return RationalMatrix.from_columns(cols, source.ambient_rank).apply(solution)
    raise ConstructionError(f"no preimage of {vector_to_strings(target)} found within depth {depth}")


def section_subgroup(g: LocalizedGroup, projection: RationalMatrix, m_scheme: GeneratorScheme) -> GeneratorScheme:
    """Preimages ``g_i`` of the generators of ``M`` with the same divisibility tags."""
    if projection.cols != g.ambient_rank or projection.rows != m_scheme.ambient_rank:
        raise InputError("projection does not match the group and quotient ambients")
    out = []
    for gen in m_scheme.generators:
        source = divisible_core(g, gen.inverted_primes)
        out.append(Generator(_lift(source, projection, gen.vector), gen.inverted_primes))
    return GeneratorScheme(g.ambient_rank, tuple(out))


def trace_free_kernel(cover: CoverInstance) -> Certificate:
    """Follow a cellular cover with free kernel through its splitting ``G = G1 ⊕ K2 ⊕ F``."""
    g, k = cover.group, cover.kernel
    if k.exceptional_primes:
        raise CoverError("kernel is not free")
    kernel = FreeGroupWithBasis.of(k)
    cellular, decision = decide_cellular(g, k)
    if not cellular:
        raise CoverError("not a cellular cover")
    m_scheme = generator_scheme(cover.quotient)
    lifted = section_subgroup(g, cover.projection, m_scheme)
    g1 = from_generators(lifted)
    k1 = intersect(g1, k)
    split = separable_summand(kernel, [gen.vector for gen in generator_scheme(k1).generators])
    k2 = FreeGroupWithBasis(split.summand).as_group()
    f = FreeGroupWithBasis(split.complement).as_group()
    g1_k2 = group_sum(g1, k2)
    conditions = [
        Condition(label="section_maps_onto_quotient", status="pass" if image(g1, cover.projection) == cover.quotient else "fail"),
        Condition(label="decomposition_spans_group", status="pass" if group_sum(g1_k2, f) == g else "fail"),
        Condition(label="decomposition_is_direct", status="pass" if intersect(g1_k2, f).is_zero else "fail"),
        Condition(label="hom_group_to_kernel_zero", status="pass" if is_hom_zero(g, k) else "fail"),
        Condition(label="free_summand_vanishes", status="pass" if split.complement.cols == 0 else "fail",
                  witness={"free_rank": split.complement.cols}),
        Condition(
            label="rank_accounting",
            status="pass" if g.rank <= cover.quotient.rank + k2.rank else "fail",
            witness={"group": g.rank, "quotient": cover.quotient.rank, "separable_summand": k2.rank,
                     "section": g1.rank, "section_meets_kernel": k1.rank},
        ),
    ]
    return Certificate.from_conditions("free_kernel_trace", conditions, attachments={"decide_cellular": decision})


def _random_group(rng: random.Random, max_rank: int, primes: Sequence[int]) -> LocalizedGroup:
    n = rng.randint(1, max_rank)
    items = []
    for _ in range(rng.randint(n, n + 1)):
        v = [rng.randint(-3, 3) for _ in range(n)]
        pi = {p for p in primes if rng.random() < 0.35}
        items.append((v, pi))
    return from_generators(GeneratorScheme.of(n, items))


def search_free_kernel_covers(seed: int, trials: int, max_rank: int = 3, primes: Sequence[int] = (2, 3, 5)) -> Certificate:
    """Randomised search for cellular covers with nonzero free kernel; every hit is traced."""
    rng = random.Random(seed)
    hits: dict[str, Certificate] = {}
    examined = 0
    for trial in range(trials):
        g = _random_group(rng, max_rank, primes)
        if g.rank < 2:
            continue
        v = g.base_lattice.column(rng.randrange(g.rank))
        k = purify(g, from_generators(GeneratorScheme.of(g.ambient_rank, [(v, ())])))
        if k.exceptional_primes:
            continue
        examined += 1
        cover = CoverInstance.of(g, k)
        cellular, _ = decide_cellular(g, k)
        if cellular:
            logger.info("trial %d: cellular cover with free kernel of rank %d", trial, k.rank)
            hits[f"trial_{trial}"] = trace_free_kernel(cover)
    conditions = [
        Condition(label="candidates_examined", status="info", witness={"count": examined, "seed": seed}),
        Condition(label="free_kernel_covers_found", status="info", witness={"count": len(hits)}),
        Condition(
            label="traces_consistent",
            status="pass" if all(c.passed for c in hits.values()) else "fail",
        ),
    ]
    return Certificate.from_conditions("free_kernel_search", conditions, attachments=hits)
