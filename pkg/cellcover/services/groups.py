"""Subgroups of ℚⁿ of finite type and their lattice operations.

A group is stored canonically as an HNF base lattice ``N`` together with, for
each exceptional prime ``p``, the reduced echelon basis ``W_p`` of the
p-divisible directions. At ``p`` the group localizes to ``ℚW_p + ℤ_(p)N``; at
every other prime it localizes to ``ℤ_(p)N``. ``N`` is normalised at every
exceptional prime so that two groups are equal exactly when their fields are.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property, reduce
from math import lcm, prod
from typing import Iterable, Mapping, Sequence

from cellcover.errors import ConstructionError, InputError, NotFiniteTypeError, PurityError
from cellcover.utils.exactlin import (
    RationalMatrix,
    RationalVector,
    block_diagonal,
    column_echelon,
    complete_basis,
    functional_lattice,
    hstack,
    inverse,
    is_p_integral,
    lattice_basis,
    left_inverse,
    left_nullspace,
    local_column_basis,
    local_snf,
    nullspace,
    rank,
    vector,
    vstack,
)
from cellcover.utils.primes import denominator_primes, ensure_prime, ensure_primes

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Generator:
    """``vector`` made divisible by every prime in ``inverted_primes``."""
    vector: RationalVector
    inverted_primes: frozenset[int] = frozenset()


@dataclass(frozen=True)
class GeneratorScheme:
    ambient_rank: int
    generators: tuple[Generator, ...] = ()

    @classmethod
    def of(cls, ambient_rank: int, items: Iterable[tuple[Sequence, Iterable[int]]]) -> GeneratorScheme:
        return cls(ambient_rank, tuple(Generator(vector(v), frozenset(pi)) for v, pi in items))


@dataclass(frozen=True)
class LocalData:
    prime: int
    divisible_basis: RationalMatrix
    lattice_basis: RationalMatrix


class Relation(str, Enum):
    EQUAL = "equal"
    PROPER_SUBSET = "proper-subset"
    PROPER_SUPERSET = "proper-superset"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class PrimeReport:
    prime: int
    is_divisible: bool
    is_reduced: bool
    divisible_rank: int


@dataclass(frozen=True)
class LocalizedGroup:
    ambient_rank: int
    base_lattice: RationalMatrix
    divisible: tuple[tuple[int, RationalMatrix], ...] = ()

    @property
    def rank(self) -> int:
        return self.base_lattice.cols

    @property
    def is_zero(self) -> bool:
        return self.rank == 0

    @property
    def exceptional_primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.divisible)

    def divisible_basis(self, p: int) -> RationalMatrix:
        return self._divisible_map.get(p, RationalMatrix.zero(self.ambient_rank, 0))

    @cached_property
    def _divisible_map(self) -> dict[int, RationalMatrix]:
        return dict(self.divisible)

    @cached_property
    def span_basis(self) -> RationalMatrix:
        return column_echelon(self.base_lattice)[0]

    @cached_property
    def coordinates(self) -> RationalMatrix:
        """Left inverse of ``N``; valid on ℚG only."""
        if self.is_zero:
            return RationalMatrix.zero(0, self.ambient_rank)
        return left_inverse(self.base_lattice)

    @cached_property
    def annihilator(self) -> RationalMatrix:
        """Rows cutting out ℚG."""
        return left_nullspace(self.base_lattice) if self.rank else RationalMatrix.identity(self.ambient_rank)

    @cached_property
    def complement(self) -> RationalMatrix:
        return complete_basis(self.base_lattice)

    @cached_property
    def domain_coordinates(self) -> RationalMatrix:
        """First ``r`` rows of ``[N | C]⁻¹``: coordinates along ``N`` vanishing on the complement ``C``."""
        full = inverse(hstack(self.base_lattice, self.complement))
        return full.submatrix(rows=list(range(self.rank)))

    @cached_property
    def identity_projector(self) -> RationalMatrix:
        return self.base_lattice @ self.domain_coordinates

    @cached_property
    def _functionals(self) -> dict[int, RationalMatrix]:
        return {}

    def local_functional(self, p: int) -> RationalMatrix:
        """Rows ``F`` on N-coordinates with ``G_(p) = {x : F x ∈ ℤ_(p)}`` inside ℚG."""
        if p not in self._divisible_map:
            return RationalMatrix.identity(self.rank)
        if p not in self._functionals:
            w = self.coordinates @ self._divisible_map[p]
            annihilator = left_nullspace(w)
            if annihilator.rows == 0:
                self._functionals[p] = RationalMatrix.zero(0, self.rank)
            else:
                snf = local_snf(annihilator, p)
                d_inv = RationalMatrix.diagonal([Fraction(p) ** -e for e in snf.exponents])
                self._functionals[p] = d_inv @ snf.left_transform @ annihilator
        return self._functionals[p]

    def in_span(self, v: Sequence[Fraction]) -> bool:
        return not any(self.annihilator.apply(v))

    @cached_property
    def locals(self) -> tuple[LocalData, ...]:
        out = []
        for p, w in self.divisible:
            _, pivots = column_echelon(w)
            reduced = self.base_lattice - w @ self.base_lattice.submatrix(rows=list(pivots))
            out.append(LocalData(p, w, local_column_basis(reduced, p)))
        return tuple(out)

    def describe(self) -> str:
        primes = ",".join(str(p) for p in self.exceptional_primes) or "none"
        return f"rank {self.rank} in Q^{self.ambient_rank}, exceptional primes {primes}"


def zero_group(n: int) -> LocalizedGroup:
    return LocalizedGroup(n, RationalMatrix.zero(n, 0), ())


def _check_vector(g: LocalizedGroup, v: Sequence) -> RationalVector:
    v = vector(v)
    if len(v) != g.ambient_rank:
        raise InputError(f"vector of length {len(v)} in a group of ambient rank {g.ambient_rank}")
    return v


def _check_ambient(*groups: LocalizedGroup) -> int:
    ranks = {g.ambient_rank for g in groups}
    if len(ranks) != 1:
        raise InputError(f"groups live in different ambient spaces {sorted(ranks)}")
    return ranks.pop()


# ── assembly ─────────────────────────────────────────────────────


def _relocalize(lattice: RationalMatrix, p: int, targets: RationalMatrix) -> RationalMatrix:
    """Replace the ℤ_(p)-span of ``lattice`` by that of ``targets``, leaving other primes alone."""
    if lattice.cols < lattice.rows and not (left_nullspace(lattice) @ targets).is_zero():
        raise InputError(f"local data at {p} leaves the rational span")
    r = lattice.cols
    coords = left_inverse(lattice) @ targets
    snf = local_snf(coords, p)
    if snf.rank != r:
        raise InputError(f"local data at {p} does not span the group")
    top = max(0, *snf.exponents)
    columns = []
    for c in coords.columns():
        unit = lcm(1, *(_prime_free(x.denominator, p) for x in c))
        columns.append([x * unit for x in c])
    generators = hstack(
        RationalMatrix.from_columns(columns, r),
        RationalMatrix.identity(r).scale(Fraction(p) ** top),
    )
    return lattice @ lattice_basis(generators)


def _prime_free(n: int, p: int) -> int:
    while n % p == 0:
        n //= p
    return n


def _assemble(
    n: int,
    base: RationalMatrix,
    local: Mapping[int, tuple[RationalMatrix, RationalMatrix]],
) -> LocalizedGroup:
    """Group with ℤ-generators ``base`` away from ``local`` and ``ℚW + ℤ_(p)L`` at each ``p`` in it."""
    lattice = lattice_basis(base)
    if lattice.cols == 0:
        return zero_group(n)
    divisible = []
    for p in sorted(local):
        w_gens, l_gens = local[p]
        w, pivots = column_echelon(w_gens)
        if w.cols:
            l_gens = l_gens - w @ l_gens.submatrix(rows=list(pivots))
            divisible.append((p, w))
        lattice = _relocalize(lattice, p, hstack(w, l_gens))
    return LocalizedGroup(n, lattice_basis(lattice), tuple(divisible))


def from_functionals(u: int, f0: RationalMatrix, local: Mapping[int, RationalMatrix]) -> LocalizedGroup:
    """``{t ∈ ℚᵘ : f0 t ∈ ℤᵏ, F_p t ∈ ℤ_(p) for p in local}``, the latter replacing the former at p."""
    if u == 0:
        return zero_group(0)
    l0 = functional_lattice(f0)
    data = {}
    for p, fp in local.items():
        d = fp @ l0
        snf = local_snf(d, p)
        v = snf.right_transform
        w = l0 @ v.column_slice(snf.rank)
        scale = RationalMatrix.diagonal([Fraction(p) ** -e for e in snf.exponents])
        lam = l0 @ v.column_slice(0, snf.rank) @ scale
        data[p] = (w, lam)
    return _assemble(u, l0, data)


def _constrained(u: int, systems: Sequence[tuple[LocalizedGroup, RationalMatrix]]) -> LocalizedGroup:
    """``{t : J t ∈ G for each (G, J)}`` with every ``J`` injective into ℚG."""
    if u == 0 or any(g.is_zero for g, _ in systems):
        return zero_group(u)
    f0 = vstack(*(g.coordinates @ j for g, j in systems))
    primes = sorted({p for g, _ in systems for p in g.exceptional_primes})
    local = {p: vstack(*(g.local_functional(p) @ g.coordinates @ j for g, j in systems), cols=u) for p in primes}
    return from_functionals(u, f0, local)


def _restrict(g: LocalizedGroup, y: RationalMatrix) -> LocalizedGroup:
    """``G ∩ ℚY`` for ``Y`` a basis of a subspace of ℚG."""
    if y.cols == 0 or g.is_zero:
        return zero_group(g.ambient_rank)
    return image(_constrained(y.cols, [(g, y)]), y)


# ── constructors ─────────────────────────────────────────────────


def from_generators(scheme: GeneratorScheme) -> LocalizedGroup:
    """``Σ ℤ[1/π_i] v_i``."""
    n = scheme.ambient_rank
    gens = scheme.generators
    for g in gens:
        if len(g.vector) != n:
            raise InputError(f"generator of length {len(g.vector)} in ambient rank {n}")
        ensure_primes(g.inverted_primes)
    base = RationalMatrix.from_columns([g.vector for g in gens], n)
    primes = sorted({p for g in gens for p in g.inverted_primes})
    local = {
        p: (RationalMatrix.from_columns([g.vector for g in gens if p in g.inverted_primes], n), base)
        for p in primes
    }
    return _assemble(n, base, local)


def line(v: Sequence, primes: Iterable[int] = ()) -> LocalizedGroup:
    v = vector(v)
    return from_generators(GeneratorScheme(len(v), (Generator(v, frozenset(primes)),)))


def from_local_form(n: int, base: RationalMatrix, locals_: Sequence[LocalData]) -> LocalizedGroup:
    """Group from user-supplied local data; rebuilt through the canonical assembly."""
    if base.rows != n:
        raise InputError(f"base lattice has {base.rows} rows, expected {n}")
    if rank(base) != base.cols:
        raise InputError("base lattice columns are linearly dependent")
    local = {}
    for item in locals_:
        ensure_prime(item.prime)
        if item.prime in local:
            raise InputError(f"prime {item.prime} listed twice")
        span = hstack(item.divisible_basis, item.lattice_basis, rows=n)
        if rank(hstack(base, span)) != base.cols or rank(span) != base.cols:
            raise InputError(f"local data at {item.prime} does not span the rational span")
        local[item.prime] = (item.divisible_basis, hstack(item.divisible_basis, item.lattice_basis, rows=n))
    return _assemble(n, base, local)


# ── lattice operations ───────────────────────────────────────────


def group_sum(g1: LocalizedGroup, g2: LocalizedGroup) -> LocalizedGroup:
    n = _check_ambient(g1, g2)
    base = hstack(g1.base_lattice, g2.base_lattice)
    primes = set(g1.exceptional_primes) | set(g2.exceptional_primes)
    local = {p: (hstack(g1.divisible_basis(p), g2.divisible_basis(p)), base) for p in primes}
    return _assemble(n, base, local)


def direct_sum(g1: LocalizedGroup, g2: LocalizedGroup) -> LocalizedGroup:
    n = g1.ambient_rank + g2.ambient_rank
    base = block_diagonal(g1.base_lattice, g2.base_lattice)
    primes = set(g1.exceptional_primes) | set(g2.exceptional_primes)
    local = {p: (block_diagonal(g1.divisible_basis(p), g2.divisible_basis(p)), base) for p in primes}
    return _assemble(n, base, local)


def image(g: LocalizedGroup, t: RationalMatrix) -> LocalizedGroup:
    if t.cols != g.ambient_rank:
        raise InputError(f"map with {t.cols} columns applied to ambient rank {g.ambient_rank}")
    base = t @ g.base_lattice
    local = {p: (t @ w, base) for p, w in g.divisible}
    return _assemble(t.rows, base, local)


def localize(g: LocalizedGroup, primes: Iterable[int]) -> LocalizedGroup:
    primes = ensure_primes(primes)
    if g.is_zero or not primes:
        return g
    base = g.base_lattice
    local = {p: (base if p in primes else g.divisible_basis(p), base) for p in primes | set(g.exceptional_primes)}
    return _assemble(g.ambient_rank, base, local)


def intersect(g1: LocalizedGroup, g2: LocalizedGroup) -> LocalizedGroup:
    n = _check_ambient(g1, g2)
    if g1.is_zero or g2.is_zero:
        return zero_group(n)
    y = nullspace(vstack(g1.annihilator, g2.annihilator))
    if y.cols == 0:
        return zero_group(n)
    return image(_constrained(y.cols, [(g1, y), (g2, y)]), y)


def preimage(g: LocalizedGroup, t: RationalMatrix) -> LocalizedGroup:
    if t.rows != g.ambient_rank:
        raise InputError(f"map with {t.rows} rows into ambient rank {g.ambient_rank}")
    if rank(t) < t.cols:
        raise NotFiniteTypeError("preimage under a map with nonzero kernel contains a rational line")
    y = nullspace(g.annihilator @ t)
    if g.is_zero or y.cols == 0:
        return zero_group(t.cols)
    return image(_constrained(y.cols, [(g, t @ y)]), y)


def divisible_core(g: LocalizedGroup, primes: Iterable[int]) -> LocalizedGroup:
    """Largest subgroup divisible by every prime in ``primes``."""
    primes = ensure_primes(primes)
    if not primes:
        return g
    if g.is_zero or not primes <= set(g.exceptional_primes):
        return zero_group(g.ambient_rank)
    cut = vstack(*(left_nullspace(g.divisible_basis(p)) for p in sorted(primes)), cols=g.ambient_rank)
    return _restrict(g, nullspace(cut))


def divisible_part(g: LocalizedGroup, p: int) -> LocalizedGroup:
    return divisible_core(g, {ensure_prime(p)})


def purify(g: LocalizedGroup, k: LocalizedGroup) -> LocalizedGroup:
    """``ℚK ∩ G``."""
    _check_ambient(g, k)
    if not is_subset(k, g):
        raise InputError("purify expects a subgroup")
    return _restrict(g, k.span_basis)


def quotient_by_pure(g: LocalizedGroup, k: LocalizedGroup) -> tuple[LocalizedGroup, RationalMatrix]:
    """``G/K`` realised in ℚ^(n-k) together with the projection used."""
    n = _check_ambient(g, k)
    if not is_subset(k, g):
        raise InputError("kernel is not contained in the group")
    if purify(g, k) != k:
        raise PurityError("kernel is not pure in the group")
    if k.is_zero:
        return g, RationalMatrix.identity(n)
    y = k.span_basis
    q_inv = inverse(hstack(y, complete_basis(y)))
    projection = q_inv.submatrix(rows=list(range(k.rank, n)))
    return image(g, projection), projection


@dataclass(frozen=True)
class AdjunctionQuotient:
    group: LocalizedGroup
    projection: RationalMatrix
    embedding: RationalMatrix  # the composite L → M


def adjoin_by_quotient(l: LocalizedGroup, x: Sequence, q: int) -> AdjunctionQuotient:
    """``(L ⊕ ℤ[1/q]) / ⟨(x, -1)⟩``, isomorphic to ``L + ℤ[1/q]x`` for pure ``x``."""
    ensure_prime(q)
    x = _check_vector(l, x)
    if not member(l, x):
        raise InputError("element does not belong to the group")
    if not is_pure_element(l, x, q):
        raise PurityError(f"element is divisible by {q} in the group")
    n = l.ambient_rank
    total = direct_sum(l, line((1,), {q}))
    kernel = line((*x, Fraction(-1)), ())
    m, projection = quotient_by_pure(total, kernel)
    embedding = projection @ vstack(RationalMatrix.identity(n), RationalMatrix.zero(1, n))
    return AdjunctionQuotient(m, projection, embedding)


def adjoin_localized_line(g: LocalizedGroup, x: Sequence, q: int) -> LocalizedGroup:
    ensure_prime(q)
    x = _check_vector(g, x)
    if not any(x):
        raise InputError("cannot adjoin roots of zero")
    if not member(g, x):
        raise InputError("element does not belong to the group")
    if not is_pure_element(g, x, q):
        logger.warning("adjoining %s-th roots of an element already divisible by %s", q, q)
    return group_sum(g, line(x, {q}))


# ── predicates ───────────────────────────────────────────────────


def member(g: LocalizedGroup, v: Sequence) -> bool:
    v = _check_vector(g, v)
    if not any(v):
        return True
    if g.is_zero or not g.in_span(v):
        return False
    x = g.coordinates.apply(v)
    primes = set(g.exceptional_primes) | denominator_primes(x)
    return all(is_p_integral(g.local_functional(p).apply(x), p) for p in primes)


def is_subset(g1: LocalizedGroup, g2: LocalizedGroup) -> bool:
    _check_ambient(g1, g2)
    if g1.is_zero:
        return True
    if g2.is_zero or not (g2.annihilator @ g1.base_lattice).is_zero():
        return False
    x = g2.coordinates @ g1.base_lattice
    primes = set(g1.exceptional_primes) | set(g2.exceptional_primes) | denominator_primes(x.flat())
    for p in sorted(primes):
        w1 = g1.divisible_basis(p)
        if w1.cols:
            w2 = g2.divisible_basis(p)
            if rank(hstack(w2, w1)) != w2.cols:
                return False
        if not is_p_integral((g2.local_functional(p) @ x).flat(), p):
            return False
    return True


def compare(g1: LocalizedGroup, g2: LocalizedGroup) -> Relation:
    below, above = is_subset(g1, g2), is_subset(g2, g1)
    if below and above:
        return Relation.EQUAL
    if below:
        return Relation.PROPER_SUBSET
    if above:
        return Relation.PROPER_SUPERSET
    return Relation.INCOMPARABLE


def is_pure_element(g: LocalizedGroup, x: Sequence, q: int) -> bool:
    """True when ``x ∈ G`` but ``x/q ∉ G``."""
    ensure_prime(q)
    x = _check_vector(g, x)
    if not member(g, x):
        raise InputError("element does not belong to the group")
    return not member(g, [c / q for c in x])


def divisibility_report(g: LocalizedGroup, primes: Iterable[int]) -> dict[int, PrimeReport]:
    out = {}
    for p in sorted(ensure_primes(primes)):
        d = g.divisible_basis(p).cols
        out[p] = PrimeReport(p, is_divisible=d == g.rank, is_reduced=d == 0, divisible_rank=d)
    return out


def quotient_is_pi_group(a: LocalizedGroup, b: LocalizedGroup, primes: Iterable[int]) -> bool:
    """True when ``A ⊆ B`` and every element of ``B/A`` has order a π-number."""
    return is_subset(a, b) and is_subset(b, localize(a, primes))


# ── generators and witnesses ─────────────────────────────────────


def generator_scheme(g: LocalizedGroup) -> GeneratorScheme:
    """A finite scheme whose ``from_generators`` is ``g``."""
    if g.is_zero:
        return GeneratorScheme(g.ambient_rank)
    full = frozenset(p for p, w in g.divisible if w.cols == g.rank)
    gens = [Generator(c, full) for c in g.base_lattice.columns()]
    for p, w in g.divisible:
        if w.cols < g.rank:
            gens.extend(generator_scheme(divisible_part(g, p)).generators)
    return GeneratorScheme(g.ambient_rank, tuple(dict.fromkeys(gens)))


def find_escape(small: LocalizedGroup, big: LocalizedGroup, depth: int = 256) -> RationalVector | None:
    """An element of ``big`` outside ``small``, or None when ``big ⊆ small``."""
    if is_subset(big, small):
        return None
    for gen in generator_scheme(big).generators:
        if not member(small, gen.vector):
            return gen.vector
        for p in sorted(gen.inverted_primes):
            for k in range(1, depth + 1):
                candidate = tuple(c / p**k for c in gen.vector)
                if not member(small, candidate):
                    return candidate
    raise ConstructionError(f"no element outside the smaller group found within depth {depth}")


def scale_into(g: LocalizedGroup, v: Sequence) -> RationalVector:
    """A nonzero multiple of ``v ∈ ℚG`` lying in ``G``."""
    v = _check_vector(g, v)
    x = g.coordinates.apply(v)
    d = prod(Fraction(c).denominator for c in x) or 1
    return tuple(c * d for c in v)


def sum_all(groups: Iterable[LocalizedGroup], n: int) -> LocalizedGroup:
    return reduce(group_sum, groups, zero_group(n))
