"""Bounded brute-force searches used to cross-check the exact algorithms."""
from __future__ import annotations

import logging
from fractions import Fraction
from itertools import product
from math import prod
from typing import Hashable, Iterable, Iterator, Sequence

from cellcover.errors import InputError
from cellcover.models.schemas import CrossCheckReport, SearchBounds
from cellcover.services.groups import Generator, GeneratorScheme, LocalizedGroup, from_generators, member
from cellcover.services.homs import HomGroup
from cellcover.utils.exactlin import RationalMatrix, RationalVector, column_echelon, solve_integer, valuation, vector
from cellcover.utils.primes import ensure_primes
from cellcover.utils.serialization import rows_to_strings

logger = logging.getLogger(__name__)


def _expansions(scheme: GeneratorScheme, depth: int) -> list[RationalVector]:
    """``v_i / d_i^k`` for ``k ≤ depth``, with ``d_i`` the product of the inverted primes."""
    out = []
    for g in scheme.generators:
        d = prod(g.inverted_primes)
        for k in range(depth + 1 if d > 1 else 1):
            out.append(tuple(c / d**k for c in g.vector))
    return out


def brute_member(scheme: GeneratorScheme, v: Sequence, bounds: SearchBounds) -> bool:
    """True when ``v`` is a ℤ-combination of generators divided by bounded prime powers.

    False means "not found within the bounds", not "not a member".
    """
    v = vector(v)
    if len(v) != scheme.ambient_rank:
        raise InputError("vector length differs from the ambient rank")
    if not any(v):
        return True
    cols = _expansions(scheme, bounds.max_exponent)
    if not cols:
        return False
    return solve_integer(RationalMatrix.from_columns(cols, scheme.ambient_rank), v) is not None


def candidate_entries(bounds: SearchBounds) -> list[Fraction]:
    primes = ensure_primes(bounds.primes)
    values = {Fraction(a) for a in range(-bounds.max_numerator, bounds.max_numerator + 1)}
    for p in primes:
        for k in range(1, bounds.max_exponent + 1):
            values.update(Fraction(a, p**k) for a in range(-bounds.max_numerator, bounds.max_numerator + 1))
    return sorted(values)


def candidate_matrices(rows: int, cols: int, bounds: SearchBounds) -> Iterator[RationalMatrix]:
    entries = candidate_entries(bounds)
    for flat in product(entries, repeat=rows * cols):
        yield RationalMatrix(rows, cols, tuple(tuple(flat[i * cols:(i + 1) * cols]) for i in range(rows)))


def _vanishes_on_complement(f: RationalMatrix, domain: LocalizedGroup) -> bool:
    return (f @ domain.complement).is_zero()


def _grid_depth(bounds: SearchBounds, p: int) -> int:
    """Divisions by ``p`` that outrun every numerator and denominator of the candidate grid."""
    depth, reach = bounds.max_exponent + 1, p
    while reach <= bounds.max_numerator:
        depth, reach = depth + 1, reach * p
    return depth


def _escape_depth(b: LocalizedGroup, p: int, w: RationalVector) -> int:
    """Past this many divisions by ``p``, ``w`` leaves ``B`` unless it lies in the p-divisible directions."""
    divisible = b.divisible_basis(p)
    lattice = b.base_lattice
    if divisible.cols:
        echelon, pivots = column_echelon(divisible)
        w = tuple(x - y for x, y in zip(w, echelon.apply([w[i] for i in pivots])))
        lattice = next(item.lattice_basis for item in b.locals if item.prime == p)
    heights = [valuation(x, p) for x in w if x]
    floors = [valuation(x, p) for x in lattice.flat() if x]
    if not heights or not floors:
        return 0
    return max(0, min(heights) - min(floors) + 1)


def _sends_into(f: RationalMatrix, gen: Generator, b: LocalizedGroup, bounds: SearchBounds) -> bool:
    w = f.apply(gen.vector)
    if not member(b, w):
        return False
    for p in sorted(gen.inverted_primes):
        depth = max(_grid_depth(bounds, p), _escape_depth(b, p, w))
        if not all(member(b, tuple(x / p**k for x in w)) for k in range(1, depth + 1)):
            return False
    return True


def brute_homs(a_scheme: GeneratorScheme, b: LocalizedGroup, bounds: SearchBounds) -> frozenset[RationalMatrix]:
    """Matrices with bounded entries sending every generator of ``A``, and enough of its prime-power roots, into ``B``."""
    a = from_generators(a_scheme)
    gens = [g for g in a_scheme.generators if any(g.vector)]
    found = set()
    for f in candidate_matrices(b.ambient_rank, a.ambient_rank, bounds):
        if not _vanishes_on_complement(f, a):
            continue
        if all(_sends_into(f, g, b, bounds) for g in gens):
            found.add(f)
    logger.debug("brute force found %d homs", len(found))
    return frozenset(found)


def hom_slice(hom: HomGroup, bounds: SearchBounds) -> frozenset[RationalMatrix]:
    """The homs of ``hom`` whose entries fall in the same bounded grid the brute search uses."""
    rows, cols = hom.shape
    return frozenset(f for f in candidate_matrices(rows, cols, bounds) if hom.contains(f))


def _render(item: Hashable):
    if isinstance(item, RationalMatrix):
        return rows_to_strings(item)
    return str(item)


def cross_check(primary: Iterable[Hashable], oracle: Iterable[Hashable], limit: int = 5) -> CrossCheckReport:
    """Set comparison reporting up to ``limit`` discrepancies each way."""
    primary, oracle = set(primary), set(oracle)
    only_primary = sorted(primary - oracle, key=str)[:limit]
    only_oracle = sorted(oracle - primary, key=str)[:limit]
    return CrossCheckReport(
        agree=primary == oracle,
        primary_count=len(primary),
        oracle_count=len(oracle),
        only_in_primary=[_render(x) for x in only_primary],
        only_in_oracle=[_render(x) for x in only_oracle],
    )
