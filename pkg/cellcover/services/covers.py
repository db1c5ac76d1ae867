"""Cellular covers: decision procedure, sufficient criteria and the three-prime construction."""
from __future__ import annotations

import asyncio
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from sympy import nextprime

from cellcover.errors import ConstructionError, InputError
from cellcover.models.schemas import Certificate, Condition, CoverConfig
from cellcover.services.groups import (
    GeneratorScheme,
    LocalizedGroup,
    adjoin_localized_line,
    compare,
    direct_sum,
    divisible_part,
    divisibility_report,
    find_escape,
    from_generators,
    group_sum,
    image,
    intersect,
    is_pure_element,
    is_subset,
    line,
    localize,
    member,
    quotient_by_pure,
    scale_into,
)
from cellcover.services.homs import (
    end_group,
    hom_group,
    invariance_witness,
    scalar_ring_recognize,
)
from cellcover.utils.exactlin import RationalMatrix, kron, nullspace, vector, vstack
from cellcover.utils.primes import ensure_prime, ensure_primes
from cellcover.utils.serialization import rows_to_strings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoverInstance:
    group: LocalizedGroup
    kernel: LocalizedGroup
    quotient: LocalizedGroup
    projection: RationalMatrix

    @classmethod
    def of(cls, g: LocalizedGroup, k: LocalizedGroup) -> CoverInstance:
        m, projection = quotient_by_pure(g, k)
        return cls(g, k, m, projection)


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _map_witness(f: Optional[RationalMatrix]) -> Optional[dict]:
    return None if f is None else {"matrix": rows_to_strings(f)}


def _hom_zero_condition(label: str, a: LocalizedGroup, b: LocalizedGroup) -> Condition:
    hom = hom_group(a, b)
    return Condition(label=label, status=_status(hom.is_zero), witness=_map_witness(hom.witness()))


def _ring_witness(ring) -> dict:
    return {"scalar": ring.scalar, "inverted_primes": sorted(ring.inverted_primes), "ring": ring.describe()}


# ── decision procedure ───────────────────────────────────────────


def decide_cellular(g: LocalizedGroup, k: LocalizedGroup) -> tuple[bool, Certificate]:
    """Decide whether ``G → G/K`` is a cellular cover, i.e. ``End(G) → Hom(G, G/K)`` is bijective."""
    cover = CoverInstance.of(g, k)
    n = g.ambient_rank
    ends = end_group(g)
    targets = hom_group(g, cover.quotient)
    induced = kron(cover.projection, RationalMatrix.identity(n))

    conditions = []
    injective_witness = None
    if not ends.is_zero:
        span = ends.carrier.span_basis
        kernel = nullspace(induced @ span)
        if kernel.cols:
            flat = scale_into(ends.carrier, (span @ kernel.column_slice(0, 1)).column(0))
            injective_witness = {"matrix": rows_to_strings(ends.matrix(flat))}
    conditions.append(Condition(
        label="induced_map_injective",
        status=_status(injective_witness is None),
        witness=injective_witness,
    ))

    pushed = image(ends.carrier, induced)
    escape = find_escape(pushed, targets.carrier)
    conditions.append(Condition(
        label="induced_map_surjective",
        status=_status(escape is None),
        witness=None if escape is None else {"matrix": rows_to_strings(targets.matrix(escape))},
    ))
    certificate = Certificate.from_conditions("decide_cellular", conditions)
    logger.info("cellular cover decision: %s", certificate.verdict)
    return certificate.passed, certificate


# ── sufficient criteria ──────────────────────────────────────────


def certify_cover_criterion(g: LocalizedGroup, k: LocalizedGroup) -> Certificate:
    """``End(G/K) ≅ ℤ``, K fully invariant, ``Hom(K, G/K) = 0`` and ``Hom(G, K) = 0``."""
    cover = CoverInstance.of(g, k)
    ring = scalar_ring_recognize(end_group(cover.quotient))
    conditions = [
        Condition(
            label="quotient_endomorphisms_integral",
            status=_status(ring.scalar and not ring.inverted_primes),
            witness=_ring_witness(ring),
        ),
        Condition(
            label="kernel_fully_invariant",
            status=_status((f := invariance_witness(g, k)) is None),
            witness=_map_witness(f),
        ),
        _hom_zero_condition("hom_kernel_to_quotient_zero", k, cover.quotient),
        _hom_zero_condition("hom_group_to_kernel_zero", g, k),
        Condition(label="group_endomorphisms", status="info", witness=_ring_witness(scalar_ring_recognize(end_group(g)))),
    ]
    return Certificate.from_conditions("cover_criterion", conditions)


def certify_kernel_criterion(
    g: LocalizedGroup,
    k: LocalizedGroup,
    complement: LocalizedGroup,
    ring_primes: Iterable[int],
) -> Certificate:
    """Criterion for ``G = K + M̂`` with ``End(K) = ℤ[1/R]`` and ``End(G/K) = ℤ``."""
    ring_primes = ensure_primes(ring_primes)
    if not (is_subset(k, g) and is_subset(complement, g)):
        raise InputError("kernel and complement must lie in the group")
    if group_sum(k, complement) != g:
        raise InputError("kernel and complement do not generate the group")
    cover = CoverInstance.of(g, k)
    kernel_ring = scalar_ring_recognize(end_group(k))
    quotient_ring = scalar_ring_recognize(end_group(cover.quotient))
    meet = intersect(k, complement)
    conditions = [
        Condition(
            label="kernel_fully_invariant",
            status=_status((f := invariance_witness(g, k)) is None),
            witness=_map_witness(f),
        ),
        Condition(
            label="kernel_endomorphisms",
            status=_status(kernel_ring.scalar and kernel_ring.inverted_primes == ring_primes),
            witness={**_ring_witness(kernel_ring), "expected": sorted(ring_primes)},
        ),
        Condition(
            label="quotient_endomorphisms_integral",
            status=_status(quotient_ring.scalar and not quotient_ring.inverted_primes),
            witness=_ring_witness(quotient_ring),
        ),
        _hom_zero_condition("hom_complement_to_kernel_zero", complement, k),
        _hom_zero_condition("hom_kernel_to_quotient_zero", k, cover.quotient),
        Condition(
            label="kernel_meets_complement",
            status=_status(not meet.is_zero),
            witness={"meet_rank": meet.rank},
        ),
    ]
    return Certificate.from_conditions("kernel_criterion", conditions)


def certify_marked_group(
    l: LocalizedGroup, x: Sequence, q_l: int, q_k: int, q: int
) -> Certificate:
    """Hypotheses on a marked group ``(L, x)`` and properties of ``M = L + ℤ[1/q]x``."""
    for p in (q_l, q_k, q):
        ensure_prime(p)
    if len({q_l, q_k, q}) != 3:
        raise InputError("the three primes must be distinct")
    x = vector(x)
    if not member(l, x) or not any(x):
        raise InputError("marked element must be a nonzero element of the group")
    report = divisibility_report(l, {q_l, q_k, q})
    m = adjoin_localized_line(l, x, q)
    ring = scalar_ring_recognize(end_group(m))
    relation = compare(divisible_part(m, q), line(x, {q}))
    conditions = [
        Condition(label="divisible_at_q_l", status=_status(report[q_l].is_divisible),
                  witness={"divisible_rank": report[q_l].divisible_rank}),
        Condition(label="reduced_at_q_k_and_q", status=_status(report[q_k].is_reduced and report[q].is_reduced),
                  witness={str(q_k): report[q_k].divisible_rank, str(q): report[q].divisible_rank}),
        Condition(label="marked_element_pure", status="info", witness={"pure": is_pure_element(l, x, q)}),
        Condition(
            label="extension_endomorphisms",
            status=_status(ring.scalar and ring.inverted_primes <= {q_l, q}),
            witness=_ring_witness(ring),
        ),
        Condition(label="q_divisible_part_is_marked_line", status="info", witness={"relation": relation.value}),
    ]
    return Certificate.from_conditions("marked_group", conditions)


def report_marked_extension(
    l: LocalizedGroup, x: Sequence, q_l: int, q_k: int, q: int
) -> Certificate:
    """Properties of ``L ⊕_x ℤ[1/q]``; the endomorphism ring is reported, not required."""
    for p in (q_l, q_k, q):
        ensure_prime(p)
    x = vector(x)
    if not member(l, x) or not any(x):
        raise InputError("marked element must be a nonzero element of the group")
    m = adjoin_localized_line(l, x, q)
    reduced = divisibility_report(m, {q_k})[q_k].is_reduced
    conditions = [
        # subgroups of ℚⁿ carry no torsion
        Condition(label="torsion_free", status="pass"),
        Condition(label="reduced_at_q_k", status=_status(reduced)),
        Condition(label="extension_endomorphisms", status="info",
                  witness=_ring_witness(scalar_ring_recognize(end_group(m)))),
    ]
    return Certificate.from_conditions("marked_extension", conditions)


# ── rigid groups and the three-prime construction ────────────────


def rigid_group(k: int, spine_primes: Sequence[int], inverted: Iterable[int] = ()) -> LocalizedGroup:
    """``ℤ[1/π] ⊗ (Σ ℤ[1/p_i] e_i + ℤ[1/p_k](e_1 + … + e_k))`` with endomorphism ring checked."""
    if k < 1:
        raise InputError("rigid groups need rank at least 1")
    spine = [ensure_prime(p) for p in spine_primes]
    inverted = ensure_primes(inverted)
    if len(spine) != k + 1:
        raise InputError(f"rank {k} needs {k + 1} spine primes, got {len(spine)}")
    if len(set(spine)) != len(spine) or set(spine) & inverted:
        raise InputError("spine primes must be distinct and disjoint from the inverted primes")
    items = [(tuple(int(i == j) for i in range(k)), {spine[j]}) for j in range(k)]
    items.append(((1,) * k, {spine[k]}))
    g = localize(from_generators(GeneratorScheme.of(k, items)), inverted)
    expected = inverted if k >= 2 else inverted | set(spine)
    ring = scalar_ring_recognize(end_group(g))
    if not ring.scalar or ring.inverted_primes != expected:
        raise ConstructionError(f"rank {k} group has endomorphism ring {ring.describe()}")
    return g


def _check_config(cfg: CoverConfig) -> None:
    primes = [cfg.q_l, cfg.q_k, cfg.q, *cfg.l_rigidity_primes, *cfg.k_rigidity_primes]
    for p in primes:
        ensure_prime(p)
    if len({cfg.q_l, cfg.q_k, cfg.q}) != 3:
        raise InputError("q_l, q_k and q must be distinct")
    if set(primes[3:]) & {cfg.q_l, cfg.q_k, cfg.q}:
        raise InputError("rigidity primes must avoid q_l, q_k and q")
    if len(cfg.l_rigidity_primes) != 3:
        raise InputError("the marked group needs three rigidity primes")
    for side, spine in (("L", cfg.l_rigidity_primes), ("K", cfg.k_rigidity_primes)):
        if len(set(spine)) != len(spine):
            raise InputError(f"rigidity primes of {side} list a prime twice")
    if shared := set(cfg.l_rigidity_primes) & set(cfg.k_rigidity_primes):
        raise InputError(f"rigidity primes of L and K overlap in {sorted(shared)}")


def kernel_spine(cfg: CoverConfig, k: int) -> list[int]:
    """``k + 1`` spine primes for the rank-``k`` kernel, extending the configured ones."""
    _check_config(cfg)
    taken = {cfg.q_l, cfg.q_k, cfg.q, *cfg.l_rigidity_primes}
    spine = list(cfg.k_rigidity_primes[: k + 1])
    p = max([*taken, *spine])
    while len(spine) < k + 1:
        p = int(nextprime(p))
        if p not in taken:
            spine.append(p)
    return spine


def default_marked_group(cfg: CoverConfig) -> LocalizedGroup:
    return rigid_group(2, cfg.l_rigidity_primes, {cfg.q_l})


def default_kernel(cfg: CoverConfig) -> LocalizedGroup:
    if cfg.kernel_rank == 1:
        return line((1,), {cfg.q_k})
    return rigid_group(cfg.kernel_rank, kernel_spine(cfg, cfg.kernel_rank), {cfg.q_k})


@dataclass(frozen=True)
class ThreePrimeCover:
    cover: CoverInstance
    complement: LocalizedGroup
    certificate: Certificate


def build_three_prime_cover(
    cfg: CoverConfig,
    kernel: Optional[LocalizedGroup] = None,
    marked: Optional[LocalizedGroup] = None,
) -> ThreePrimeCover:
    """``G = (K ⊕ L) + ℤ[1/q](x_K, -x_L)`` with ``K`` its kernel and ``L ⊕_x ℤ[1/q]`` its quotient."""
    _check_config(cfg)
    k_group = kernel if kernel is not None else default_kernel(cfg)
    l_group = marked if marked is not None else default_marked_group(cfg)
    kr, lr = k_group.ambient_rank, l_group.ambient_rank
    x_k = vector(cfg.x_k) if cfg.x_k else tuple(Fraction(int(i == 0)) for i in range(kr))
    x_l = vector(cfg.x_l) if cfg.x_l else tuple(Fraction(int(i == 0)) for i in range(lr))
    if len(x_k) != kr or not any(x_k) or not member(k_group, x_k):
        raise InputError("x_k must be a nonzero element of the kernel group")
    if len(x_l) != lr or not any(x_l) or not member(l_group, x_l):
        raise InputError("x_l must be a nonzero element of the marked group")
    k_report = divisibility_report(k_group, {cfg.q_l, cfg.q_k, cfg.q})
    l_report = divisibility_report(l_group, {cfg.q_l, cfg.q_k, cfg.q})
    if not (k_report[cfg.q_k].is_divisible and k_report[cfg.q_l].is_reduced and k_report[cfg.q].is_reduced):
        raise InputError("kernel group must be q_k-divisible and reduced at q_l and q")
    if not (l_report[cfg.q_l].is_divisible and l_report[cfg.q_k].is_reduced and l_report[cfg.q].is_reduced):
        raise InputError("marked group must be q_l-divisible and reduced at q_k and q")

    first = vstack(RationalMatrix.identity(kr), RationalMatrix.zero(lr, kr))
    second = vstack(RationalMatrix.zero(kr, lr), RationalMatrix.identity(lr))
    k_emb, l_emb = image(k_group, first), image(l_group, second)
    x = (*x_k, *(-c for c in x_l))
    g = adjoin_localized_line(direct_sum(k_group, l_group), x, cfg.q)
    marked_line = line(x, {cfg.q})
    complement = group_sum(l_emb, marked_line)
    cover = CoverInstance.of(g, k_emb)

    meet = intersect(k_emb, complement)
    expected_meet = line((*x_k, *(0,) * lr))
    conditions = [
        Condition(label="kernel_meets_complement_in_marked_element",
                  status=_status(meet == expected_meet), witness={"relation": compare(meet, expected_meet).value}),
        Condition(label="marked_line_meets_quotient_trivially",
                  status=_status(intersect(l_emb, marked_line).is_zero)),
        _hom_zero_condition("hom_kernel_to_quotient_zero", k_emb, cover.quotient),
        Condition(label="kernel_is_q_k_divisible_part",
                  status=_status(divisible_part(g, cfg.q_k) == k_emb)),
        Condition(label="kernel_fully_invariant",
                  status=_status((f := invariance_witness(g, k_emb)) is None), witness=_map_witness(f)),
        _hom_zero_condition("hom_complement_to_kernel_zero", complement, k_emb),
    ]
    _, decision = decide_cellular(g, k_emb)
    criterion = certify_kernel_criterion(g, k_emb, complement, {cfg.q_k})
    certificate = Certificate.from_conditions(
        "three_prime_cover",
        conditions,
        attachments={"decide_cellular": decision, "kernel_criterion": criterion},
    )
    logger.info("three-prime cover with kernel rank %d: %s", k_group.rank, certificate.verdict)
    return ThreePrimeCover(cover, complement, certificate)


# ── kernel independence ──────────────────────────────────────────


async def demo_kernel_independence_async(k_max: int, cfg: CoverConfig) -> Certificate:
    """Build covers with kernels of rank ``1..k_max`` sharing one quotient."""
    if k_max < 1:
        raise InputError("k_max must be at least 1")
    _check_config(cfg)
    marked = default_marked_group(cfg)
    builds = await asyncio.gather(*(
        asyncio.to_thread(build_three_prime_cover, cfg.model_copy(update={"kernel_rank": k}), None, marked)
        for k in range(1, k_max + 1)
    ))
    quotients = {b.cover.quotient for b in builds}
    conditions = [
        Condition(label="common_quotient", status=_status(len(quotients) == 1),
                  witness={"distinct_quotients": len(quotients)}),
    ]
    for k, build in enumerate(builds, start=1):
        conditions.append(Condition(
            label=f"kernel_rank_{k}",
            status=_status(build.cover.kernel.rank == k and build.certificate.passed),
            witness={"kernel_rank": build.cover.kernel.rank},
        ))
    return Certificate.from_conditions(
        "kernel_independence",
        conditions,
        attachments={f"rank_{k}": b.certificate for k, b in enumerate(builds, start=1)},
    )


def demo_kernel_independence(k_max: int, cfg: CoverConfig) -> Certificate:
    return asyncio.run(demo_kernel_independence_async(k_max, cfg))
