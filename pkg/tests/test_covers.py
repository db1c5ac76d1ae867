"""Tests for the cellularity decision, criteria certificates and the three-prime construction."""
import pytest

from cellcover.errors import ConstructionError, InputError, PurityError
from cellcover.models.schemas import CoverConfig
from cellcover.services.covers import (
    build_three_prime_cover,
    certify_cover_criterion,
    certify_kernel_criterion,
    certify_marked_group,
    decide_cellular,
    default_kernel,
    demo_kernel_independence,
    demo_kernel_independence_async,
    kernel_spine,
    report_marked_extension,
    rigid_group,
)
from cellcover.services.groups import (
    Relation,
    direct_sum,
    line,
    member,
    zero_group,
)
from cellcover.services.homs import ScalarRing, end_group, scalar_ring_recognize
from cellcover.utils.serialization import parse_matrix_rows


def _condition(cert, label):
    return next(c for c in cert.conditions if c.label == label)


def _matrix(witness):
    return parse_matrix_rows(";".join(",".join(row) for row in witness["matrix"]))


# ── Decision procedure ────────────────────────────────────────────────────────


def test_trivial_kernel_is_cellular(rigid_plane, lattice2):
    """Every group covers itself."""
    for g in (rigid_plane, lattice2):
        ok, cert = decide_cellular(g, zero_group(2))
        assert ok and cert.passed


def test_split_kernel_is_not_cellular(lattice2):
    """ℤ² → ℤ kills matrices with zero second row."""
    ok, cert = decide_cellular(lattice2, line((1, 0)))
    assert not ok
    injective = _condition(cert, "induced_map_injective")
    assert injective.status == "fail"
    witness = _matrix(injective.witness)
    assert not witness.is_zero()
    assert witness.row(1) == (0, 0)
    assert end_group(lattice2).contains(witness)


def test_decide_rejects_impure_kernel(integers):
    """ℤ/2ℤ is not torsion-free."""
    with pytest.raises(PurityError):
        decide_cellular(integers, line((2,)))


# ── Sufficient criteria ───────────────────────────────────────────────────────


def test_cover_criterion_trivial_kernel(rigid_plane):
    """K = 0 with End(G) = ℤ passes."""
    assert certify_cover_criterion(rigid_plane, zero_group(2)).passed


def test_cover_criterion_split_kernel(lattice2):
    """ℤ² over ℤe1 has a nonzero hom G → K."""
    cert = certify_cover_criterion(lattice2, line((1, 0)))
    assert not cert.passed
    hom = _condition(cert, "hom_group_to_kernel_zero")
    assert hom.status == "fail"
    f = _matrix(hom.witness)
    assert not f.is_zero()
    for v in ((1, 0), (0, 1)):
        assert member(line((1, 0)), f.apply(v))


def test_cover_criterion_soundness_on_fixed_instances(rigid_plane, lattice2):
    """Whenever the criterion passes, the decision procedure agrees."""
    for g, k in ((rigid_plane, zero_group(2)), (lattice2, line((1, 0)))):
        if certify_cover_criterion(g, k).passed:
            assert decide_cellular(g, k)[0]


def test_kernel_criterion_zero_kernel(rigid_plane):
    """K = 0 fails the requirement K ∩ M̂ ≠ 0."""
    cert = certify_kernel_criterion(rigid_plane, zero_group(2), rigid_plane, ())
    assert _condition(cert, "kernel_meets_complement").status == "fail"


def test_kernel_criterion_requires_generation(rigid_plane):
    """G must equal K + M̂."""
    with pytest.raises(InputError):
        certify_kernel_criterion(rigid_plane, zero_group(2), zero_group(2), ())


# ── Marked groups ─────────────────────────────────────────────────────────────


def test_marked_group_default_hypotheses(default_marked):
    """Default L is 2-divisible and reduced at 3 and 5."""
    cert = certify_marked_group(default_marked, (1, 0), 2, 3, 5)
    assert _condition(cert, "divisible_at_q_l").status == "pass"
    assert _condition(cert, "reduced_at_q_k_and_q").status == "pass"
    relation = _condition(cert, "q_divisible_part_is_marked_line").witness["relation"]
    assert relation in {r.value for r in Relation}


def test_marked_group_not_divisible(integers):
    """ℤ is not 2-divisible."""
    cert = certify_marked_group(integers, (1,), 2, 3, 5)
    assert _condition(cert, "divisible_at_q_l").status == "fail"


def test_marked_group_rejects_outsider(default_marked):
    """The marked element must lie in L."""
    with pytest.raises(InputError):
        certify_marked_group(default_marked, ("1/5", 0), 2, 3, 5)


def test_extension_report(default_marked):
    """The extension stays 3-reduced; a 3-divisible variant does not."""
    cert = report_marked_extension(default_marked, (1, 0), 2, 3, 5)
    assert _condition(cert, "reduced_at_q_k").status == "pass"
    assert _condition(cert, "extension_endomorphisms").status == "info"
    variant = direct_sum(default_marked, line((1,), {3}))
    assert not report_marked_extension(variant, (1, 0, 0), 2, 3, 5).passed


# ── Rigid groups ──────────────────────────────────────────────────────────────


def test_rigid_group_rank_two():
    """Rank-2 rigid groups have scalar endomorphisms."""
    g = rigid_group(2, (7, 11, 13))
    assert scalar_ring_recognize(end_group(g)).describe() == "Z"
    h = rigid_group(2, (7, 11, 13), {2})
    assert scalar_ring_recognize(end_group(h)).describe() == "Z[1/2]"


def test_rigid_group_rank_one_documented_ring():
    """In rank one the spine primes end up in the endomorphism ring."""
    g = rigid_group(1, (7, 11))
    assert scalar_ring_recognize(end_group(g)).inverted_primes == {7, 11}


def test_rigid_group_rejects_bad_primes():
    """Spine primes must be distinct, prime and disjoint from the inverted set."""
    with pytest.raises(InputError):
        rigid_group(2, (7, 7, 13))
    with pytest.raises(InputError):
        rigid_group(2, (7, 11, 13), {7})
    with pytest.raises(InputError):
        rigid_group(2, (7, 11))


def test_kernel_spine_extends_configured_primes(cover_config):
    """Larger kernels take further primes avoiding the configured ones."""
    assert kernel_spine(cover_config, 2) == [17, 19, 23]
    spine = kernel_spine(cover_config, 3)
    assert spine[:3] == [17, 19, 23] and len(spine) == 4
    assert spine[3] not in {2, 3, 5, 7, 11, 13}


# ── Three-prime construction ──────────────────────────────────────────────────


@pytest.mark.slow
@pytest.mark.parametrize("rank", [1, 2])
def test_build_default_cover(cover_config, rank):
    """Construction checkpoints on the default instance."""
    built = build_three_prime_cover(cover_config.model_copy(update={"kernel_rank": rank}))
    cert = built.certificate
    for label in (
        "kernel_meets_complement_in_marked_element",
        "marked_line_meets_quotient_trivially",
        "hom_kernel_to_quotient_zero",
        "kernel_is_q_k_divisible_part",
        "kernel_fully_invariant",
        "hom_complement_to_kernel_zero",
    ):
        assert _condition(cert, label).status == "pass", label
    assert set(cert.attachments) == {"decide_cellular", "kernel_criterion"}
    criterion = cert.attachments["kernel_criterion"]
    for label in ("kernel_fully_invariant", "kernel_endomorphisms", "kernel_meets_complement"):
        assert _condition(criterion, label).status == "pass", label
    assert cert.passed
    assert built.cover.kernel.rank == rank
    assert built.cover.quotient.ambient_rank == 2


def test_build_rejects_shared_primes():
    """q_k among the rigidity primes is rejected."""
    with pytest.raises(InputError):
        build_three_prime_cover(CoverConfig(q_k=7))
    with pytest.raises(InputError):
        build_three_prime_cover(CoverConfig(q_l=3))


@pytest.mark.parametrize("overrides", [
    {"k_rigidity_primes": [7, 19, 23], "kernel_rank": 2},
    {"l_rigidity_primes": [7, 11, 13], "k_rigidity_primes": [13, 19, 23]},
    {"k_rigidity_primes": [17, 17, 23]},
    {"l_rigidity_primes": [7, 7, 13]},
])
def test_build_rejects_colliding_rigidity_primes(overrides):
    """Rigidity primes must be distinct within and across L and K."""
    with pytest.raises(InputError):
        build_three_prime_cover(CoverConfig(**overrides))
    with pytest.raises(InputError):
        kernel_spine(CoverConfig(**overrides), 1)


def test_default_kernel_rank_two(cover_config):
    """The rank-2 kernel has endomorphism ring Z[1/3]."""
    k = default_kernel(cover_config.model_copy(update={"kernel_rank": 2}))
    assert k.rank == 2
    assert scalar_ring_recognize(end_group(k)).describe() == "Z[1/3]"


@pytest.mark.slow
def test_demo_kernel_independence(cover_config):
    """Kernels of rank 1 and 2 share one quotient."""
    cert = demo_kernel_independence(2, cover_config)
    assert _condition(cert, "common_quotient").status == "pass"
    assert _condition(cert, "kernel_rank_1").witness == {"kernel_rank": 1}
    assert _condition(cert, "kernel_rank_2").witness == {"kernel_rank": 2}
    assert _condition(cert, "kernel_rank_1").status == "pass"
    assert _condition(cert, "kernel_rank_2").status == "pass"
    assert set(cert.attachments) == {"rank_1", "rank_2"}


@pytest.mark.slow
def test_demo_kernel_independence_rank_three(cover_config):
    """Ranks 1, 2 and 3 give one quotient; rank 3 needs a spine prime beyond the configured ones."""
    cert = demo_kernel_independence(3, cover_config)
    assert cert.passed
    assert _condition(cert, "common_quotient").witness == {"distinct_quotients": 1}
    for k in (1, 2, 3):
        kernel_rank = _condition(cert, f"kernel_rank_{k}")
        assert kernel_rank.status == "pass"
        assert kernel_rank.witness == {"kernel_rank": k}


@pytest.mark.asyncio
@pytest.mark.slow
async def test_demo_kernel_independence_async(cover_config):
    """The async pipeline builds each kernel rank concurrently."""
    cert = await demo_kernel_independence_async(1, cover_config)
    assert _condition(cert, "common_quotient").status == "pass"


def test_demo_rejects_empty_range(cover_config):
    """At least one kernel rank is needed."""
    with pytest.raises(InputError):
        demo_kernel_independence(0, cover_config)


def test_rigid_group_never_returns_unverified(monkeypatch):
    """A failed endomorphism check raises instead of returning."""
    import cellcover.services.covers as covers

    monkeypatch.setattr(covers, "scalar_ring_recognize", lambda hom: ScalarRing(False))
    with pytest.raises(ConstructionError):
        rigid_group(2, (29, 31, 37))
