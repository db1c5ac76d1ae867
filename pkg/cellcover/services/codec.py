"""Conversion between group files and in-memory groups."""
from cellcover.errors import InputError
from cellcover.models.schemas import GeneratorSpec, GroupFile, LocalDataSpec, LocalFormSpec
from cellcover.services.groups import (
    Generator,
    GeneratorScheme,
    LocalData,
    LocalizedGroup,
    from_generators,
    from_local_form,
)
from cellcover.utils.primes import ensure_primes
from cellcover.utils.serialization import columns_to_strings, parse_columns, parse_vector, vector_to_strings


def scheme_from_file(data: GroupFile) -> GeneratorScheme:
    n = data.ambient_rank
    gens = []
    for i, spec in enumerate(data.generators or []):
        v = parse_vector(spec.vector, f"generators[{i}].vector ")
        if len(v) != n:
            raise InputError(f"generators[{i}]: vector of length {len(v)}, ambient rank is {n}")
        gens.append(Generator(v, ensure_primes(spec.inverted_primes)))
    return GeneratorScheme(n, tuple(gens))


def group_from_file(data: GroupFile) -> LocalizedGroup:
    n = data.ambient_rank
    if data.generators is not None:
        return from_generators(scheme_from_file(data))
    form = data.local_form
    base = parse_columns(form.base_lattice, n, "local_form.base_lattice ")
    span = parse_columns(form.span_basis, n, "local_form.span_basis ")
    if span.cols != base.cols:
        raise InputError("local_form: span basis and base lattice have different ranks")
    locals_ = [
        LocalData(
            item.prime,
            parse_columns(item.divisible_basis, n, f"local_form.locals[{i}].divisible_basis "),
            parse_columns(item.lattice_basis, n, f"local_form.locals[{i}].lattice_basis "),
        )
        for i, item in enumerate(form.locals)
    ]
    g = from_local_form(n, base, locals_)
    if not (g.annihilator @ span).is_zero():
        raise InputError("local_form: span basis disagrees with the base lattice")
    return g


def group_to_file(g: LocalizedGroup) -> GroupFile:
    return GroupFile(
        ambient_rank=g.ambient_rank,
        local_form=LocalFormSpec(
            span_basis=columns_to_strings(g.span_basis),
            base_lattice=columns_to_strings(g.base_lattice),
            locals=[
                LocalDataSpec(
                    prime=item.prime,
                    divisible_basis=columns_to_strings(item.divisible_basis),
                    lattice_basis=columns_to_strings(item.lattice_basis),
                )
                for item in g.locals
            ],
        ),
    )


def scheme_to_file(scheme: GeneratorScheme) -> GroupFile:
    return GroupFile(
        ambient_rank=scheme.ambient_rank,
        generators=[
            GeneratorSpec(vector=vector_to_strings(g.vector), inverted_primes=sorted(g.inverted_primes))
            for g in scheme.generators
        ],
    )
