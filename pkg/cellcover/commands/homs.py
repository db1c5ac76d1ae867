"""Hom verbs: hom, end."""
from cellcover.commands import CommandRouter, arg, group_payload, load_group_scheme, load_inputs
from cellcover.config import Settings
from cellcover.models.schemas import CommandRequest, CommandResult, SearchBounds
from cellcover.services.homs import HomGroup, end_group, hom_group, scalar_ring_recognize
from cellcover.services.oracle import brute_homs, cross_check, hom_slice
from cellcover.utils.serialization import parse_primes, rows_to_strings

router = CommandRouter(tags=["homs"])

_bounds = [
    arg("--max-numerator", type=int, default=None, help="oracle bound on entry numerators"),
    arg("--max-exponent", type=int, default=None, help="oracle bound on prime exponents"),
    arg("--oracle-primes", default="", help="primes allowed in oracle denominators, e.g. 2,3"),
]


def _bounds_from(request: CommandRequest, settings: Settings) -> SearchBounds:
    base = settings.oracle_bounds
    primes = parse_primes(request.options.get("oracle_primes", ""), "--oracle-primes ")
    return SearchBounds(
        max_numerator=_option(request, "max_numerator", base.max_numerator),
        max_exponent=_option(request, "max_exponent", base.max_exponent),
        primes=primes or base.primes,
    )


def _option(request: CommandRequest, name: str, default):
    value = request.options.get(name)
    return default if value is None else value


def _hom_result(hom: HomGroup, request: CommandRequest, settings: Settings, hashes: dict) -> CommandResult:
    payload = {
        "carrier": group_payload(hom.carrier),
        "shape": list(hom.shape),
        "generators": [
            {"matrix": rows_to_strings(f), "inverted_primes": sorted(pi)} for f, pi in hom.generating_maps
        ],
    }
    if hom.domain == hom.codomain:
        payload["ring"] = scalar_ring_recognize(hom).describe()
    verdict = None
    if request.cross_check:
        bounds = _bounds_from(request, settings)
        domain = load_group_scheme(request.inputs.get("domain") or request.inputs["group"])
        report = cross_check(hom_slice(hom, bounds), brute_homs(domain, hom.codomain, bounds))
        payload["cross_check"] = report.model_dump()
        verdict = report.agree
    text = f"Hom of rank {hom.rank}" + (f", ring {payload['ring']}" if "ring" in payload else "")
    return CommandResult(verdict=verdict, payload=payload, text=text, input_hashes=hashes)


@router.command("hom", help="Hom(A, B) as a group of matrices", inputs=("domain", "codomain"),
                arguments=[arg("domain", help="group file A"), arg("codomain", help="group file B"), *_bounds])
def hom(request: CommandRequest, settings: Settings) -> CommandResult:
    found, hashes = load_inputs(request)
    return _hom_result(hom_group(found["domain"], found["codomain"]), request, settings, hashes)


@router.command("end", help="End(A) and its scalar ring", inputs=("group",),
                arguments=[arg("group", help="group file"), *_bounds])
def end(request: CommandRequest, settings: Settings) -> CommandResult:
    found, hashes = load_inputs(request)
    return _hom_result(end_group(found["group"]), request, settings, hashes)
