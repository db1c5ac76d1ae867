"""Group verbs: info, member, compare, divpart, adjoin, quotient."""
from cellcover.commands import CommandRouter, arg, group_payload, load_group_scheme, load_inputs
from cellcover.config import Settings
from cellcover.models.schemas import CommandRequest, CommandResult
from cellcover.services import groups
from cellcover.services.oracle import brute_member
from cellcover.utils.serialization import parse_vector, rows_to_strings, vector_to_strings

router = CommandRouter(tags=["groups"])


@router.command("info", help="canonical form and prime report of a group", inputs=("group",),
                arguments=[arg("group", help="group file")])
def info(request: CommandRequest, settings: Settings) -> CommandResult:
    found, hashes = load_inputs(request)
    g = found["group"]
    report = groups.divisibility_report(g, g.exceptional_primes)
    payload = {**group_payload(g), "primes": {
        str(p): {"divisible": r.is_divisible, "reduced": r.is_reduced, "divisible_rank": r.divisible_rank}
        for p, r in report.items()
    }}
    return CommandResult(payload=payload, text=g.describe(), input_hashes=hashes)


@router.command("member", help="decide membership of a vector", inputs=("group",),
                arguments=[arg("group", help="group file"), arg("--vector", required=True, help="e.g. 1/9,1/9")])
def member(request: CommandRequest, settings: Settings) -> CommandResult:
    found, hashes = load_inputs(request)
    v = parse_vector(request.options["vector"], "--vector ")
    verdict = groups.member(found["group"], v)
    payload = {"vector": vector_to_strings(v), "member": verdict}
    if request.cross_check:
        scheme = load_group_scheme(request.inputs["group"])
        payload["oracle_found"] = brute_member(scheme, v, settings.oracle_bounds)
        # a bounded search can miss members but never invent one
        payload["oracle_consistent"] = verdict or not payload["oracle_found"]
    return CommandResult(verdict=verdict, payload=payload, text="member" if verdict else "not a member",
                         input_hashes=hashes)


@router.command("compare", help="compare two groups", inputs=("left", "right"),
                arguments=[arg("left", help="group file"), arg("right", help="group file")])
def compare(request: CommandRequest, settings: Settings) -> CommandResult:
    found, hashes = load_inputs(request)
    relation = groups.compare(found["left"], found["right"])
    return CommandResult(verdict=relation is groups.Relation.EQUAL, payload={"relation": relation.value},
                         text=relation.value, input_hashes=hashes)


@router.command("divpart", help="p-divisible part of a group", inputs=("group",),
                arguments=[arg("group", help="group file"), arg("--prime", type=int, required=True)])
def divpart(request: CommandRequest, settings: Settings) -> CommandResult:
    found, hashes = load_inputs(request)
    part = groups.divisible_part(found["group"], request.options["prime"])
    return CommandResult(payload=group_payload(part), text=part.describe(), input_hashes=hashes)


@router.command("adjoin", help="adjoin all q-power roots of an element", inputs=("group",),
                arguments=[arg("group", help="group file"), arg("--vector", required=True),
                           arg("--prime", type=int, required=True)])
def adjoin(request: CommandRequest, settings: Settings) -> CommandResult:
    found, hashes = load_inputs(request)
    v = parse_vector(request.options["vector"], "--vector ")
    out = groups.adjoin_localized_line(found["group"], v, request.options["prime"])
    return CommandResult(payload=group_payload(out), text=out.describe(), input_hashes=hashes)


@router.command("quotient", help="quotient by a pure subgroup", inputs=("group", "kernel"),
                arguments=[arg("group", help="group file"), arg("kernel", help="group file")])
def quotient(request: CommandRequest, settings: Settings) -> CommandResult:
    found, hashes = load_inputs(request)
    m, projection = groups.quotient_by_pure(found["group"], found["kernel"])
    payload = {**group_payload(m), "projection": rows_to_strings(projection)}
    return CommandResult(payload=payload, text=m.describe(), input_hashes=hashes)
