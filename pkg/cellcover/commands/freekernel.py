"""Free-kernel verbs: fk-summand, fk-trace, fk-search."""
from cellcover.commands import CommandRouter, arg, certificate_result, load_inputs
from cellcover.config import Settings
from cellcover.models.schemas import CommandRequest, CommandResult
from cellcover.services.covers import CoverInstance
from cellcover.services.freekernel import (
    FreeGroupWithBasis,
    search_free_kernel_covers,
    separable_summand,
    trace_free_kernel,
)
from cellcover.utils.serialization import columns_to_strings, parse_matrix_rows, rational_to_str

router = CommandRouter(tags=["freekernel"])


@router.command("fk-summand", help="smallest basis summand of Z^n containing the given vectors",
                arguments=[arg("--rank", type=int, required=True),
                           arg("--gens", required=True, help="vectors separated by ';', e.g. 2,2,0;0,0,1")])
def fk_summand(request: CommandRequest, settings: Settings) -> CommandResult:
    k = FreeGroupWithBasis.standard(request.options["rank"])
    gens = parse_matrix_rows(request.options["gens"], "--gens ")
    split = separable_summand(k, gens.entries)
    payload = {
        "support": list(split.support),
        "summand": columns_to_strings(split.summand),
        "complement": columns_to_strings(split.complement),
        "determinant": rational_to_str(split.basis_change_determinant(k)),
    }
    return CommandResult(payload=payload, text=f"summand of rank {len(split.support)} on {list(split.support)}")


@router.command("fk-trace", help="trace a cellular cover with free kernel", inputs=("group", "kernel"),
                arguments=[arg("group", help="group file G"), arg("kernel", help="group file K")])
def fk_trace(request: CommandRequest, settings: Settings) -> CommandResult:
    found, hashes = load_inputs(request)
    return certificate_result(trace_free_kernel(CoverInstance.of(found["group"], found["kernel"])), hashes)


@router.command("fk-search", help="randomised search for covers with nonzero free kernel",
                arguments=[arg("--seed", type=int, default=0), arg("--trials", type=int, default=20)])
def fk_search(request: CommandRequest, settings: Settings) -> CommandResult:
    cert = search_free_kernel_covers(request.options["seed"], request.options["trials"])
    return certificate_result(cert, {})
