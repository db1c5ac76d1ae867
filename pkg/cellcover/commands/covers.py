"""Cover verbs: decisions, criteria certificates and constructions."""
import json
from pathlib import Path

from pydantic import ValidationError

from cellcover.commands import CommandRouter, arg, certificate_result, group_payload, load_inputs
from cellcover.config import Settings
from cellcover.errors import InputError
from cellcover.models.schemas import CommandRequest, CommandResult, CoverConfig
from cellcover.services import covers
from cellcover.utils.serialization import digest_bytes, parse_primes, parse_vector

router = CommandRouter(tags=["covers"])

_marked = [
    arg("group", help="group file L"),
    arg("--vector", required=True, help="marked element x"),
    arg("--primes", required=True, help="q_l,q_k,q"),
]


def _three_primes(request: CommandRequest) -> tuple[int, int, int]:
    primes = parse_primes(request.options["primes"], "--primes ")
    if len(primes) != 3:
        raise InputError("--primes expects exactly three primes q_l,q_k,q")
    return primes[0], primes[1], primes[2]


def _cover_config(request: CommandRequest, settings: Settings, hashes: dict) -> CoverConfig:
    path = request.options.get("config")
    cfg = settings.default_cover
    if path:
        try:
            raw = Path(path).read_bytes()
            cfg = CoverConfig.model_validate(json.loads(raw))
        except (OSError, json.JSONDecodeError, ValidationError) as exc:
            raise InputError(f"{path}: invalid cover configuration: {exc}") from exc
        hashes["config"] = digest_bytes(raw)
    if request.options.get("kernel_rank"):
        cfg = cfg.model_copy(update={"kernel_rank": request.options["kernel_rank"]})
    return cfg


@router.command("cover-decide", help="decide whether G -> G/K is a cellular cover", inputs=("group", "kernel"),
                arguments=[arg("group", help="group file G"), arg("kernel", help="group file K")])
def cover_decide(request: CommandRequest, settings: Settings) -> CommandResult:
    found, hashes = load_inputs(request)
    _, cert = covers.decide_cellular(found["group"], found["kernel"])
    return certificate_result(cert, hashes)


@router.command("cover-criterion", help="check the sufficient cover criterion", inputs=("group", "kernel"),
                arguments=[arg("group", help="group file G"), arg("kernel", help="group file K")])
def cover_criterion(request: CommandRequest, settings: Settings) -> CommandResult:
    found, hashes = load_inputs(request)
    return certificate_result(covers.certify_cover_criterion(found["group"], found["kernel"]), hashes)


@router.command("kernel-criterion", help="check the large-kernel criterion",
                inputs=("group", "kernel", "complement"),
                arguments=[arg("group", help="group file G"), arg("kernel", help="group file K"),
                           arg("complement", help="group file for the complement"),
                           arg("--ring-primes", default="", help="primes R with End(K) = Z[1/R]")])
def kernel_criterion(request: CommandRequest, settings: Settings) -> CommandResult:
    found, hashes = load_inputs(request)
    ring = parse_primes(request.options.get("ring_primes", ""), "--ring-primes ")
    cert = covers.certify_kernel_criterion(found["group"], found["kernel"], found["complement"], ring)
    return certificate_result(cert, hashes)


@router.command("marked-group", help="check a marked group and its extension", inputs=("group",),
                arguments=_marked)
def marked_group(request: CommandRequest, settings: Settings) -> CommandResult:
    found, hashes = load_inputs(request)
    x = parse_vector(request.options["vector"], "--vector ")
    return certificate_result(covers.certify_marked_group(found["group"], x, *_three_primes(request)), hashes)


@router.command("extension-report", help="report on L extended by the q-roots of x", inputs=("group",),
                arguments=_marked)
def extension_report(request: CommandRequest, settings: Settings) -> CommandResult:
    found, hashes = load_inputs(request)
    x = parse_vector(request.options["vector"], "--vector ")
    return certificate_result(covers.report_marked_extension(found["group"], x, *_three_primes(request)), hashes)


@router.command("build-cover", help="build the three-prime cover", inputs=("kernel_file", "marked_file"),
                arguments=[arg("--config", help="cover configuration JSON"),
                           arg("-k", "--kernel-rank", type=int, help="rank of the default kernel"),
                           arg("--kernel-file", help="group file replacing the default kernel"),
                           arg("--marked-file", help="group file replacing the default marked group")])
def build_cover(request: CommandRequest, settings: Settings) -> CommandResult:
    found, hashes = load_inputs(request)
    cfg = _cover_config(request, settings, hashes)
    built = covers.build_three_prime_cover(cfg, found.get("kernel_file"), found.get("marked_file"))
    result = certificate_result(built.certificate, hashes)
    result.payload.update({
        "group": group_payload(built.cover.group),
        "kernel": group_payload(built.cover.kernel),
        "quotient": group_payload(built.cover.quotient),
        "config": cfg.model_dump(),
    })
    return result


@router.command("demo-independence", help="one quotient, kernels of every rank up to k",
                arguments=[arg("-k", "--k-max", type=int, default=2), arg("--config", help="cover configuration JSON")])
def demo_independence(request: CommandRequest, settings: Settings) -> CommandResult:
    hashes: dict[str, str] = {}
    cfg = _cover_config(request, settings, hashes)
    return certificate_result(covers.demo_kernel_independence(request.options["k_max"], cfg), hashes)


@router.command("rigid", help="build a rigid group and check its endomorphisms",
                arguments=[arg("-k", "--rank", type=int, required=True),
                           arg("--spine", required=True, help="k+1 distinct primes"),
                           arg("--invert", default="", help="primes to invert")])
def rigid(request: CommandRequest, settings: Settings) -> CommandResult:
    g = covers.rigid_group(
        request.options["rank"],
        parse_primes(request.options["spine"], "--spine "),
        parse_primes(request.options.get("invert", ""), "--invert "),
    )
    return CommandResult(verdict=True, payload=group_payload(g), text=g.describe())
