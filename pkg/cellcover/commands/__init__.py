"""Command routing for the CLI verbs, plus input loading shared by the handlers."""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from pydantic import ValidationError

from cellcover.config import Settings
from cellcover.errors import InputError
from cellcover.models.schemas import Certificate, CommandRequest, CommandResult, GroupFile
from cellcover.services.codec import group_from_file, group_to_file, scheme_from_file, scheme_to_file
from cellcover.services.groups import GeneratorScheme, LocalizedGroup, generator_scheme
from cellcover.utils.serialization import digest

Handler = Callable[[CommandRequest, Settings], CommandResult]


def arg(*flags: str, **kwargs: Any) -> tuple[tuple[str, ...], dict[str, Any]]:
    return flags, kwargs


@dataclass
class Command:
    name: str
    handler: Handler
    help: str
    arguments: list[tuple[tuple[str, ...], dict[str, Any]]] = field(default_factory=list)
    inputs: tuple[str, ...] = ()  # argument names holding group file paths


class CommandRouter:
    def __init__(self, tags: list[str] | None = None):
        self.tags = tags or []
        self.commands: dict[str, Command] = {}

    def command(self, name: str, help: str, arguments=(), inputs=()):
        def register(handler: Handler) -> Handler:
            self.commands[name] = Command(name, handler, help, list(arguments), tuple(inputs))
            return handler
        return register


def load_group_file(path: str | Path) -> tuple[LocalizedGroup, str]:
    """Parse and validate a group file; returns the group and the sha256 of its canonical form."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        parsed = GroupFile.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise InputError(f"{path}: {where}: {first['msg']}") from exc
    try:
        g = group_from_file(parsed)
    except InputError as exc:
        raise InputError(f"{path}: {exc.detail}") from exc
    return g, canonical_digest(g)


def load_group_scheme(path: str | Path) -> GeneratorScheme:
    """The generators as written in the file, or a derived scheme for local-form files."""
    g, _ = load_group_file(path)
    data = GroupFile.model_validate(json.loads(Path(path).read_bytes()))
    return scheme_from_file(data) if data.generators is not None else generator_scheme(g)


def load_inputs(request: CommandRequest) -> tuple[dict[str, LocalizedGroup], dict[str, str]]:
    groups, hashes = {}, {}
    for role, path in request.inputs.items():
        groups[role], hashes[role] = load_group_file(path)
    return groups, hashes


def canonical_digest(g: LocalizedGroup) -> str:
    return digest(group_to_file(g).model_dump(exclude_none=True))


def group_payload(g: LocalizedGroup) -> dict[str, Any]:
    return {
        "rank": g.rank,
        "exceptional_primes": list(g.exceptional_primes),
        "group": group_to_file(g).model_dump(exclude_none=True),
        "generator_form": scheme_to_file(generator_scheme(g)).model_dump(exclude_none=True),
        "digest": canonical_digest(g),
    }


def certificate_result(cert: Certificate, hashes: dict[str, str]) -> CommandResult:
    lines = [f"{cert.subject}: {cert.verdict}"]
    for c in cert.conditions:
        lines.append(f"  [{c.status}] {c.label}" + (f" {json.dumps(c.witness)}" if c.witness else ""))
    for name, attached in cert.attachments.items():
        lines.append(f"  attached {name}: {attached.verdict}")
    return CommandResult(verdict=cert.passed, payload={"certificate": cert.model_dump()}, text="\n".join(lines),
                         input_hashes=hashes)
