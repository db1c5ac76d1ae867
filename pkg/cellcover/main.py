"""cellcover command-line entry point."""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from cellcover import __version__
from cellcover.commands import Command, covers, freekernel, groups, homs
from cellcover.config import Settings, get_settings
from cellcover.errors import CellCoverError
from cellcover.models.schemas import CommandRequest, CommandResult

logger = logging.getLogger("cellcover")

# ── Routers ───────────────────────────────────────────────────────────────────
COMMANDS: dict[str, Command] = {}
for _router in (groups.router, homs.router, covers.router, freekernel.router):
    COMMANDS.update(_router.commands)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cellcover", description="Exact toolkit for cellular covers.")
    parser.add_argument("--version", action="version", version=f"cellcover {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)
    for name, command in COMMANDS.items():
        verb = sub.add_parser(name, help=command.help)
        for flags, kwargs in command.arguments:
            if flags[0] in command.inputs:
                # group files may be given positionally or as --<role>
                verb.add_argument(*flags, nargs="?", **kwargs)
                verb.add_argument(f"--{flags[0].replace('_', '-')}", dest=f"{flags[0]}_option", metavar="FILE",
                                  help=kwargs.get("help"))
            else:
                verb.add_argument(*flags, **kwargs)
        verb.add_argument("--json", action="store_true", help="emit a JSON report")
        verb.add_argument("--cross-check", action="store_true", help="compare with the brute-force oracle")
        verb.add_argument("-v", "--verbose", action="count", default=0)
        verb.add_argument("--report-dir", help="also write the JSON report into this directory")
    return parser


def _envelope(request: CommandRequest, result: CommandResult, settings: Settings) -> dict:
    return {
        "tool": settings.app_name,
        "version": settings.version,
        "command": request.verb,
        "verdict": result.verdict,
        "input_hashes": result.input_hashes,
        **result.payload,
    }


def _emit(request: CommandRequest, result: CommandResult, settings: Settings) -> None:
    if request.output == "json" or settings.report_dir is not None:
        report = json.dumps(_envelope(request, result, settings), indent=2, sort_keys=True)
        if settings.report_dir is not None:
            settings.report_dir.mkdir(parents=True, exist_ok=True)
            (settings.report_dir / f"{request.verb}.json").write_text(report)
        if request.output == "json":
            print(report)
            return
    print(result.text)


def run(request: CommandRequest, settings: Optional[Settings] = None) -> int:
    """Execute one verb; returns the process exit code."""
    settings = settings or get_settings()
    command = COMMANDS.get(request.verb)
    if command is None:
        print(f"error: unknown command {request.verb!r}", file=sys.stderr)
        return 2
    try:
        result = command.handler(request, settings)
    except CellCoverError as exc:
        print(f"error: {exc.detail}", file=sys.stderr)
        return exc.status
    except Exception as exc:  # noqa: BLE001
        logger.exception("internal error in %s", request.verb)
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    _emit(request, result, settings)
    return 1 if result.verdict is False else 0


def _positional_roles(command: Command) -> list[str]:
    return [flags[0] for flags, _ in command.arguments if flags[0] in command.inputs]


def _merge_inputs(command: Command, options: dict) -> dict[str, str]:
    """Fold ``--<role>`` options and positionals into the input roles; raises ValueError on a bad mix."""
    roles = _positional_roles(command)
    given = [options[role] for role in roles if options.get(role)]
    flagged = {role: options.pop(f"{role}_option") for role in roles if options.get(f"{role}_option")}
    open_roles = [role for role in roles if role not in flagged]
    if len(given) > len(open_roles):
        raise ValueError(f"too many group files for {', '.join(open_roles) or 'no remaining role'}")
    options.update(dict(zip(open_roles, given)), **flagged)
    missing = open_roles[len(given):]
    if missing:
        raise ValueError(f"the following arguments are required: {', '.join(missing)}")
    for role in roles:
        options.pop(f"{role}_option", None)
    return {role: options[role] for role in command.inputs if options.get(role)}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    settings = get_settings()
    options = vars(args).copy()
    report_dir = options.pop("report_dir")
    if report_dir:
        settings = settings.model_copy(update={"report_dir": Path(report_dir)})
    level = logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else settings.log_level
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    command = COMMANDS[options.pop("verb")]
    output = "json" if options.pop("json") else "text"
    cross_check = options.pop("cross_check")
    options.pop("verbose")
    try:
        inputs = _merge_inputs(command, options)
    except ValueError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    request = CommandRequest(
        verb=command.name,
        inputs=inputs,
        options={k: v for k, v in options.items() if k not in command.inputs},
        output=output,
        cross_check=cross_check,
    )
    return run(request, settings)


if __name__ == "__main__":
    sys.exit(main())
