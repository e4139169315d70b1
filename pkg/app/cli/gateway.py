from __future__ import annotations

import argparse
from collections.abc import Sequence
import logging
import sys
from typing import TextIO

from app.core.errors import EXIT_USAGE
from app.core.types import CommandDefinition
from app.cli.formatting import format_result
from app.tools.registry import CommandRegistry


logger = logging.getLogger(__name__)

ARGUMENT_TYPES = {"path": str, "number": float, "integer": int, "string": str}


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def _add_argument(parser: argparse.ArgumentParser, name: str, prop: dict, required: bool) -> None:
    kind = prop.get("type", "string")
    options: dict = {"dest": name, "help": prop.get("help")}
    if kind == "boolean":
        parser.add_argument(_flag(name), action="store_true", **options)
        return
    if kind == "array":
        options["nargs"] = "+"
        options["type"] = ARGUMENT_TYPES[prop.get("items", {}).get("type", "string")]
    else:
        options["type"] = ARGUMENT_TYPES[kind]
    if "enum" in prop:
        options["choices"] = prop["enum"]
    if "default" in prop:
        options["default"] = prop["default"]
    parser.add_argument(_flag(name), required=required, **options)


def build_parser(definitions: Sequence[CommandDefinition]) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prefiqs",
        description="Pruning-induced embedding drift as an image utility score.",
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for definition in definitions:
        sub = commands.add_parser(definition.name, help=definition.description, description=definition.description)
        schema = definition.input_schema
        for name, prop in schema.properties.items():
            _add_argument(sub, name, prop, name in schema.required)
    return parser


class CliGateway:
    """Parses argv, dispatches to the command registry and reports the exit code."""

    def __init__(self, registry: CommandRegistry, stdout: TextIO | None = None, stderr: TextIO | None = None):
        self.registry = registry
        self.parser = build_parser(registry.list_commands())
        self.stdout = stdout
        self.stderr = stderr

    def run(self, argv: Sequence[str] | None = None) -> int:
        try:
            namespace = self.parser.parse_args(argv)
        except SystemExit as exc:
            code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
            return code

        arguments = {k: v for k, v in vars(namespace).items() if k != "command"}
        logger.info("Command start command=%s arguments=%s", namespace.command, arguments)
        result = self.registry.call(namespace.command, arguments)

        stream = (self.stdout or sys.stdout) if result.success else (self.stderr or sys.stderr)
        print(format_result(namespace.command, result), file=stream)
        return result.exit_code
