from collections.abc import Callable, Mapping
import logging
from typing import Any

from app.core.errors import EXIT_USAGE
from app.core.types import CommandDefinition, CommandResult


logger = logging.getLogger(__name__)

CommandHandler = Callable[[dict[str, Any]], CommandResult]


class CommandRegistry:
    """Declared commands and the handler wired to each; every command needs exactly one."""

    def __init__(self, definitions: list[CommandDefinition]):
        self._definitions = {definition.name: definition for definition in definitions}
        self._handlers: dict[str, CommandHandler] = {}

    def register_handlers(self, handlers: Mapping[str, CommandHandler]) -> None:
        for command, handler in handlers.items():
            if command not in self._definitions:
                raise ValueError(f"Command not declared: {command}")
            if command in self._handlers:
                raise ValueError(f"Command already has a handler: {command}")
            self._handlers[command] = handler

    def unhandled(self) -> list[str]:
        return [name for name in self._definitions if name not in self._handlers]

    def ensure_complete(self) -> "CommandRegistry":
        missing = self.unhandled()
        if missing:
            raise ValueError(f"Commands without a handler: {', '.join(missing)}")
        return self

    def list_commands(self) -> list[CommandDefinition]:
        return list(self._definitions.values())

    def call(self, command: str, arguments: dict[str, Any]) -> CommandResult:
        handler = self._handlers.get(command)
        if handler is None:
            return CommandResult(success=False, message=f"Unknown command: {command}", exit_code=EXIT_USAGE)
        logger.debug("Dispatch command=%s", command)
        return handler(arguments)
