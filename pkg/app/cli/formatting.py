from __future__ import annotations

import json
from typing import Any

from app.core.types import CommandResult


def _render(value: Any) -> str:
    if isinstance(value, float):
        return format(value, ".6g")
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True, default=str)
    return str(value)


def format_result(command: str, result: CommandResult) -> str:
    if not result.success:
        return f"prefiqs {command}: {result.message} (exit {result.exit_code})"

    lines = [f"prefiqs {command}: {result.message}"]
    outputs = result.data.get("outputs", {})
    for name, path in outputs.items():
        lines.append(f"  {name:<10} {path}")
    for key, value in result.data.items():
        if key != "outputs":
            lines.append(f"  {key} = {_render(value)}")
    return "\n".join(lines)
