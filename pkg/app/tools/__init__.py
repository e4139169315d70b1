"""Command definitions, registry and handlers."""
