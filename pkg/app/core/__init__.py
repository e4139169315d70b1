"""Shared types, errors, logging and worker helpers."""
