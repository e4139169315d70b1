"""Utility scripts package."""
