"""Configuration package: runtime settings and experiment configs."""
