"""Catalytic S-gate synthesis with {H, CCZ} and a reusable |+i>, plus the
simulator, measurement-pattern executor and resource counts that check it."""

__version__ = "0.1.0"
