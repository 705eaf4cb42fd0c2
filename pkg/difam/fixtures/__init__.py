"""Worked families shipped with the package."""
