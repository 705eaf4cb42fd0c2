"""Pydantic document and report schemas."""
