"""Difference families in finite abelian groups."""
