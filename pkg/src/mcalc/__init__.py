"""Measurement-calculus workbench."""
