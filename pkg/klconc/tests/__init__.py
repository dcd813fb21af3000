"""Unit tests for klconc."""
