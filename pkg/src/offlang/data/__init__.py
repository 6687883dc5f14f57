"""Bundled lexicon files."""
