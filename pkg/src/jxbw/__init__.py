"""Substructure search over JSON lines with a succinct merged-tree index."""
