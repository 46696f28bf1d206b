"""Exact verification of the fundamental-element structure of the partial
fields H2-H5: dual-route fundamental tables, automorphism groups, rank-2
uniform-matroid representation counts, and local-lift checks."""

__version__ = "0.1.0"
