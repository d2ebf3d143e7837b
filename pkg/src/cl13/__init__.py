"""Workbench for the propositional logic CL13 and its elementary-base fragment.

Formulas mix four sorts of conjunction/disjunction (parallel, toggling,
sequential, choice) over elementary and general atoms.  The package provides
a parser, decision procedures with proof objects, a proof checker, a
constant-game runtime, strategy extraction from proofs, and a small play
service.
"""

from cl13.formula import parse, text, negate, classify

__all__ = ["parse", "text", "negate", "classify"]
