"""Verifier for mathematical texts in controlled English.

Documents are parsed, desugared to first-order logic through user-declared
notations, compiled to statement sequences, and discharged as proof
obligations by a built-in resolution prover, a bounded countermodel finder,
and optional external TPTP provers. Ships a Tarski geometry library and a
worked proof corpus.
"""

__version__ = "0.1.0"
