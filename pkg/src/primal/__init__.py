"""First-order primal infon logic: calculi, proof search, semantics."""

__version__ = "0.1.0"
