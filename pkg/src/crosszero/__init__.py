"""crosszero: exact polynomial system solving and zero-sum cross-number puzzles."""

__version__ = "0.1.0"
