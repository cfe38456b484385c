"""prosepoet: deterministic prose-to-couplet translation engine."""

__version__ = "0.1.0"
