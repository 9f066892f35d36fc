"""Higher derived brackets of derivations of Lie superalgebras, in exact arithmetic."""

__version__ = "0.1.0"
