"""Strong lottery ticket constructor - builds, prunes and verifies random ReLU networks."""

__version__ = "0.1.0"
