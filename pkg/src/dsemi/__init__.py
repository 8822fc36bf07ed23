"""Semi-classical orthogonal polynomial systems on the q-quadratic lattice."""

__version__ = "0.1.0"
