"""Periodic flags of lattices over F_q((z)): affine buildings of the
classical types and their twin structure, verified mechanically."""

__version__ = "0.1.0"
