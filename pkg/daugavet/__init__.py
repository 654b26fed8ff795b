"""Numerical ranges, numerical indices and isometry Lie algebras of finite-dimensional normed spaces."""

__version__ = "0.1.0"
