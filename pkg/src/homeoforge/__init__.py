"""Exact piecewise-linear homeomorphism groups of the line and the circle.

Quadratic-field scalars, PL maps, Thompson generators, group words, the
line-group constructions and the ring-group machinery, all with exact
arithmetic.
"""

__version__ = "0.1.0"
