"""Matrix-valued orthogonal polynomials and commuting operators for time and
band limiting."""

__version__ = "0.1.0"
