"""Exact-arithmetic categorical probability on finite data.

Finite categories and limits, the distribution monad and its law suites,
codensity monads computed as comma-category limits, Day convolution and
pointwise-monoidality checks, polymeasures and their list-monad calculus,
and exact Kantorovich/Prokhorov metrics.
"""

__version__ = "0.1.0"
