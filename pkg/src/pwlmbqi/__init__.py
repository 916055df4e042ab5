"""Model-based quantifier instantiation with piecewise-linear model fitting."""

__version__ = "0.1.0"
