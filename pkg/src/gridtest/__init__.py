"""Sublinear-query testers for order-pattern freeness on grids."""

from .core import (
    ERASED,
    FORK123,
    Appearance,
    Erased,
    FormulaGridFunction,
    GridFunction,
    OracleView,
    P12,
    P21,
    P123,
    P132,
    Pattern,
    QueryOracle,
    Rect,
    Region,
    TesterConfig,
    Verdict,
    is_appearance,
    parse_pattern,
    perm_pattern,
    precedes,
)

__version__ = "0.1.0"
