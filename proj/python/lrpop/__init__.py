"""Low-rank moment relaxations for polynomials in CP form."""

import json

from ._core import (
    BudgetExceeded,
    CPPoly,
    InvalidInput,
    OrderTooSmall,
    bernstein_instance,
    clique_tree,
    clique_tree_dot,
    monomial_instance,
)
from ._core import _solve

__all__ = [
    "BudgetExceeded",
    "CPPoly",
    "InvalidInput",
    "OrderTooSmall",
    "bernstein_instance",
    "clique_tree",
    "clique_tree_dot",
    "monomial_instance",
    "solve",
]


def solve(f, order=0, *, dense=False, t_bounds=False, strict_degree=False, tol=1e-7, timeout=None):
    """Solves the relaxation of order `order` (0 picks the minimal one).

    Returns the run report as a dict with the same fields as the JSON the
    command-line tool writes.
    """
    text = _solve(f, order, dense, t_bounds, strict_degree, tol, timeout)
    return json.loads(text)
