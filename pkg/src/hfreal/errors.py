"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: parse/usage problems exit 1,
resource exhaustion (precision, bit budgets, iteration caps) exits 2,
and anything else exits 3.
"""


class HFRealError(Exception):
    """Base class for all package errors."""


class ParseError(HFRealError):
    """Malformed braces term, set-system text, or graph text."""


class BitBudgetError(HFRealError):
    """An Ackermann code would exceed the configured bit budget."""


class BudgetError(HFRealError):
    """A size/depth budget of an experiment was exceeded."""


class UnreachableNodesError(HFRealError):
    """A pointed graph has nodes not reachable from its point."""

    def __init__(self, nodes):
        self.nodes = tuple(nodes)
        super().__init__(f"nodes not reachable from point: {self.nodes}")


class PrecisionExhausted(HFRealError):
    """max_precision was reached before the requested width.

    Carries the best result obtained so far (a CodeSolution or an
    Enclosure, depending on the operation) in ``best``.
    """

    def __init__(self, message, best=None):
        self.best = best
        super().__init__(message)


class IterationLimitError(HFRealError):
    """The solver hit its iteration safety cap before converging."""
