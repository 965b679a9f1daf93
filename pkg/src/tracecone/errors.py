"""Exception hierarchy shared by every module of the package."""


class TraceconeError(Exception):
    """Base class for all errors raised by tracecone."""


class MalformedElement(TraceconeError, ValueError):
    """Block shapes do not match the algebra, or algebras differ."""


class NotHermitian(TraceconeError, ValueError):
    pass


class NotPositive(TraceconeError, ValueError):
    pass


class IllConditioned(TraceconeError, ValueError):
    pass


class NotInvertible(TraceconeError, ValueError):
    pass


class EmptySet(TraceconeError, ValueError):
    pass


class BudgetExceeded(TraceconeError, RuntimeError):
    pass


class NonConvergence(TraceconeError, RuntimeError):
    """An iterative solver ran out of iterations.

    The best iterate found so far is attached as ``best`` so callers can
    still inspect or certify it.
    """

    def __init__(self, message, best=None, iterations=None):
        super().__init__(message)
        self.best = best
        self.iterations = iterations


class OrderExceeded(TraceconeError, RuntimeError):
    """Group closure did not terminate.

    ``norm_growth`` is True when some product exceeded the norm-growth
    threshold, which certifies that the generated group is unbounded.
    ``table`` holds the partial (non-closed) table.
    """

    def __init__(self, message, max_order, norm_growth=False, table=None):
        super().__init__(message)
        self.max_order = max_order
        self.norm_growth = norm_growth
        self.table = table
