"""Exception hierarchy shared by every apnlab module."""


class ApnlabError(Exception):
    """Base class; the CLI maps it to exit status 1."""


class MalformedInput(ApnlabError, ValueError):
    pass


class DomainError(ApnlabError, ValueError):
    pass


class CapacityError(ApnlabError, ValueError):
    pass


class PreconditionError(ApnlabError, ValueError):
    pass


class RankError(ApnlabError, ValueError):
    pass


class ParseError(MalformedInput):
    def __init__(self, message, position=None):
        super().__init__(message if position is None else f"{message} (position {position})")
        self.position = position


class NormalizationError(ApnlabError):
    """The component/affine system of a subfunction is rank deficient."""


class BudgetExhausted(ApnlabError):
    """A search hit its node budget.

    ``partial`` holds the results found so far and ``frontier`` the DFS path
    from which the search can be resumed.
    """

    def __init__(self, message, partial=None, frontier=None, nodes=0):
        super().__init__(message)
        self.partial = list(partial or [])
        self.frontier = frontier
        self.nodes = nodes
