"""Exception types shared across the toolkit.

Every error raised by coview derives from :class:`CoviewError`, so callers
(and the CLI) can catch one base class and still report the specific kind.
"""


class CoviewError(Exception):
    """Base class for all coview errors."""


class MissingColumn(CoviewError):
    """A mapped column name is absent from a file header."""


class DuplicateId(CoviewError):
    """An identifier that must be unique appeared more than once."""


class ParseError(CoviewError):
    """A malformed row or line; carries the 1-based row number."""

    def __init__(self, row, message):
        super().__init__(f"row {row}: {message}")
        self.row = row


class EmptyList(CoviewError):
    """A stop-word source yielded zero usable tokens."""


class OutOfRange(CoviewError):
    """A numeric argument violated its documented range."""


class EmptyGraph(CoviewError):
    """A construction produced (or received) a graph with nothing in it."""


class DimensionMismatch(CoviewError):
    """Two values that must describe the same objects do not line up."""


class UncoveredNode(CoviewError):
    """A partition or covariate table is missing a graph node."""


class UnsupportedAlgorithm(CoviewError):
    """An unknown community-detection algorithm name."""


class DisconnectedInput(CoviewError):
    """An algorithm that requires a connected graph got a disconnected one."""


class MissingCovariate(CoviewError):
    """A graph node has no covariate row."""


class EmptySeries(CoviewError):
    """A threshold-selection rule received an empty dispersogram."""


class EmptySelection(CoviewError):
    """A subgraph rule selected no nodes."""


class Degenerate(CoviewError):
    """A statistic is undefined for the given input (e.g. constant sample)."""


class NoConvergence(CoviewError):
    """An iterative method hit its iteration cap before the tolerance."""


class ConfigError(CoviewError):
    """One or more invalid pipeline-configuration fields.

    ``problems`` lists every violation found, not just the first.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class MissingPrerequisite(CoviewError):
    """A pipeline stage was invoked before the stages it depends on."""
