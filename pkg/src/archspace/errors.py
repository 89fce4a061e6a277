"""Exception taxonomy shared across the package."""


class ArchspaceError(Exception):
    """Base class for all package errors."""


class SpaceTooLarge(ArchspaceError):
    """Space exceeds the enumeration hard cap; use the bipartite backend."""


class Disconnected(ArchspaceError):
    """A sampled pair is unreachable in the edit graph (space-spec bug)."""


class BudgetExceeded(ArchspaceError):
    """A* expanded more states than its configured cap."""


class DegenerateK(ArchspaceError):
    """K exceeds the number of distinct members."""


class BudgetTooSmall(ArchspaceError):
    """Sampling budget below the per-cluster floor."""


class GridOverflow(ArchspaceError):
    """Glyph reservations made the hex grid infeasible."""


class EmptyGroup(ArchspaceError):
    """A statistical comparison group is empty."""


class ExhaustedSpace(ArchspaceError):
    """Principle filters reject every architecture in the space."""


class ParseError(ArchspaceError):
    """Malformed input file."""


class UnknownArch(ParseError):
    """Metric row references an arch_id outside the active space."""


class DuplicateArch(ParseError):
    """Metric table contains a repeated arch_id."""


class OutOfRange(ParseError):
    """Metric value outside its legal range."""


class StaleCache(ArchspaceError):
    """Persisted artifact was computed from different inputs."""


class CorruptFile(ArchspaceError):
    """Persisted artifact failed structural validation."""
