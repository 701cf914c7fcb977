"""Exception hierarchy shared by every gaplab module."""


class GaplabError(Exception):
    """Base class for all library errors."""


class DomainError(GaplabError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class RangeCeilingError(DomainError):
    """A sieve range exceeds the configured global ceiling."""


class ExtensionExhaustedError(GaplabError):
    """No successor was found before the lookahead hit the range ceiling."""


class TargetUnreachableError(GaplabError):
    """A requested accuracy cannot be met at the largest truncation point."""


class ConcurrencyContractError(GaplabError):
    """A sequential-only computation was requested with concurrency."""
