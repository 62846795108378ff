"""Exception hierarchy shared by every epilog module."""

from __future__ import annotations


class EpilogError(Exception):
    """Base class for domain errors; the CLI maps these to exit code 1."""

    @property
    def code(self) -> str:
        return type(self).__name__


# episode store
class NestingViolation(EpilogError):
    pass


class EndWithoutOpen(EpilogError):
    pass


class OutOfOrderTimestamp(EpilogError):
    pass


class UnknownEpisode(EpilogError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return Exception.__str__(self)


class OpenEpisode(EpilogError):
    pass


class CorruptSnapshot(EpilogError):
    pass


class InvalidEvent(EpilogError):
    pass


# relevance
class MissingEmotion(EpilogError):
    pass


# semantic space
class InvalidMap(EpilogError):
    pass


class UnknownAnchor(EpilogError):
    pass


class OutsideArena(EpilogError):
    pass


# query engine
class QuerySyntaxError(EpilogError):
    """Raised by the parser; ``position`` is a character offset into the query."""

    def __init__(self, message: str, position: int, expected: frozenset[str] = frozenset()):
        self.position = position
        self.expected = frozenset(expected)
        super().__init__(f"{message} at position {position}")

    @property
    def code(self) -> str:
        return "SyntaxError"


class UnknownEntity(EpilogError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class FutureTimestamp(EpilogError):
    pass


# evidence
class EmptyProvenance(EpilogError):
    pass


# harness
class InvalidConfig(EpilogError):
    pass


class InsufficientScenario(EpilogError):
    pass
