"""Exception hierarchy shared by every module of the package."""


class DbgError(Exception):
    """Base class for all errors raised by dyndbg."""


class UnknownSymbol(DbgError, ValueError):
    pass


class LengthMismatch(DbgError, ValueError):
    pass


class SymbolOutOfRange(DbgError, ValueError):
    pass


class RestartNeeded(DbgError):
    """Two distinct keys share a fingerprint; the caller must redraw the base."""


class TooManyRestarts(DbgError):
    pass


class NotPresent(DbgError, KeyError):
    pass


class CorruptForest(DbgError):
    pass


class NotARoot(DbgError):
    pass


class AlreadyRoot(DbgError):
    pass


class EdgeNotConfirmed(DbgError):
    pass


class NodeAbsent(DbgError):
    pass


class EdgeAbsent(DbgError):
    pass


class NotChainable(DbgError, ValueError):
    pass


class DistinctKmerCollision(DbgError):
    """A new k-mer hashes to the fingerprint of a different stored k-mer."""


class SequenceTooShort(DbgError, ValueError):
    pass


class PatternLongerThanText(DbgError, ValueError):
    pass


class StaticGraphError(DbgError):
    """A mutation was attempted on a static (immutable) structure."""


class SnapshotError(DbgError):
    pass


class BadMagic(SnapshotError):
    pass


class VersionMismatch(SnapshotError):
    pass


class ChecksumMismatch(SnapshotError):
    pass


class Truncated(SnapshotError):
    pass
