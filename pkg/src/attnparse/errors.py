"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: usage errors -> 2, data errors -> 3,
I/O failures -> 4.
"""


class AttnparseError(Exception):
    """Base class for all toolkit errors."""

    category = "error"


class DataError(AttnparseError):
    """Malformed or inconsistent input data."""

    category = "data"


class UsageError(AttnparseError):
    """Caller violated an API or CLI contract (bad flag, bad argument)."""

    category = "usage"


class CorpusMismatch(DataError):
    """Two corpora that must be aligned differ in size or sentence lengths."""

    category = "corpus-mismatch"


class TreeError(DataError):
    """Malformed tree or bracketed-tree text."""

    category = "tree"


class AtndError(DataError):
    """Problems with ATND attention files."""

    category = "atnd"


class BadMagic(AtndError):
    category = "atnd-bad-magic"


class UnsupportedVersion(AtndError):
    category = "atnd-unsupported-version"


class Truncated(AtndError):
    category = "atnd-truncated"


class ShapeMismatch(AtndError):
    category = "atnd-shape-mismatch"
