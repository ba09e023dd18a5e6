"""Exception types shared across the package.

Every error carries a stable ``code`` string so the CLI and tests can match
on it without depending on class identity.
"""

from __future__ import annotations


class JxbwError(Exception):
    code = "JXBW_ERROR"


class MalformedJSON(JxbwError, ValueError):
    code = "MALFORMED_JSON"

    def __init__(self, msg: str, line_no: int | None = None, pos: int | None = None):
        self.line_no = line_no
        self.pos = pos
        where = []
        if line_no is not None:
            where.append(f"line {line_no}")
        if pos is not None:
            where.append(f"char {pos}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{msg}{suffix}")


class NotAnObject(JxbwError, ValueError):
    code = "NOT_AN_OBJECT"


class UnknownLabel(JxbwError, KeyError):
    code = "UNKNOWN_LABEL"

    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else self.code


class EmptyCorpus(JxbwError, ValueError):
    code = "EMPTY_CORPUS"


class EmptyTree(JxbwError, ValueError):
    code = "EMPTY_TREE"


class OutOfRange(JxbwError, IndexError):
    code = "OUT_OF_RANGE"


class NotEnoughOccurrences(JxbwError, IndexError):
    code = "NOT_ENOUGH_OCCURRENCES"


class NoSuchChild(JxbwError, IndexError):
    code = "NO_SUCH_CHILD"


class NotALeaf(JxbwError, ValueError):
    code = "NOT_A_LEAF"


class IndexFormatError(JxbwError, ValueError):
    code = "INDEX_FORMAT"


class BadMagic(IndexFormatError):
    code = "BAD_MAGIC"


class VersionMismatch(IndexFormatError):
    code = "VERSION_MISMATCH"


class Truncated(IndexFormatError):
    code = "TRUNCATED"


class ChecksumFail(IndexFormatError):
    code = "CHECKSUM_FAIL"


class BadQuery(JxbwError, ValueError):
    code = "BAD_QUERY"
