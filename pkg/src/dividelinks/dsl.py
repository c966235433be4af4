"""Line-oriented textual format for divides (the ``.divide`` format).

Grammar::

    file   := "divide" "v1" NL {branch}
    branch := "branch" ("open"|"closed") ":" point {point} NL
    point  := "(" num "," num ")"
    num    := DECIMAL | INT "/" INT

Numbers are exact: ``0.1`` means 1/10, never a float.  Comments run from
``#`` to the end of the line; a comment of the form ``# name: <text>`` right
after the header is recognized as the document name so that named documents
survive a round trip.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from .geometry import Point2
from .model import Branch

VERSION = "v1"

_NUM = r"-?(?:\d+/\d+|\d+(?:\.\d+)?|\.\d+)"
_POINT_RE = re.compile(r"\(\s*(" + _NUM + r")\s*,\s*(" + _NUM + r")\s*\)")
_NAME_COMMENT_RE = re.compile(r"#\s*name:\s*(.+?)\s*$")


class DivideSyntaxError(Exception):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class RangeError(Exception):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class DivideDocument:
    branches: List[Tuple[str, List[Point2]]] = field(default_factory=list)
    name: Optional[str] = None
    version: str = VERSION

    def to_branches(self) -> List[Branch]:
        return [Branch(kind, tuple(points)) for kind, points in self.branches]

    @classmethod
    def from_branches(cls, branches, name: Optional[str] = None) -> "DivideDocument":
        return cls(
            branches=[(b.kind, list(b.vertices)) for b in branches],
            name=name,
        )


def _parse_number(token: str, line_no: int) -> Fraction:
    if "/" in token:
        num, den = token.split("/")
        if int(den) == 0:
            raise RangeError("zero denominator", line_no)
        return Fraction(int(num), int(den))
    return Fraction(token)  # exact decimal conversion


def parse(text: str) -> DivideDocument:
    """Parse a .divide document; all failures carry a line/column position."""
    doc = DivideDocument()
    lines = text.replace("\r\n", "\n").split("\n")
    header_seen = False
    for line_no, raw in enumerate(lines, start=1):
        name_match = _NAME_COMMENT_RE.search(raw)
        if name_match and header_seen and doc.name is None and raw.lstrip().startswith("#"):
            doc.name = name_match.group(1)
            continue
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not header_seen:
            parts = line.split()
            if parts[:1] != ["divide"]:
                raise DivideSyntaxError("expected 'divide v1' header", line_no, 1)
            if parts[1:] != [VERSION]:
                raise DivideSyntaxError(f"unsupported version {parts[1:]},"
                                        f" expected {VERSION}", line_no, len("divide "))
            header_seen = True
            continue
        if not line.startswith("branch"):
            raise DivideSyntaxError("expected 'branch'", line_no, 1)
        rest = line[len("branch"):].lstrip()
        kind, sep, body = rest.partition(":")
        kind = kind.strip()
        if not sep:
            raise DivideSyntaxError("expected ':' after branch kind", line_no, len(line))
        if kind not in ("open", "closed"):
            raise DivideSyntaxError(f"unknown branch kind {kind!r}", line_no,
                                    line.index(kind) + 1 if kind else 1)
        points: List[Point2] = []
        pos = 0
        body_offset = raw.find(body) if body else len(raw)
        while pos < len(body):
            chunk = body[pos:]
            if not chunk.strip():
                break
            m = _POINT_RE.match(chunk.lstrip())
            if not m:
                col = body_offset + pos + 1
                raise DivideSyntaxError("expected point '(x, y)'", line_no, col)
            lead = len(chunk) - len(chunk.lstrip())
            x = _parse_number(m.group(1), line_no)
            y = _parse_number(m.group(2), line_no)
            for value, axis in ((x, "x"), (y, "y")):
                if value < -1 or value > 1:
                    raise RangeError(f"{axis}-coordinate {value} outside [-1, 1]", line_no)
            points.append(Point2(x, y))
            pos += lead + m.end()
        if not points:
            raise DivideSyntaxError("branch needs at least one point", line_no, len(line))
        doc.branches.append((kind, points))
    if not header_seen:
        raise DivideSyntaxError("expected 'divide v1' header", 1, 1)
    return doc


def _format_number(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def serialize(doc: DivideDocument) -> str:
    """Canonical form: one branch per line, coordinates in lowest terms."""
    out = [f"divide {VERSION}"]
    if doc.name is not None:
        out.append(f"# name: {doc.name}")
    for kind, points in doc.branches:
        coords = " ".join(
            f"({_format_number(p.x)},{_format_number(p.y)})" for p in points
        )
        out.append(f"branch {kind}: {coords}")
    return "\n".join(out) + "\n"


def load(path) -> DivideDocument:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


def dump(doc: DivideDocument, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize(doc))
