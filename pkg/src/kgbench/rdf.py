"""Streaming N-Triples reader/writer and the triple model.

The parser is line-oriented and lazy: memory use is bounded by the longest
line, not the file size. Gzip-compressed input is detected by magic bytes.
"""

from __future__ import annotations

import gzip
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Union

GZIP_MAGIC = b"\x1f\x8b"


@dataclass(frozen=True, slots=True)
class Literal:
    """An RDF literal; language tag and datatype are mutually exclusive."""

    lexical: str
    language: str | None = None
    datatype: str | None = None

    def __post_init__(self) -> None:
        if self.language is not None and self.datatype is not None:
            raise ValueError("literal cannot carry both a language tag and a datatype")


class Triple(NamedTuple):
    subject: str
    predicate: str
    object: Union[str, Literal]


class NTriplesError(ValueError):
    """Malformed N-Triples line, carrying its position and raw text."""

    def __init__(self, line_no: int, text: str, reason: str):
        super().__init__(f"line {line_no}: {reason}: {text!r}")
        self.line_no = line_no
        self.text = text
        self.reason = reason


@dataclass(frozen=True, slots=True)
class ParseIssue:
    line_no: int
    text: str
    reason: str


_UNESCAPE = {
    "t": "\t",
    "b": "\b",
    "n": "\n",
    "r": "\r",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}


def _unescape(s: str) -> str:
    if "\\" not in s:
        return s
    out: list[str] = []
    i, n = 0, len(s)
    while i < n:
        c = s[i]
        if c != "\\":
            out.append(c)
            i += 1
            continue
        if i + 1 >= n:
            raise ValueError("dangling backslash")
        e = s[i + 1]
        if e in _UNESCAPE:
            out.append(_UNESCAPE[e])
            i += 2
        elif e == "u":
            out.append(chr(int(s[i + 2 : i + 6], 16)))
            i += 6
        elif e == "U":
            out.append(chr(int(s[i + 2 : i + 10], 16)))
            i += 10
        else:
            raise ValueError(f"unknown escape \\{e}")
    return "".join(out)


def _escape(s: str) -> str:
    return (
        s.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


def _check_iri(iri: str) -> str:
    if not iri:
        raise ValueError("empty IRI")
    if " " in iri or "\t" in iri:
        raise ValueError("whitespace in IRI")
    return _unescape(iri) if "\\" in iri else iri


def _close_quote(s: str, start: int) -> int:
    # index of the closing quote, honoring backslash escapes
    pos = start
    while True:
        q = s.index('"', pos)
        backslashes = 0
        j = q - 1
        while j >= 0 and s[j] == "\\":
            backslashes += 1
            j -= 1
        if backslashes % 2 == 0:
            return q
        pos = q + 1


def _parse_line(line: str) -> Triple:
    if line[0] != "<":
        raise ValueError("subject must be an IRI")
    s_end = line.find(">")
    if s_end < 0:
        raise ValueError("unterminated subject IRI")
    subject = _check_iri(line[1:s_end])

    p_start = line.find("<", s_end + 1)
    if p_start < 0:
        raise ValueError("missing predicate")
    if line[s_end + 1 : p_start].strip():
        raise ValueError("unexpected token before predicate")
    p_end = line.find(">", p_start)
    if p_end < 0:
        raise ValueError("unterminated predicate IRI")
    predicate = _check_iri(line[p_start + 1 : p_end])

    rest = line[p_end + 1 :].lstrip()
    if not rest:
        raise ValueError("missing object")

    obj: Union[str, Literal]
    if rest[0] == "<":
        o_end = rest.find(">")
        if o_end < 0:
            raise ValueError("unterminated object IRI")
        obj = _check_iri(rest[1:o_end])
        tail = rest[o_end + 1 :]
    elif rest[0] == '"':
        try:
            q = _close_quote(rest, 1)
        except ValueError:
            raise ValueError("unterminated literal") from None
        lexical = _unescape(rest[1:q])
        tail = rest[q + 1 :]
        if tail.startswith("@"):
            cut = tail.find(" ")
            if cut < 0:
                cut = tail.find("\t")
            if cut < 0:
                cut = len(tail)
            # the final " ." may follow the tag without a space
            tag = tail[1:cut].rstrip(".").rstrip()
            if not tag:
                raise ValueError("empty language tag")
            obj = Literal(lexical, language=tag)
            tail = tail[1 + len(tag) :]
        elif tail.startswith("^^<"):
            d_end = tail.find(">")
            if d_end < 0:
                raise ValueError("unterminated datatype IRI")
            obj = Literal(lexical, datatype=_check_iri(tail[3:d_end]))
            tail = tail[d_end + 1 :]
        else:
            obj = Literal(lexical)
    else:
        raise ValueError("object must be an IRI or literal")

    if tail.strip() != ".":
        raise ValueError("line must end with '.'")
    return Triple(subject, predicate, obj)


def _open_lines(source) -> Iterable[str]:
    if isinstance(source, (str, Path)):
        path = Path(source)
        with open(path, "rb") as probe:
            magic = probe.read(2)
        if magic == GZIP_MAGIC:
            return gzip.open(path, "rt", encoding="utf-8")
        return open(path, "rt", encoding="utf-8")
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8"))
    if isinstance(source, str):  # pragma: no cover - paths handled above
        return io.StringIO(source)
    return source


def parse_ntriples(
    source,
    *,
    strict: bool = True,
    issues: list[ParseIssue] | None = None,
) -> Iterator[Triple]:
    """Lazily parse N-Triples from a path, file object, or iterable of lines.

    Blank lines and ``#`` comment lines are skipped. A malformed line raises
    :class:`NTriplesError` in strict mode; in lenient mode it is skipped and,
    when an ``issues`` list is supplied, recorded there.
    """
    lines = _open_lines(source)
    try:
        for line_no, raw in enumerate(lines, start=1):
            if isinstance(raw, bytes):
                raw = raw.decode("utf-8")
            line = raw.strip()
            if not line or line[0] == "#":
                continue
            try:
                yield _parse_line(line)
            except ValueError as exc:
                if strict:
                    raise NTriplesError(line_no, line, str(exc)) from None
                if issues is not None:
                    issues.append(ParseIssue(line_no, line, str(exc)))
    finally:
        close = getattr(lines, "close", None)
        if close is not None:
            close()


def serialize_triple(triple: Triple) -> str:
    o = triple.object
    if isinstance(o, Literal):
        obj = f'"{_escape(o.lexical)}"'
        if o.language is not None:
            obj += f"@{o.language}"
        elif o.datatype is not None:
            obj += f"^^<{o.datatype}>"
    else:
        obj = f"<{o}>"
    return f"<{triple.subject}> <{triple.predicate}> {obj} ."


def write_ntriples(triples: Iterable[Triple], path) -> int:
    """Write triples to ``path`` (gzip when the name ends in .gz); returns the count."""
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    n = 0
    with opener(path, "wt", encoding="utf-8") as fh:
        for t in triples:
            fh.write(serialize_triple(t))
            fh.write("\n")
            n += 1
    return n
