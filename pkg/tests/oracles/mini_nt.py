"""Independent N-Triples reader used as a cross-check oracle.

Deliberately implemented with a different strategy from the library parser:
line-oriented regular expressions instead of a token stream, and its own
escape decoding.  Agreement between the two implementations on the same
input is evidence that neither has quietly drifted from the format.

Returns plain tuples of strings in canonical N-Triples text form, so
comparisons with the library go through text rather than shared classes.
"""

from __future__ import annotations

import re

_IRI = r"<([^<>\"{}|^`\\\x00-\x20]*)>"
_BNODE = r"_:([A-Za-z0-9_][A-Za-z0-9_\-]*)"
_STRING = r'"((?:[^"\\\n\r]|\\.)*)"'
_LANG = r"@([A-Za-z]+(?:-[A-Za-z0-9]+)*)"

_LINE_RE = re.compile(
    rf"^\s*(?:{_IRI}|{_BNODE})"  # subject: groups 1 (iri) / 2 (bnode)
    rf"\s+{_IRI}"  # predicate: group 3
    rf"\s+(?:{_IRI}|{_BNODE}|{_STRING}(?:{_LANG}|\^\^{_IRI})?)"  # object: 4-8
    rf"\s*\.\s*$"
)

_ESCAPE_RE = re.compile(r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8})|(.))")
_SIMPLE = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def _unescape(text: str) -> str:
    def repl(m: re.Match) -> str:
        if m.group(1):
            return chr(int(m.group(1), 16))
        if m.group(2):
            return chr(int(m.group(2), 16))
        ch = m.group(3)
        if ch not in _SIMPLE:
            raise ValueError(f"bad escape \\{ch}")
        return _SIMPLE[ch]

    return _ESCAPE_RE.sub(repl, text)


def _escape(text: str) -> str:
    out = []
    for ch in text:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        else:
            cp = ord(ch)
            if cp < 0x20 or cp == 0x7F or cp > 0x7E:
                out.append(f"\\u{cp:04X}" if cp <= 0xFFFF else f"\\U{cp:08X}")
            else:
                out.append(ch)
    return "".join(out)


def read_ntriples(text: str) -> set[tuple[str, str, str]]:
    """Parse N-Triples text into a set of canonical (s, p, o) text tuples."""
    triples: set[tuple[str, str, str]] = set()
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _LINE_RE.match(line)
        if m is None:
            raise ValueError(f"line {lineno}: not valid N-Triples: {raw!r}")
        if m.group(1) is not None:
            subj = f"<{_unescape(m.group(1))}>"
        else:
            subj = f"_:{m.group(2)}"
        pred = f"<{_unescape(m.group(3))}>"
        if m.group(4) is not None:
            obj = f"<{_unescape(m.group(4))}>"
        elif m.group(5) is not None:
            obj = f"_:{m.group(5)}"
        else:
            value = _unescape(m.group(6))
            body = f'"{_escape(value)}"'
            if m.group(7) is not None:
                obj = f"{body}@{m.group(7)}"
            elif m.group(8) is not None:
                dt = _unescape(m.group(8))
                if dt == "http://www.w3.org/2001/XMLSchema#string":
                    obj = body
                else:
                    obj = f"{body}^^<{_escape(dt)}>"
            else:
                obj = body
        triples.add((subj, pred, obj))
    return triples
