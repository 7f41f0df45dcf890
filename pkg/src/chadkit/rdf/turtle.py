"""Turtle and N-Triples reading.

The supported Turtle subset covers what the shipped ontology excerpts and
exemplar data use: prefix directives, IRIs, prefixed names, literals with
datatype or language tag, labelled blank nodes, the `a` keyword, and
predicate/object lists.  Collections, quoted triples, anonymous blank nodes
and base directives raise UnsupportedFeature.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from chadkit.errors import ParseError, UnsupportedFeature
from chadkit.rdf.model import BlankNode, Graph, Iri, Literal, Term, Triple

_IRI_FORBIDDEN = set(' <>"{}|^`\\')
_PNAME_LOCAL_RE = re.compile(r"^[A-Za-z0-9_]([A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?$")
_LANGTAG_RE = re.compile(r"[A-Za-z]+(-[A-Za-z0-9]+)*")
_NUMBER_RE = re.compile(r"[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?")
_WORD_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*")

_XSD = "http://www.w3.org/2001/XMLSchema#"


@dataclass
class Token:
    kind: str
    value: str
    line: int
    col: int


class Lexer:
    """Shared tokenizer for Turtle, N-Triples, and the query language."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1
        self.tokens: list[Token] = []

    def error(self, message: str) -> ParseError:
        return ParseError(self.line, self.col, message)

    def _advance(self, n: int) -> None:
        for _ in range(n):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _peek(self, offset: int = 0) -> str:
        p = self.pos + offset
        return self.text[p] if p < len(self.text) else ""

    def _emit(self, kind: str, value: str, line: int, col: int) -> None:
        self.tokens.append(Token(kind, value, line, col))

    def run(self) -> list[Token]:
        while self.pos < len(self.text):
            ch = self._peek()
            line, col = self.line, self.col
            if ch in " \t\r\n":
                self._advance(1)
            elif ch == "#":
                while self.pos < len(self.text) and self._peek() != "\n":
                    self._advance(1)
            elif ch == "<":
                if self._peek(1) == "<":
                    raise UnsupportedFeature(line, col, "quoted triple '<<'")
                self._lex_iriref()
            elif ch in "\"'":
                self._lex_string()
            elif ch == "@":
                self._lex_at_word()
            elif ch == "^":
                if self._peek(1) != "^":
                    raise self.error("lone '^'")
                self._advance(2)
                self._emit("dhat", "^^", line, col)
            elif ch == "_":
                if self._peek(1) != ":":
                    raise self.error("'_' must start a blank node label '_:'")
                self._lex_bnode()
            elif ch == "?":
                self._lex_var()
            elif ch in ".;,{}()[]=":
                kinds = {
                    ".": "dot",
                    ";": "semi",
                    ",": "comma",
                    "{": "lbrace",
                    "}": "rbrace",
                    "(": "lparen",
                    ")": "rparen",
                    "[": "lbracket",
                    "]": "rbracket",
                    "=": "eq",
                }
                # a dot may also start a number like .5
                if ch == "." and self._peek(1).isdigit():
                    self._lex_number()
                else:
                    self._advance(1)
                    self._emit(kinds[ch], ch, line, col)
            elif ch.isdigit() or (ch in "+-" and (self._peek(1).isdigit() or self._peek(1) == ".")):
                self._lex_number()
            else:
                self._lex_name()
        return self.tokens

    def _lex_iriref(self) -> None:
        line, col = self.line, self.col
        self._advance(1)
        out: list[str] = []
        while True:
            if self.pos >= len(self.text):
                raise ParseError(line, col, "unterminated IRI")
            ch = self._peek()
            if ch == ">":
                self._advance(1)
                break
            if ch == "\\":
                out.append(self._read_uchar())
                continue
            if ch in _IRI_FORBIDDEN or ord(ch) <= 0x20:
                raise self.error(f"character {ch!r} not allowed in IRI")
            out.append(ch)
            self._advance(1)
        self._emit("iriref", "".join(out), line, col)

    def _read_uchar(self) -> str:
        # positioned at the backslash
        esc_line, esc_col = self.line, self.col
        kind = self._peek(1)
        if kind == "u":
            hexs = self.text[self.pos + 2 : self.pos + 6]
            width = 4
        elif kind == "U":
            hexs = self.text[self.pos + 2 : self.pos + 10]
            width = 8
        else:
            raise ParseError(esc_line, esc_col, f"invalid IRI escape '\\{kind}'")
        if len(hexs) != width or any(c not in "0123456789abcdefABCDEF" for c in hexs):
            raise ParseError(esc_line, esc_col, "malformed \\u escape")
        self._advance(2 + width)
        return chr(int(hexs, 16))

    def _lex_string(self) -> None:
        line, col = self.line, self.col
        quote = self._peek()
        long = self.text[self.pos : self.pos + 3] == quote * 3
        self._advance(3 if long else 1)
        out: list[str] = []
        while True:
            if self.pos >= len(self.text):
                raise ParseError(line, col, "unterminated string")
            ch = self._peek()
            if long and self.text[self.pos : self.pos + 3] == quote * 3:
                self._advance(3)
                break
            if not long and ch == quote:
                self._advance(1)
                break
            if not long and ch == "\n":
                raise ParseError(line, col, "newline in single-line string")
            if ch == "\\":
                nxt = self._peek(1)
                simple = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f",
                          '"': '"', "'": "'", "\\": "\\"}
                if nxt in simple:
                    out.append(simple[nxt])
                    self._advance(2)
                elif nxt in "uU":
                    out.append(self._read_uchar())
                else:
                    raise self.error(f"invalid string escape '\\{nxt}'")
            else:
                out.append(ch)
                self._advance(1)
        self._emit("string", "".join(out), line, col)

    def _lex_at_word(self) -> None:
        line, col = self.line, self.col
        self._advance(1)
        m = _LANGTAG_RE.match(self.text[self.pos :])
        if not m:
            raise self.error("'@' must introduce a language tag or directive")
        word = m.group(0)
        self._advance(len(word))
        if word == "prefix":
            self._emit("prefix_directive", "@prefix", line, col)
        elif word == "base":
            raise UnsupportedFeature(line, col, "@base directive")
        else:
            self._emit("langtag", word, line, col)

    def _lex_bnode(self) -> None:
        line, col = self.line, self.col
        self._advance(2)
        m = _WORD_RE.match(self.text[self.pos :])
        if not m:
            raise self.error("missing blank node label after '_:'")
        label = m.group(0)
        self._advance(len(label))
        self._emit("bnode", label, line, col)

    def _lex_var(self) -> None:
        line, col = self.line, self.col
        self._advance(1)
        m = _WORD_RE.match(self.text[self.pos :])
        if not m:
            raise self.error("missing variable name after '?'")
        name = m.group(0)
        self._advance(len(name))
        self._emit("var", name, line, col)

    def _lex_number(self) -> None:
        line, col = self.line, self.col
        m = _NUMBER_RE.match(self.text[self.pos :])
        if not m:
            raise self.error("malformed number")
        text = m.group(0)
        self._advance(len(text))
        self._emit("number", text, line, col)

    def _lex_name(self) -> None:
        """A bare word, or a prefixed name `prefix:local` / `prefix:`."""
        line, col = self.line, self.col
        m = _WORD_RE.match(self.text[self.pos :])
        if not m:
            raise self.error(f"unexpected character {self._peek()!r}")
        word = m.group(0)
        self._advance(len(word))
        if self._peek() == ":":
            self._advance(1)
            local = self._read_local()
            self._emit("pname", f"{word}:{local}", line, col)
        else:
            self._emit("word", word, line, col)
        return

    def _read_local(self) -> str:
        out: list[str] = []
        while self.pos < len(self.text):
            ch = self._peek()
            if ch.isalnum() or ch in "_-":
                out.append(ch)
                self._advance(1)
            elif ch == "." and (self._peek(1).isalnum() or self._peek(1) in "_-."):
                # dots are allowed inside a local name but a trailing dot
                # terminates the statement
                out.append(ch)
                self._advance(1)
            else:
                break
        return "".join(out)


def tokenize(text: str) -> list[Token]:
    # a pname with an empty prefix like ":a" starts with ':', which _lex_name
    # cannot reach; handle by prepending nothing -- empty prefixes are not in
    # the subset and lex as an error.
    return Lexer(text).run()


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0
        self.prefixes: dict[str, Iri] = {}

    def at_end(self) -> bool:
        return self.i >= len(self.tokens)

    def peek(self) -> Optional[Token]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> Token:
        if self.at_end():
            last = self.tokens[-1] if self.tokens else Token("eof", "", 1, 1)
            raise ParseError(last.line, last.col, "unexpected end of input")
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(tok.line, tok.col, f"expected {kind}, found {tok.kind} ({tok.value!r})")
        return tok

    def resolve_pname(self, tok: Token) -> Iri:
        prefix, _, local = tok.value.partition(":")
        ns = self.prefixes.get(prefix)
        if ns is None:
            raise ParseError(tok.line, tok.col, f"undeclared prefix {prefix!r}")
        if local and not _PNAME_LOCAL_RE.match(local):
            raise ParseError(tok.line, tok.col, f"unsupported local name {local!r}")
        return Iri(ns.value + local)

    def make_iri(self, tok: Token) -> Iri:
        try:
            return Iri(tok.value)
        except ValueError as exc:
            raise ParseError(tok.line, tok.col, str(exc)) from None

    def parse_term(self, tok: Token, allow_literal: bool = True) -> Term:
        if tok.kind == "iriref":
            return self.make_iri(tok)
        if tok.kind == "pname":
            return self.resolve_pname(tok)
        if tok.kind == "bnode":
            return BlankNode(tok.value)
        if tok.kind == "word" and tok.value == "a":
            return Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")
        if not allow_literal:
            raise ParseError(tok.line, tok.col, f"expected IRI or blank node, found {tok.kind}")
        if tok.kind == "string":
            nxt = self.peek()
            if nxt is not None and nxt.kind == "langtag":
                self.next()
                return Literal(tok.value, lang=nxt.value)
            if nxt is not None and nxt.kind == "dhat":
                self.next()
                dt_tok = self.next()
                if dt_tok.kind == "iriref":
                    dt = self.make_iri(dt_tok)
                elif dt_tok.kind == "pname":
                    dt = self.resolve_pname(dt_tok)
                else:
                    raise ParseError(dt_tok.line, dt_tok.col, "datatype must be an IRI")
                return Literal(tok.value, datatype=dt)
            return Literal(tok.value)
        if tok.kind == "number":
            text = tok.value
            if re.search(r"[eE]", text):
                dt = Iri(_XSD + "double")
            elif "." in text:
                dt = Iri(_XSD + "decimal")
            else:
                dt = Iri(_XSD + "integer")
            return Literal(text, datatype=dt)
        if tok.kind == "word" and tok.value in ("true", "false"):
            return Literal(tok.value, datatype=Iri(_XSD + "boolean"))
        if tok.kind in ("lbracket", "lparen"):
            kind = "collection '('" if tok.kind == "lparen" else "anonymous blank node '['"
            raise UnsupportedFeature(tok.line, tok.col, kind)
        raise ParseError(tok.line, tok.col, f"unexpected {tok.kind} ({tok.value!r})")


def _parse_turtle(tokens: list[Token]) -> Graph:
    p = _Parser(tokens)
    triples: list[Triple] = []
    while not p.at_end():
        tok = p.next()
        if tok.kind == "prefix_directive" or (tok.kind == "word" and tok.value.upper() == "PREFIX"):
            label_tok = p.expect("pname")
            label, _, rest = label_tok.value.partition(":")
            if rest:
                raise ParseError(label_tok.line, label_tok.col, "prefix declaration must end with ':'")
            iri_tok = p.expect("iriref")
            p.prefixes[label] = p.make_iri(iri_tok)
            if tok.kind == "prefix_directive":
                p.expect("dot")
            continue
        if tok.kind == "word" and tok.value.upper() == "BASE":
            raise UnsupportedFeature(tok.line, tok.col, "BASE directive")
        subject = p.parse_term(tok, allow_literal=False)
        _parse_predicate_object_list(p, subject, triples)
        p.expect("dot")
    return Graph(triples, p.prefixes)


def _parse_predicate_object_list(p: _Parser, subject, triples: list[Triple]) -> None:
    while True:
        tok = p.next()
        pred = p.parse_term(tok, allow_literal=False)
        if not isinstance(pred, Iri):
            raise ParseError(tok.line, tok.col, "predicate must be an IRI")
        while True:
            obj = p.parse_term(p.next())
            triples.append(Triple(subject, pred, obj))
            nxt = p.peek()
            if nxt is not None and nxt.kind == "comma":
                p.next()
                continue
            break
        nxt = p.peek()
        if nxt is not None and nxt.kind == "semi":
            p.next()
            # a trailing ';' before '.' is legal
            after = p.peek()
            if after is not None and after.kind == "dot":
                return
            continue
        return


def _parse_ntriples(tokens: list[Token]) -> Graph:
    p = _Parser(tokens)
    triples: list[Triple] = []
    while not p.at_end():
        tok = p.next()
        if tok.kind == "pname" or tok.kind == "prefix_directive":
            raise ParseError(tok.line, tok.col, "prefixed names are not allowed in N-Triples")
        subject = p.parse_term(tok, allow_literal=False)
        pred_tok = p.next()
        if pred_tok.kind != "iriref":
            raise ParseError(pred_tok.line, pred_tok.col, "N-Triples predicate must be an IRI")
        pred = p.make_iri(pred_tok)
        obj_tok = p.next()
        if obj_tok.kind not in ("iriref", "bnode", "string"):
            raise ParseError(obj_tok.line, obj_tok.col, "invalid N-Triples object")
        obj = p.parse_term(obj_tok)
        triples.append(Triple(subject, pred, obj))
        p.expect("dot")
    return Graph(triples)


def parse_document(data: Union[bytes, str], format: str = "turtle") -> Graph:
    """Parse a Turtle or N-Triples document into a Graph.

    `data` may be UTF-8 bytes or text.  Blank node labels are preserved as
    parsed.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(1, 1, f"invalid UTF-8: {exc}") from None
    else:
        text = data
    if text.startswith("\ufeff"):
        text = text[1:]
    tokens = tokenize(text)
    if format == "turtle":
        return _parse_turtle(tokens)
    if format == "ntriples":
        return _parse_ntriples(tokens)
    raise ValueError(f"unknown format {format!r}")
