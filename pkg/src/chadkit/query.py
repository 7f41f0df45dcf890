"""Competency-question queries: a small conjunctive pattern language.

The language is a strict subset of SPARQL SELECT: prefix declarations, a
basic graph pattern, two filter operators (equality and substring), and
optional DISTINCT / ORDER BY.  Execution follows standard conjunctive
semantics — a result row per variable assignment satisfying every pattern
and filter — with pattern reordering by candidate count as the only
strategy; output order is always deterministic.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from chadkit.errors import ExpectedFileMalformed, ParseError, QuerySyntaxError, UnboundVariable
from chadkit.namespaces import RDF_TYPE, XSD
from chadkit.rdf import Graph, Iri, Literal, term_nt
from chadkit.rdf.model import match_pattern
from chadkit.rdf.turtle import Lexer, Token


@dataclass(frozen=True)
class Var:
    name: str


PatternTerm = Union[Var, Iri, Literal]
Pattern = tuple[PatternTerm, PatternTerm, PatternTerm]


@dataclass(frozen=True)
class Filter:
    variable: str
    op: str  # "equals" | "contains"
    value: Union[Iri, Literal, str]  # str only for "contains"


@dataclass(frozen=True)
class Query:
    select: tuple[str, ...]
    patterns: tuple[Pattern, ...]
    filters: tuple[Filter, ...]
    distinct: bool
    order_by: tuple[str, ...]


@dataclass(frozen=True)
class ResultTable:
    header: tuple[str, ...]
    rows: tuple[tuple[Union[Iri, Literal], ...], ...]
    ordered: bool  # True when the query carried ORDER BY

    def __post_init__(self) -> None:
        for row in self.rows:
            if len(row) != len(self.header):
                raise ValueError("row width differs from header width")


_NUMBER_DATATYPES = {
    "integer": Iri(XSD + "integer"),
    "decimal": Iri(XSD + "decimal"),
    "double": Iri(XSD + "double"),
}


def _number_literal(text: str) -> Literal:
    if "e" in text.lower():
        return Literal(text, _NUMBER_DATATYPES["double"])
    if "." in text:
        return Literal(text, _NUMBER_DATATYPES["decimal"])
    return Literal(text, _NUMBER_DATATYPES["integer"])


class _QueryParser:
    def __init__(self, text: str):
        self.tokens = Lexer(text).run()
        self.pos = 0
        self.prefixes: dict[str, str] = {}

    # --- token plumbing -------------------------------------------------
    def _peek(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self) -> Token:
        token = self._peek()
        if token is None:
            last = self.tokens[-1] if self.tokens else Token("", "", 1, 1)
            raise QuerySyntaxError(last.line, "unexpected end of query")
        self.pos += 1
        return token

    def _expect(self, kind: str, what: str) -> Token:
        token = self._next()
        if token.kind != kind:
            raise QuerySyntaxError(token.line, f"expected {what}, found {token.value!r}")
        return token

    def _keyword(self, token: Token) -> str:
        return token.value.upper() if token.kind == "word" else ""

    def _at_keyword(self, *words: str) -> bool:
        token = self._peek()
        return token is not None and token.kind == "word" and token.value.upper() in words

    # --- terms ----------------------------------------------------------
    def _resolve_pname(self, token: Token) -> Iri:
        prefix, _, local = token.value.partition(":")
        ns = self.prefixes.get(prefix)
        if ns is None:
            raise QuerySyntaxError(token.line, f"undeclared prefix {prefix!r}")
        try:
            return Iri(ns + local)
        except ValueError as exc:
            raise QuerySyntaxError(token.line, str(exc)) from None

    def _literal(self, token: Token) -> Literal:
        # optional language tag or datatype follows the string token
        nxt = self._peek()
        if nxt is not None and nxt.kind == "langtag":
            self._next()
            return Literal(token.value, lang=nxt.value)
        if nxt is not None and nxt.kind == "dhat":
            self._next()
            dt_token = self._next()
            if dt_token.kind == "iriref":
                return Literal(token.value, Iri(dt_token.value))
            if dt_token.kind == "pname":
                return Literal(token.value, self._resolve_pname(dt_token))
            raise QuerySyntaxError(dt_token.line, "datatype must be an IRI")
        return Literal(token.value)

    def _term(self, token: Token, *, as_predicate: bool = False) -> PatternTerm:
        if token.kind == "var":
            return Var(token.value)
        if token.kind == "iriref":
            try:
                return Iri(token.value)
            except ValueError as exc:
                raise QuerySyntaxError(token.line, str(exc)) from None
        if token.kind == "pname":
            return self._resolve_pname(token)
        if token.kind == "word" and token.value == "a":
            return RDF_TYPE
        if not as_predicate:
            if token.kind == "string":
                return self._literal(token)
            if token.kind == "number":
                return _number_literal(token.value)
            if token.kind == "word" and token.value in ("true", "false"):
                return Literal(token.value, Iri(XSD + "boolean"))
        raise QuerySyntaxError(token.line, f"unexpected term {token.value!r}")

    # --- grammar --------------------------------------------------------
    def parse(self) -> Query:
        while self._at_keyword("PREFIX"):
            self._next()
            label_token = self._expect("pname", "prefix label")
            label, _, rest = label_token.value.partition(":")
            if rest:
                raise QuerySyntaxError(label_token.line, "prefix label must end with ':'")
            iri_token = self._expect("iriref", "namespace IRI")
            self.prefixes[label] = iri_token.value

        select_token = self._next()
        if self._keyword(select_token) != "SELECT":
            raise QuerySyntaxError(select_token.line, "query must start with SELECT")
        distinct = False
        if self._at_keyword("DISTINCT"):
            self._next()
            distinct = True
        select: list[str] = []
        while True:
            token = self._peek()
            if token is not None and token.kind == "var":
                select.append(self._next().value)
            else:
                break
        if not select:
            line = select_token.line
            raise QuerySyntaxError(line, "SELECT needs at least one variable")

        where_token = self._next()
        if self._keyword(where_token) != "WHERE":
            raise QuerySyntaxError(where_token.line, "expected WHERE")
        self._expect("lbrace", "'{'")

        patterns: list[Pattern] = []
        filters: list[Filter] = []
        while True:
            token = self._peek()
            if token is None:
                raise QuerySyntaxError(where_token.line, "unterminated WHERE block")
            if token.kind == "rbrace":
                self._next()
                break
            if self._at_keyword("FILTER"):
                filters.append(self._filter())
                continue
            patterns.append(self._pattern())

        order_by: list[str] = []
        if self._at_keyword("ORDER"):
            self._next()
            by = self._next()
            if self._keyword(by) != "BY":
                raise QuerySyntaxError(by.line, "expected BY after ORDER")
            while True:
                token = self._peek()
                if token is not None and token.kind == "var":
                    order_by.append(self._next().value)
                else:
                    break
            if not order_by:
                raise QuerySyntaxError(by.line, "ORDER BY needs at least one variable")

        trailing = self._peek()
        if trailing is not None:
            raise QuerySyntaxError(trailing.line, f"unexpected trailing {trailing.value!r}")

        query = Query(
            select=tuple(select),
            patterns=tuple(patterns),
            filters=tuple(filters),
            distinct=distinct,
            order_by=tuple(order_by),
        )
        _check_bound(query)
        return query

    def _pattern(self) -> Pattern:
        first = self._next()
        subject = self._term(first)
        if isinstance(subject, Literal):
            raise QuerySyntaxError(first.line, "literal in subject position")
        predicate = self._term(self._next(), as_predicate=True)
        obj = self._term(self._next())
        self._expect("dot", "'.' after pattern")
        return (subject, predicate, obj)

    def _filter(self) -> Filter:
        self._next()  # consume FILTER
        self._expect("lparen", "'(' after FILTER")
        token = self._next()
        if token.kind == "var":
            eq = self._next()
            if eq.kind != "eq":
                raise QuerySyntaxError(eq.line, "expected '=' in FILTER")
            value_token = self._next()
            value = self._term(value_token)
            if isinstance(value, Var):
                raise QuerySyntaxError(value_token.line, "FILTER compares against a constant")
            out = Filter(token.value, "equals", value)
        elif token.kind == "word" and token.value.upper() == "CONTAINS":
            self._expect("lparen", "'(' after CONTAINS")
            var_token = self._expect("var", "variable in CONTAINS")
            self._expect("comma", "',' in CONTAINS")
            needle = self._expect("string", "string in CONTAINS")
            self._expect("rparen", "')' closing CONTAINS")
            out = Filter(var_token.value, "contains", needle.value)
        else:
            raise QuerySyntaxError(token.line, "FILTER must be '?v = term' or CONTAINS(?v, \"text\")")
        self._expect("rparen", "')' closing FILTER")
        token = self._peek()
        if token is not None and token.kind == "dot":
            self._next()
        return out


def _check_bound(query: Query) -> None:
    in_patterns = {
        term.name
        for pattern in query.patterns
        for term in pattern
        if isinstance(term, Var)
    }
    for name in query.select:
        if name not in in_patterns:
            raise UnboundVariable(name)
    for f in query.filters:
        if f.variable not in in_patterns:
            raise UnboundVariable(f.variable)
    for name in query.order_by:
        if name not in in_patterns:
            raise UnboundVariable(name)


def parse_query(text: Union[str, bytes]) -> Query:
    """Parse query text into a Query, enforcing variable boundness."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        return _QueryParser(text).parse()
    except ParseError as exc:
        # lexical errors surface with the query error type
        raise QuerySyntaxError(exc.line, exc.message) from None


def _substitute(term: PatternTerm, binding: dict):
    if isinstance(term, Var):
        return binding.get(term.name)
    return term


def _extend(binding: dict, pattern: Pattern, triple) -> Optional[dict]:
    out = binding
    for term, value in zip(pattern, (triple.subject, triple.predicate, triple.object)):
        if isinstance(term, Var):
            bound = out.get(term.name)
            if bound is None:
                if out is binding:
                    out = dict(binding)
                out[term.name] = value
            elif bound != value:
                return None
    return out


def execute(query: Query, graph: Graph) -> ResultTable:
    """Run a query over a graph; rows come out in canonical order."""
    # Reorder patterns by ascending candidate count (fewer matches first).
    def wildcard(term: PatternTerm):
        return None if isinstance(term, Var) else term

    counted = sorted(
        query.patterns,
        key=lambda p: len(match_pattern(graph, wildcard(p[0]), wildcard(p[1]), wildcard(p[2]))),
    )

    solutions: list[dict] = [{}]
    for pattern in counted:
        next_solutions: list[dict] = []
        for binding in solutions:
            s = _substitute(pattern[0], binding)
            p = _substitute(pattern[1], binding)
            o = _substitute(pattern[2], binding)
            for triple in match_pattern(graph, s, p, o):
                extended = _extend(binding, pattern, triple)
                if extended is not None:
                    next_solutions.append(extended)
        solutions = next_solutions
        if not solutions:
            break

    def keep(binding: dict) -> bool:
        for f in query.filters:
            value = binding[f.variable]
            if f.op == "equals":
                if value != f.value:
                    return False
            else:  # contains
                if not isinstance(value, Literal) or f.value not in value.lexical:
                    return False
        return True

    kept = [binding for binding in solutions if keep(binding)]

    def sort_key(binding: dict):
        primary = tuple(term_nt(binding[name]) for name in query.order_by)
        tie = tuple(term_nt(binding[name]) for name in query.select)
        return (primary, tie)

    kept.sort(key=sort_key)

    rows = [tuple(binding[name] for name in query.select) for binding in kept]
    if query.distinct:
        seen = set()
        unique = []
        for row in rows:
            if row not in seen:
                seen.add(row)
                unique.append(row)
        rows = unique
    return ResultTable(
        header=tuple(query.select),
        rows=tuple(rows),
        ordered=bool(query.order_by),
    )


def format_results(table: ResultTable) -> str:
    """Render a result table as TSV with canonical N-Triples terms."""
    lines = ["\t".join(table.header)]
    for row in table.rows:
        lines.append("\t".join(term_nt(cell) for cell in row))
    return "\n".join(lines) + "\n"


def compare_results(actual: ResultTable, expected: Union[str, Path, bytes]) -> list[str]:
    """Diff a result table against an expected TSV file.

    Returns diff lines; empty means the results match.  Row order matters
    only when the query carried ORDER BY (``actual.ordered``).
    """
    if isinstance(expected, Path):
        try:
            text = expected.read_text(encoding="utf-8")
        except OSError as exc:
            raise ExpectedFileMalformed(str(exc)) from None
    elif isinstance(expected, bytes):
        text = expected.decode("utf-8")
    else:
        text = expected

    lines = text.split("\n")
    while lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ExpectedFileMalformed("expected file has no header row")
    expected_header = tuple(lines[0].split("\t"))
    width = len(expected_header)
    expected_rows: list[tuple[str, ...]] = []
    for number, line in enumerate(lines[1:], start=2):
        cells = tuple(line.split("\t"))
        if len(cells) != width:
            raise ExpectedFileMalformed(
                f"line {number}: expected {width} fields, found {len(cells)}"
            )
        expected_rows.append(cells)

    diff: list[str] = []
    if expected_header != actual.header:
        diff.append(
            "header mismatch: expected "
            + "\t".join(expected_header)
            + " | got "
            + "\t".join(actual.header)
        )
        return diff

    actual_rows = [tuple(term_nt(cell) for cell in row) for row in actual.rows]
    if actual.ordered:
        for index, (want, got) in enumerate(zip(expected_rows, actual_rows), start=1):
            if want != got:
                diff.append(
                    f"row {index}: expected " + "\t".join(want) + " | got " + "\t".join(got)
                )
        for extra in expected_rows[len(actual_rows):]:
            diff.append("missing row: " + "\t".join(extra))
        for extra in actual_rows[len(expected_rows):]:
            diff.append("unexpected row: " + "\t".join(extra))
    else:
        want_counts = Counter(expected_rows)
        got_counts = Counter(actual_rows)
        for row in sorted(want_counts - got_counts):
            diff.append("missing row: " + "\t".join(row))
        for row in sorted(got_counts - want_counts):
            diff.append("unexpected row: " + "\t".join(row))
    return diff
