"""Exception types shared across the toolkit."""

from __future__ import annotations


class ChadError(Exception):
    """Base class for all toolkit errors."""


class ParseError(ChadError):
    """Malformed RDF input (Turtle or N-Triples)."""

    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"line {line}, column {column}: {message}")


class UnsupportedFeature(ChadError):
    """Turtle construct outside the supported subset (collections, quoted
    triples, anonymous blank nodes, base directives)."""

    def __init__(self, line: int, column: int, feature: str):
        self.line = line
        self.column = column
        self.feature = feature
        super().__init__(f"line {line}, column {column}: unsupported: {feature}")


class PrefixConflict(ChadError):
    """Same prefix label bound to two different namespaces during a merge."""

    def __init__(self, label: str, ns1: str, ns2: str):
        self.label = label
        self.ns1 = ns1
        self.ns2 = ns2
        super().__init__(f"prefix {label!r} bound to both <{ns1}> and <{ns2}>")


class BlankNodePresent(ChadError):
    """Graph comparison attempted on a graph that still contains blank nodes."""


class ManifestError(ChadError):
    """Structurally invalid term manifest."""


class SourceUnavailable(ChadError):
    """A source ontology document declared in the manifest cannot be read."""

    def __init__(self, source_id: str, path: str):
        self.source_id = source_id
        self.path = path
        super().__init__(f"source {source_id!r}: cannot read {path}")


class MissingInSource(ChadError):
    """A manifest term does not occur as a subject in its source ontology."""

    def __init__(self, term: str, source_id: str):
        self.term = term
        self.source_id = source_id
        super().__init__(f"{term} not found in source {source_id!r}")


class HeaderMismatch(ChadError):
    """CSV header row does not match the declared column schema."""

    def __init__(self, expected: list[str], found: list[str]):
        self.expected = expected
        self.found = found
        super().__init__(f"expected columns {expected}, found {found}")


class CsvSyntaxError(ChadError):
    """Malformed CSV input."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class MappingError(ChadError):
    """Invalid mapping configuration (minting policy or edge table)."""


class MintingCollision(ChadError):
    """Two distinct source keys slugified to the same minted IRI."""

    def __init__(self, kind: str, key1: str, key2: str):
        self.kind = kind
        self.key1 = key1
        self.key2 = key2
        super().__init__(f"{kind}: {key1!r} and {key2!r} mint the same IRI")


class UnresolvedReference(ChadError):
    """A record references a key that does not exist in the batch."""

    def __init__(self, kind: str, key: str):
        self.kind = kind
        self.key = key
        super().__init__(f"unresolved {kind} reference: {key!r}")


class ShapeSchemaError(ChadError):
    """Invalid shapes document."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class QuerySyntaxError(ChadError):
    """Malformed competency-question query."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class UnboundVariable(ChadError):
    """A selected, filtered, or ordering variable never occurs in a pattern."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"variable ?{name} does not appear in any pattern")


class ExpectedFileMalformed(ChadError):
    """Expected-results TSV cannot be interpreted."""


class BundleLayoutError(ChadError):
    """A test-case bundle directory is missing a required file."""

    def __init__(self, missing: str):
        self.missing = missing
        super().__init__(f"bundle is missing {missing}")
