"""CSV ingestion: the object catalogue and the process log.

Both tables are RFC-4180 CSV with a fixed, documented header.  Cells that
describe several entities hold `;`-separated entries, with `|` separating
the fields inside one entry (for example a creator cell of
``"Ulisse Aldrovandi|creating|drawing technique"``).  Binding turns raw
rows into typed records, resolving controlled-vocabulary tokens to their
concept IRIs and collecting one error per defect instead of aborting.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from chadkit.errors import CsvSyntaxError, HeaderMismatch
from chadkit.rdf import Iri

OBJECT_COLUMNS = [
    "object_id",
    "titles",
    "parent_work",
    "parent_work_type",
    "date",
    "creators",
    "subjects",
    "manifestation_type",
    "license_statement",
    "license_document",
    "item_description",
    "identifiers",
    "depicts",
    "keeper",
    "collection",
    "collection_place",
    "components",
]

PROCESS_COLUMNS = [
    "stage",
    "object_id",
    "input_data",
    "output_data",
    "start",
    "end",
    "persons",
    "groups",
    "techniques",
    "devices",
    "software",
    "license_statement",
    "license_document",
]

SCHEMAS = {"object": OBJECT_COLUMNS, "process": PROCESS_COLUMNS}

ACQUISITION = "acquisition"

_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")
_DATETIME_RE = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}$")


@dataclass(frozen=True)
class TimeSpan:
    begin: Optional[str] = None
    end: Optional[str] = None
    fuzzy: Optional[str] = None

    def __post_init__(self):
        if self.fuzzy is None and (self.begin is None or self.end is None):
            raise ValueError("time span needs either both exact bounds or a fuzzy label")
        if self.begin is not None and self.end is not None and self.begin > self.end:
            raise ValueError(f"time span begins after it ends: {self.begin} > {self.end}")

    @property
    def exact(self) -> bool:
        return self.begin is not None and self.end is not None


@dataclass(frozen=True)
class ObjectRecord:
    object_id: str
    titles: tuple[tuple[str, str], ...]  # (text, kind), kind in {original, exhibition}
    parent_work: Optional[tuple[str, Iri]]  # (key, work-type concept)
    timespan: TimeSpan
    creation_activities: tuple[tuple[str, Iri, Optional[Iri]], ...]  # (agent, role, technique)
    subjects: tuple[str, ...]
    manifestation_type: Iri
    license: tuple[str, Iri]  # (statement text, document)
    item_description: Optional[str]
    identifiers: tuple[tuple[str, Iri], ...]  # (value, type concept)
    depicts: tuple[str, ...]
    keeper: Optional[str]
    collection: Optional[tuple[str, Optional[str]]]  # (name, optional place)
    components: tuple[str, ...]


@dataclass(frozen=True)
class ProcessRecord:
    stage: Optional[Iri]  # None for acquisition, else the stage concept
    stage_token: str
    object_id: str
    input_data: Optional[str]
    output_data: str
    timespan: TimeSpan
    persons: tuple[str, ...]
    groups: tuple[str, ...]
    techniques: tuple[Iri, ...]
    devices: tuple[tuple[str, Iri], ...]  # (name, device-type concept)
    software: Optional[str]
    output_license: Optional[tuple[str, Iri]]

    @property
    def is_acquisition(self) -> bool:
        return self.stage is None


@dataclass(frozen=True)
class VocabularyTable:
    tokens: dict[str, Iri]

    def resolve(self, token: str) -> Optional[Iri]:
        return self.tokens.get(token)

    def iris(self) -> set[Iri]:
        return set(self.tokens.values())


@dataclass(frozen=True)
class IngestError:
    kind: str  # UnknownVocabularyToken | MissingRequired | InvariantViolation | DuplicateKey
    row: int  # 1-based file line (the header is line 1)
    column: Optional[str]
    message: str


def parse_table(data: Union[bytes, str], schema: str) -> list[list[str]]:
    """Read CSV bytes/text into raw rows, enforcing the schema header."""
    if schema not in SCHEMAS:
        raise ValueError(f"unknown schema {schema!r}")
    expected = SCHEMAS[schema]
    if isinstance(data, bytes):
        text = data.decode("utf-8-sig")
    else:
        text = data.lstrip("﻿")
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        rows = list(reader)
    except csv.Error as exc:
        raise CsvSyntaxError(reader.line_num, str(exc)) from None
    if not rows:
        raise HeaderMismatch(expected, [])
    header = rows[0]
    if header != expected:
        raise HeaderMismatch(expected, header)
    for index, row in enumerate(rows[1:], start=2):
        if len(row) != len(expected):
            raise CsvSyntaxError(index, f"expected {len(expected)} cells, found {len(row)}")
    return rows[1:]


def split_cell(cell: str, delimiter: str = ";") -> list[str]:
    """Split a multi-entity cell, trimming entries and dropping empties."""
    return [part.strip() for part in cell.split(delimiter) if part.strip()]


def load_vocabulary(path: Union[str, Path]) -> VocabularyTable:
    """Read the token → concept IRI table (CSV with a `token,iri` header)."""
    text = Path(path).read_text(encoding="utf-8-sig")
    reader = csv.reader(io.StringIO(text, newline=""))
    rows = list(reader)
    if not rows or rows[0] != ["token", "iri"]:
        raise HeaderMismatch(["token", "iri"], rows[0] if rows else [])
    tokens: dict[str, Iri] = {}
    for index, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise CsvSyntaxError(index, "expected 2 cells")
        token, iri_text = row[0].strip(), row[1].strip()
        if not token or not iri_text:
            raise CsvSyntaxError(index, "empty token or iri")
        if token in tokens:
            raise CsvSyntaxError(index, f"duplicate token {token!r}")
        try:
            tokens[token] = Iri(iri_text)
        except ValueError as exc:
            raise CsvSyntaxError(index, str(exc)) from None
    return VocabularyTable(tokens)


class _RowBinder:
    """Collects errors for one row; binding aborts softly on first defect."""

    def __init__(self, row_num: int, errors: list[IngestError]):
        self.row_num = row_num
        self.errors = errors
        self.failed = False

    def error(self, kind: str, column: Optional[str], message: str) -> None:
        self.errors.append(IngestError(kind, self.row_num, column, message))
        self.failed = True

    def require(self, value: str, column: str) -> str:
        if not value.strip():
            self.error("MissingRequired", column, f"column {column!r} must not be empty")
        return value.strip()

    def vocab(self, vocab: VocabularyTable, token: str, column: str) -> Optional[Iri]:
        iri = vocab.resolve(token)
        if iri is None:
            self.error("UnknownVocabularyToken", column, f"unknown vocabulary token {token!r}")
        return iri


def _parse_datetime(text: str) -> Optional[str]:
    """Normalize a date cell to an ISO date-time, or None if not exact."""
    import datetime

    text = text.strip()
    try:
        if _DATE_RE.match(text):
            datetime.date.fromisoformat(text)
            return text + "T00:00:00"
        if _DATETIME_RE.match(text):
            datetime.datetime.fromisoformat(text)
            return text
    except ValueError:
        return None
    return None


def _bind_timespan(cell: str, binder: _RowBinder, column: str) -> Optional[TimeSpan]:
    """Exact bounds from `A/B` or a single ISO value; anything else is fuzzy."""
    cell = cell.strip()
    if "/" in cell:
        left, _, right = cell.partition("/")
        begin, end = _parse_datetime(left), _parse_datetime(right)
        if begin is not None and end is not None:
            if begin > end:
                binder.error("InvariantViolation", column, f"span begins after it ends: {cell!r}")
                return None
            return TimeSpan(begin=begin, end=end)
        return TimeSpan(fuzzy=cell)
    single = _parse_datetime(cell)
    if single is not None:
        return TimeSpan(begin=single, end=single)
    return TimeSpan(fuzzy=cell)


def _split_entry(entry: str, arity: int) -> Optional[list[str]]:
    parts = [p.strip() for p in entry.split("|")]
    if len(parts) > arity:
        return None
    parts.extend([""] * (arity - len(parts)))
    return parts


def _bind_object_row(
    row: list[str], row_num: int, vocab: VocabularyTable, seen: set[str], errors: list[IngestError], delimiter: str
) -> Optional[ObjectRecord]:
    cells = dict(zip(OBJECT_COLUMNS, row))
    b = _RowBinder(row_num, errors)

    object_id = b.require(cells["object_id"], "object_id")
    if object_id and object_id in seen:
        b.error("DuplicateKey", "object_id", f"duplicate object_id {object_id!r}")

    titles: list[tuple[str, str]] = []
    for entry in split_cell(cells["titles"], delimiter):
        parts = _split_entry(entry, 2)
        if parts is None or not parts[0] or parts[1] not in ("original", "exhibition"):
            b.error("InvariantViolation", "titles", f"title entry must be 'text|original' or 'text|exhibition': {entry!r}")
            continue
        titles.append((parts[0], parts[1]))
    if not titles and not b.failed:
        b.error("MissingRequired", "titles", "at least one title is required")

    parent_work: Optional[tuple[str, Iri]] = None
    parent_key = cells["parent_work"].strip()
    parent_type = cells["parent_work_type"].strip()
    if bool(parent_key) != bool(parent_type):
        b.error("InvariantViolation", "parent_work", "parent_work and parent_work_type must be given together")
    elif parent_key:
        type_iri = b.vocab(vocab, parent_type, "parent_work_type")
        if type_iri is not None:
            parent_work = (parent_key, type_iri)

    timespan = _bind_timespan(b.require(cells["date"], "date"), b, "date")

    creators: list[tuple[str, Iri, Optional[Iri]]] = []
    for entry in split_cell(cells["creators"], delimiter):
        parts = _split_entry(entry, 3)
        if parts is None or not parts[0] or not parts[1]:
            b.error("InvariantViolation", "creators", f"creator entry must be 'name|role' or 'name|role|technique': {entry!r}")
            continue
        role = b.vocab(vocab, parts[1], "creators")
        technique = b.vocab(vocab, parts[2], "creators") if parts[2] else None
        if role is not None:
            creators.append((parts[0], role, technique))
    if not cells["creators"].strip():
        b.error("MissingRequired", "creators", "at least one creator is required")

    subjects = tuple(split_cell(cells["subjects"], delimiter))

    manifestation_type = None
    mtype_token = b.require(cells["manifestation_type"], "manifestation_type")
    if mtype_token:
        manifestation_type = b.vocab(vocab, mtype_token, "manifestation_type")

    license_pair = None
    statement = b.require(cells["license_statement"], "license_statement")
    document = b.require(cells["license_document"], "license_document")
    if statement and document:
        try:
            license_pair = (statement, Iri(document))
        except ValueError as exc:
            b.error("InvariantViolation", "license_document", str(exc))

    identifiers: list[tuple[str, Iri]] = []
    for entry in split_cell(cells["identifiers"], delimiter):
        parts = _split_entry(entry, 2)
        if parts is None or not parts[0] or not parts[1]:
            b.error("InvariantViolation", "identifiers", f"identifier entry must be 'value|type': {entry!r}")
            continue
        type_iri = b.vocab(vocab, parts[1], "identifiers")
        if type_iri is not None:
            identifiers.append((parts[0], type_iri))

    keeper = cells["keeper"].strip() or None
    collection: Optional[tuple[str, Optional[str]]] = None
    collection_name = cells["collection"].strip()
    collection_place = cells["collection_place"].strip()
    if collection_place and not collection_name:
        b.error("InvariantViolation", "collection_place", "collection_place requires a collection")
    elif collection_name:
        collection = (collection_name, collection_place or None)

    if b.failed or timespan is None or manifestation_type is None or license_pair is None:
        return None
    seen.add(object_id)
    return ObjectRecord(
        object_id=object_id,
        titles=tuple(titles),
        parent_work=parent_work,
        timespan=timespan,
        creation_activities=tuple(creators),
        subjects=subjects,
        manifestation_type=manifestation_type,
        license=license_pair,
        item_description=cells["item_description"].strip() or None,
        identifiers=tuple(identifiers),
        depicts=tuple(split_cell(cells["depicts"], delimiter)),
        keeper=keeper,
        collection=collection,
        components=tuple(split_cell(cells["components"], delimiter)),
    )


def _bind_process_row(
    row: list[str], row_num: int, vocab: VocabularyTable, seen_outputs: set[str], errors: list[IngestError], delimiter: str
) -> Optional[ProcessRecord]:
    cells = dict(zip(PROCESS_COLUMNS, row))
    b = _RowBinder(row_num, errors)

    stage_token = b.require(cells["stage"], "stage")
    stage: Optional[Iri] = None
    if stage_token and stage_token != ACQUISITION:
        stage = b.vocab(vocab, stage_token, "stage")

    object_id = b.require(cells["object_id"], "object_id")
    input_data = cells["input_data"].strip() or None
    output_data = b.require(cells["output_data"], "output_data")
    if output_data and output_data in seen_outputs:
        b.error("DuplicateKey", "output_data", f"duplicate output_data {output_data!r}")

    if stage_token == ACQUISITION and input_data is not None:
        b.error("InvariantViolation", "input_data", "acquisition stages take no input_data")
    if stage_token != ACQUISITION and input_data is None:
        b.error("InvariantViolation", "input_data", "software stages need exactly one input_data")

    start = b.require(cells["start"], "start")
    end = b.require(cells["end"], "end")
    timespan: Optional[TimeSpan] = None
    if start and end:
        begin, finish = _parse_datetime(start), _parse_datetime(end)
        if begin is None or finish is None:
            b.error("InvariantViolation", "start", "process stages need exact ISO date-time bounds")
        elif begin > finish:
            b.error("InvariantViolation", "start", f"span begins after it ends: {start!r} > {end!r}")
        else:
            timespan = TimeSpan(begin=begin, end=finish)

    persons = tuple(split_cell(cells["persons"], delimiter))
    groups = tuple(split_cell(cells["groups"], delimiter))
    if not persons and not groups and not b.failed:
        b.error("InvariantViolation", "persons", "each stage engages at least one agent")

    techniques: list[Iri] = []
    for token in split_cell(cells["techniques"], delimiter):
        iri = b.vocab(vocab, token, "techniques")
        if iri is not None:
            techniques.append(iri)

    devices: list[tuple[str, Iri]] = []
    for entry in split_cell(cells["devices"], delimiter):
        parts = _split_entry(entry, 2)
        if parts is None or not parts[0] or not parts[1]:
            b.error("InvariantViolation", "devices", f"device entry must be 'name|type': {entry!r}")
            continue
        type_iri = b.vocab(vocab, parts[1], "devices")
        if type_iri is not None:
            devices.append((parts[0], type_iri))

    software = cells["software"].strip() or None

    output_license: Optional[tuple[str, Iri]] = None
    statement = cells["license_statement"].strip()
    document = cells["license_document"].strip()
    if bool(statement) != bool(document):
        b.error("InvariantViolation", "license_statement", "license statement and document must be given together")
    elif statement:
        try:
            output_license = (statement, Iri(document))
        except ValueError as exc:
            b.error("InvariantViolation", "license_document", str(exc))

    if b.failed or timespan is None:
        return None
    seen_outputs.add(output_data)
    return ProcessRecord(
        stage=stage,
        stage_token=stage_token,
        object_id=object_id,
        input_data=input_data,
        output_data=output_data,
        timespan=timespan,
        persons=persons,
        groups=groups,
        techniques=tuple(techniques),
        devices=tuple(devices),
        software=software,
        output_license=output_license,
    )


def bind_records(
    rows: list[list[str]],
    schema: str,
    vocab: VocabularyTable,
    delimiter: str = ";",
) -> tuple[list[Union[ObjectRecord, ProcessRecord]], list[IngestError]]:
    """Bind raw rows to typed records, collecting all row errors."""
    records: list[Union[ObjectRecord, ProcessRecord]] = []
    errors: list[IngestError] = []
    seen: set[str] = set()
    for index, row in enumerate(rows, start=2):
        if schema == "object":
            record = _bind_object_row(row, index, vocab, seen, errors, delimiter)
        elif schema == "process":
            record = _bind_process_row(row, index, vocab, seen, errors, delimiter)
        else:
            raise ValueError(f"unknown schema {schema!r}")
        if record is not None:
            records.append(record)
    return records, errors
