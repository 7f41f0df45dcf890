"""Lowering bound records into an RDF graph.

The shape of the emitted graph is fixed by two configuration objects read
from ``mapping.json``: a :class:`MintingPolicy` (how entity IRIs are built
from record keys) and an :class:`EdgeTable` (which class, property, and
concept IRIs the emitted triples use).  Conversion is per-record — a record
lowers to a self-contained triple set — and the dataset graph is the set
union over all records, so worker count and record order cannot change the
result.
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

from chadkit.errors import MappingError, MintingCollision, UnresolvedReference
from chadkit.ingest import ObjectRecord, ProcessRecord
from chadkit.namespaces import (
    AAT,
    CRM,
    CRMDIG,
    LRMOO,
    RDF,
    RDFS,
    RDF_TYPE,
    RDFS_LABEL,
    XSD,
)
from chadkit.profile import TermManifest
from chadkit.rdf import Graph, Iri, Literal, Triple

_SLUG_RE = re.compile(r"[^a-z0-9]+")
_SEGMENT_RE = re.compile(r"^[a-z][a-z0-9-]*$")

XSD_DATETIME = Iri(XSD + "dateTime")

DATASET_PREFIXES = {
    "crm": Iri(CRM),
    "lrmoo": Iri(LRMOO),
    "crmdig": Iri(CRMDIG),
    "aat": Iri(AAT),
    "rdf": Iri(RDF),
    "rdfs": Iri(RDFS),
    "xsd": Iri(XSD),
}

#: Properties every emitted graph may use without the mapping declaring
#: them: typing and human-readable labelling.
AMBIENT_PROPERTIES = frozenset({RDF_TYPE, RDFS_LABEL})


def slugify(text: str) -> str:
    """Lowercase, replace non-alphanumeric runs with hyphens, trim."""
    return _SLUG_RE.sub("-", text.lower()).strip("-")


@dataclass(frozen=True)
class MintingPolicy:
    """How entity IRIs are built: ``{base}{segment}/{slug(key)}``."""

    base: str
    segments: Mapping[str, str]

    def __post_init__(self) -> None:
        Iri(self.base)  # validates shape
        if not self.base.endswith("/"):
            raise MappingError(f"minting base must end with '/': {self.base!r}")
        seen: dict[str, str] = {}
        for kind, segment in self.segments.items():
            if not _SEGMENT_RE.match(segment):
                raise MappingError(f"bad IRI segment for kind {kind!r}: {segment!r}")
            if segment in seen:
                raise MappingError(
                    f"kinds {seen[segment]!r} and {kind!r} share segment {segment!r}"
                )
            seen[segment] = kind

    def kinds(self) -> frozenset[str]:
        return frozenset(self.segments)


class Minter:
    """Mints IRIs under a policy and remembers which key produced each one.

    Two distinct keys of the same kind that slugify identically would merge
    silently into one node; the registry turns that into a
    :class:`MintingCollision` instead.
    """

    def __init__(self, policy: MintingPolicy):
        self.policy = policy
        self.registry: dict[tuple[str, str], str] = {}

    def mint(self, kind: str, key: str) -> Iri:
        segment = self.policy.segments.get(kind)
        if segment is None:
            raise MappingError(f"unknown minting kind {kind!r}")
        slugged = slugify(key)
        if not slugged:
            raise MintingCollision(kind, key, key)
        prior = self.registry.get((kind, slugged))
        if prior is None:
            self.registry[(kind, slugged)] = key
        elif prior != key:
            raise MintingCollision(kind, prior, key)
        return Iri(f"{self.policy.base}{segment}/{slugged}")

    def absorb(self, other: "Minter") -> None:
        """Merge another registry, raising on cross-registry collisions."""
        for (kind, slugged), key in other.registry.items():
            prior = self.registry.get((kind, slugged))
            if prior is None:
                self.registry[(kind, slugged)] = key
            elif prior != key:
                raise MintingCollision(kind, prior, key)


@dataclass(frozen=True)
class EdgeTable:
    """Named class, property, and concept IRIs used by the lowering."""

    classes: Mapping[str, Iri]
    properties: Mapping[str, Iri]
    constants: Mapping[str, Iri]

    def cls(self, name: str) -> Iri:
        try:
            return self.classes[name]
        except KeyError:
            raise MappingError(f"edge table has no class {name!r}") from None

    def prop(self, name: str) -> Iri:
        try:
            return self.properties[name]
        except KeyError:
            raise MappingError(f"edge table has no property {name!r}") from None

    def const(self, name: str) -> Iri:
        try:
            return self.constants[name]
        except KeyError:
            raise MappingError(f"edge table has no constant {name!r}") from None


_REQUIRED_KINDS = frozenset(
    {
        "work",
        "expression",
        "manifestation",
        "item",
        "activity",
        "timespan",
        "title",
        "identifier",
        "actor",
        "data_object",
        "device",
        "software",
        "concept",
        "statement",
        "collection",
        "place",
    }
)

_REQUIRED_CLASSES = frozenset(
    {
        "work",
        "expression",
        "manifestation",
        "item",
        "creation",
        "title",
        "identifier",
        "timespan",
        "activity",
        "actor",
        "person",
        "group",
        "information_object",
        "physical_thing",
        "place",
        "digitization",
        "software_execution",
        "data_object",
        "device",
        "software",
    }
)

_REQUIRED_PROPERTIES = frozenset(
    {
        "realised_in",
        "embodies",
        "exemplifies",
        "member_of",
        "created",
        "created_realisation_of",
        "has_title",
        "has_type",
        "identified_by",
        "has_timespan",
        "begin",
        "end",
        "within",
        "consists_of",
        "carried_out_by",
        "technique",
        "about",
        "documented_in",
        "note",
        "composed_of",
        "depicts",
        "used_object",
        "keeper",
        "located_in",
        "content",
        "digitized",
        "had_input",
        "had_output",
        "on_device",
        "used_software",
    }
)

_REQUIRED_CONSTANTS = frozenset(
    {
        "original_title",
        "exhibition_title",
        "subject",
        "license",
        "curating",
        "collection",
    }
)


def load_mapping(path: Union[str, Path]) -> tuple[MintingPolicy, EdgeTable]:
    """Read mapping.json into a minting policy and an edge table."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MappingError(f"{path}: {exc}") from None
    if not isinstance(doc, dict):
        raise MappingError(f"{path}: mapping must be a JSON object")
    for section in ("base", "segments", "classes", "properties", "constants"):
        if section not in doc:
            raise MappingError(f"{path}: missing section {section!r}")

    def iri_map(section: str, required: frozenset[str]) -> dict[str, Iri]:
        raw = doc[section]
        if not isinstance(raw, dict):
            raise MappingError(f"{path}: section {section!r} must be an object")
        missing = required - raw.keys()
        if missing:
            raise MappingError(f"{path}: {section} missing names {sorted(missing)}")
        out: dict[str, Iri] = {}
        for name, value in raw.items():
            try:
                out[name] = Iri(value)
            except (TypeError, ValueError) as exc:
                raise MappingError(f"{path}: {section}[{name!r}]: {exc}") from None
        return out

    segments = doc["segments"]
    if not isinstance(segments, dict) or _REQUIRED_KINDS - segments.keys():
        raise MappingError(f"{path}: segments must cover all minting kinds")
    policy = MintingPolicy(base=doc["base"], segments=dict(segments))
    table = EdgeTable(
        classes=iri_map("classes", _REQUIRED_CLASSES),
        properties=iri_map("properties", _REQUIRED_PROPERTIES),
        constants=iri_map("constants", _REQUIRED_CONSTANTS),
    )
    return policy, table


def check_mapping(table: EdgeTable, manifest: TermManifest) -> None:
    """Require every edge-table IRI to be a term the profile declares."""
    classes = {iri for iri, _ in manifest.classes}
    properties = {iri for iri, _ in manifest.object_properties}
    properties |= {iri for iri, _ in manifest.data_properties}
    individuals = {iri for iri, _ in manifest.individuals}
    for name, iri in sorted(table.classes.items()):
        if iri not in classes:
            raise MappingError(f"class {name!r} ({iri}) is not in the profile manifest")
    for name, iri in sorted(table.properties.items()):
        if iri not in properties:
            raise MappingError(f"property {name!r} ({iri}) is not in the profile manifest")
    for name, iri in sorted(table.constants.items()):
        if iri not in individuals:
            raise MappingError(f"constant {name!r} ({iri}) is not in the profile manifest")


def _label(node: Iri, text: str) -> Triple:
    return Triple(node, RDFS_LABEL, Literal(text))


def _typed(node: Iri, cls: Iri) -> Triple:
    return Triple(node, RDF_TYPE, cls)


def lower_object(record: ObjectRecord, table: EdgeTable, minter: Minter) -> Graph:
    """Lower one catalogue record to its work/expression/manifestation/item
    constellation."""
    oid = record.object_id
    work = minter.mint("work", oid)
    expression = minter.mint("expression", oid)
    manifestation = minter.mint("manifestation", oid)
    item = minter.mint("item", oid)
    t: list[Triple] = [
        _typed(work, table.cls("work")),
        _typed(expression, table.cls("expression")),
        _typed(manifestation, table.cls("manifestation")),
        _typed(item, table.cls("item")),
        Triple(work, table.prop("realised_in"), expression),
        Triple(manifestation, table.prop("embodies"), expression),
        Triple(item, table.prop("exemplifies"), manifestation),
    ]

    for text, kind in record.titles:
        title = minter.mint("title", f"{oid}-{kind}")
        concept = table.const("original_title" if kind == "original" else "exhibition_title")
        t += [
            Triple(work, table.prop("has_title"), title),
            _typed(title, table.cls("title")),
            Triple(title, table.prop("has_type"), concept),
            Triple(title, table.prop("content"), Literal(text)),
        ]

    if record.parent_work is not None:
        parent_key, parent_type = record.parent_work
        parent = minter.mint("work", parent_key)
        t += [
            Triple(work, table.prop("member_of"), parent),
            _typed(parent, table.cls("work")),
            Triple(parent, table.prop("has_type"), parent_type),
            _label(parent, parent_key),
        ]

    event = minter.mint("activity", f"{oid}-creation")
    span = minter.mint("timespan", f"{oid}-creation")
    t += [
        _typed(event, table.cls("creation")),
        Triple(event, table.prop("created"), expression),
        Triple(event, table.prop("created_realisation_of"), work),
        Triple(event, table.prop("has_timespan"), span),
        _typed(span, table.cls("timespan")),
    ]
    if record.timespan.exact:
        t += [
            Triple(span, table.prop("begin"), Literal(record.timespan.begin, XSD_DATETIME)),
            Triple(span, table.prop("end"), Literal(record.timespan.end, XSD_DATETIME)),
        ]
    else:
        t.append(Triple(span, table.prop("within"), Literal(record.timespan.fuzzy)))

    for index, (name, role, technique) in enumerate(record.creation_activities, start=1):
        activity = minter.mint("activity", f"{oid}-act-{index}")
        actor = minter.mint("actor", name)
        t += [
            Triple(event, table.prop("consists_of"), activity),
            _typed(activity, table.cls("activity")),
            Triple(activity, table.prop("has_type"), role),
            Triple(activity, table.prop("carried_out_by"), actor),
            _typed(actor, table.cls("actor")),
            _label(actor, name),
        ]
        if technique is not None:
            t.append(Triple(activity, table.prop("technique"), technique))

    for subject in record.subjects:
        concept = minter.mint("concept", subject)
        t += [
            Triple(expression, table.prop("about"), concept),
            _typed(concept, table.cls("information_object")),
            Triple(concept, table.prop("has_type"), table.const("subject")),
            _label(concept, subject),
        ]

    t.append(Triple(manifestation, table.prop("has_type"), record.manifestation_type))

    _statement_text, document = record.license
    statement = minter.mint("statement", f"{oid}-manifestation")
    t += [
        _typed(statement, table.cls("information_object")),
        Triple(statement, table.prop("has_type"), table.const("license")),
        Triple(statement, table.prop("about"), manifestation),
        Triple(statement, table.prop("documented_in"), document),
    ]

    if record.item_description is not None:
        t.append(Triple(item, table.prop("note"), Literal(record.item_description)))

    for index, (value, kind) in enumerate(record.identifiers, start=1):
        ident = minter.mint("identifier", f"{oid}-id-{index}")
        t += [
            Triple(item, table.prop("identified_by"), ident),
            _typed(ident, table.cls("identifier")),
            Triple(ident, table.prop("has_type"), kind),
            Triple(ident, table.prop("content"), Literal(value)),
        ]

    for depicted in record.depicts:
        t.append(Triple(item, table.prop("depicts"), minter.mint("expression", depicted)))

    keeper_node: Optional[Iri] = None
    if record.keeper is not None:
        curation = minter.mint("activity", f"{oid}-curation")
        keeper_node = minter.mint("actor", record.keeper)
        t += [
            _typed(curation, table.cls("activity")),
            Triple(curation, table.prop("has_type"), table.const("curating")),
            Triple(curation, table.prop("used_object"), item),
            Triple(curation, table.prop("carried_out_by"), keeper_node),
            _typed(keeper_node, table.cls("actor")),
            _label(keeper_node, record.keeper),
        ]

    if record.collection is not None:
        name, place = record.collection
        node = minter.mint("collection", name)
        t += [
            _typed(node, table.cls("physical_thing")),
            Triple(node, table.prop("has_type"), table.const("collection")),
            _label(node, name),
            Triple(node, table.prop("composed_of"), item),
        ]
        if keeper_node is not None:
            t.append(Triple(node, table.prop("keeper"), keeper_node))
        if place is not None:
            place_node = minter.mint("place", place)
            t += [
                Triple(node, table.prop("located_in"), place_node),
                _typed(place_node, table.cls("place")),
                _label(place_node, place),
            ]

    for component in record.components:
        t.append(Triple(item, table.prop("composed_of"), minter.mint("item", component)))

    return Graph(t, DATASET_PREFIXES)


def lower_process(record: ProcessRecord, table: EdgeTable, minter: Minter) -> Graph:
    """Lower one provenance-log row to its digitization or software-execution
    activity."""
    oid = record.object_id
    activity = minter.mint("activity", f"{oid}-{record.stage_token}")
    span = minter.mint("timespan", f"{oid}-{record.stage_token}")
    output = minter.mint("data_object", record.output_data)
    t: list[Triple] = []

    if record.is_acquisition:
        t += [
            _typed(activity, table.cls("digitization")),
            Triple(activity, table.prop("digitized"), minter.mint("item", oid)),
        ]
    else:
        t += [
            _typed(activity, table.cls("software_execution")),
            Triple(activity, table.prop("has_type"), record.stage),
            Triple(activity, table.prop("had_input"), minter.mint("data_object", record.input_data)),
        ]
        if record.software is not None:
            node = minter.mint("software", record.software)
            t += [
                Triple(activity, table.prop("used_software"), node),
                _typed(node, table.cls("software")),
                _label(node, record.software),
            ]

    t += [
        Triple(activity, table.prop("had_output"), output),
        _typed(output, table.cls("data_object")),
        _label(output, record.output_data),
        Triple(activity, table.prop("has_timespan"), span),
        _typed(span, table.cls("timespan")),
        Triple(span, table.prop("begin"), Literal(record.timespan.begin, XSD_DATETIME)),
        Triple(span, table.prop("end"), Literal(record.timespan.end, XSD_DATETIME)),
    ]

    for person in record.persons:
        node = minter.mint("actor", person)
        t += [
            Triple(activity, table.prop("carried_out_by"), node),
            _typed(node, table.cls("person")),
            _label(node, person),
        ]
    for group in record.groups:
        node = minter.mint("actor", group)
        t += [
            Triple(activity, table.prop("carried_out_by"), node),
            _typed(node, table.cls("group")),
            _label(node, group),
        ]

    for technique in record.techniques:
        t.append(Triple(activity, table.prop("technique"), technique))

    for name, kind in record.devices:
        node = minter.mint("device", name)
        t += [
            Triple(activity, table.prop("on_device"), node),
            _typed(node, table.cls("device")),
            Triple(node, table.prop("has_type"), kind),
            _label(node, name),
        ]

    if record.output_license is not None:
        _text, document = record.output_license
        statement = minter.mint("statement", record.output_data)
        t += [
            _typed(statement, table.cls("information_object")),
            Triple(statement, table.prop("has_type"), table.const("license")),
            Triple(statement, table.prop("about"), output),
            Triple(statement, table.prop("documented_in"), document),
        ]

    return Graph(t, DATASET_PREFIXES)


def _check_references(
    objects: Sequence[ObjectRecord], processes: Sequence[ProcessRecord]
) -> None:
    known = {record.object_id for record in objects}
    outputs = {record.output_data for record in processes}
    for record in objects:
        for depicted in record.depicts:
            if depicted not in known:
                raise UnresolvedReference("object", depicted)
        for component in record.components:
            if component not in known:
                raise UnresolvedReference("object", component)
    for record in processes:
        if record.object_id not in known:
            raise UnresolvedReference("object", record.object_id)
        if record.input_data is not None and record.input_data not in outputs:
            raise UnresolvedReference("data-object", record.input_data)


def convert_dataset(
    objects: Sequence[ObjectRecord],
    processes: Sequence[ProcessRecord],
    policy: MintingPolicy,
    table: EdgeTable,
    workers: int = 1,
) -> Graph:
    """Lower a whole batch to one graph: per-record lowering, set union.

    Cross-references (depicted and component objects, process subjects,
    input data keys) must resolve inside the batch.  The result is
    independent of ``workers`` and of record order by construction.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    _check_references(objects, processes)

    def lower_one(record: Union[ObjectRecord, ProcessRecord]) -> tuple[Graph, Minter]:
        minter = Minter(policy)
        if isinstance(record, ObjectRecord):
            return lower_object(record, table, minter), minter
        return lower_process(record, table, minter), minter

    records: list[Union[ObjectRecord, ProcessRecord]] = list(objects) + list(processes)
    if workers == 1:
        lowered = [lower_one(record) for record in records]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            lowered = list(pool.map(lower_one, records))

    combined = Minter(policy)
    triples: set[Triple] = set()
    for graph, minter in lowered:
        combined.absorb(minter)
        triples |= graph.triples
    return Graph(triples, DATASET_PREFIXES)
