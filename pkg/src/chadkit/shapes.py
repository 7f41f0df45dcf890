"""Shape validation for produced graphs.

Shapes are a small JSON vocabulary — per-class property constraints over
cardinality, node kind, datatype, enumerated values, and value typing —
sufficient to encode the structural rules the lowering promises.  Class
targeting is exact: a shape applies to the nodes explicitly typed with its
target class, with no subclass traversal, because lowered data always
carries explicit types.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Union

from chadkit.errors import ShapeSchemaError
from chadkit.namespaces import RDF_TYPE
from chadkit.rdf import Graph, Iri, Literal, term_nt

_NODE_KINDS = ("iri", "literal")

_CONSTRAINT_KEYS = {
    "path",
    "min_count",
    "max_count",
    "node_kind",
    "datatype",
    "value_in",
    "value_class",
}


@dataclass(frozen=True)
class PropertyConstraint:
    path: Iri
    node_kind: str  # "iri" | "literal"
    min_count: int = 0
    max_count: Optional[int] = None
    datatype: Optional[Iri] = None
    value_in: Optional[frozenset[Iri]] = None
    value_class: Optional[Iri] = None


@dataclass(frozen=True)
class Shape:
    id: str
    target_class: Iri
    constraints: tuple[PropertyConstraint, ...]


@dataclass(frozen=True)
class ShapeSet:
    shapes: tuple[Shape, ...]

    def __len__(self) -> int:
        return len(self.shapes)

    def __iter__(self):
        return iter(self.shapes)

    def target_classes(self) -> set[Iri]:
        return {shape.target_class for shape in self.shapes}

    def restrict(self, classes: Iterable[Iri]) -> "ShapeSet":
        """The subset of shapes whose target class is in ``classes``."""
        allowed = set(classes)
        return ShapeSet(tuple(s for s in self.shapes if s.target_class in allowed))


@dataclass(frozen=True)
class Violation:
    focus: Iri
    shape_id: str
    kind: str  # min_count | max_count | node_kind | datatype | value_in | value_class
    path: Iri
    message: str


@dataclass(frozen=True)
class ValidationReport:
    conforms: bool
    violations: tuple[Violation, ...]


def _constraint_from_json(raw: object, where: str, path_label: str) -> PropertyConstraint:
    if not isinstance(raw, dict):
        raise ShapeSchemaError(path_label, f"{where}: constraint must be an object")
    unknown = set(raw) - _CONSTRAINT_KEYS
    if unknown:
        raise ShapeSchemaError(path_label, f"{where}: unknown keys {sorted(unknown)}")
    if "path" not in raw:
        raise ShapeSchemaError(path_label, f"{where}: missing 'path'")
    if "node_kind" not in raw:
        raise ShapeSchemaError(path_label, f"{where}: missing 'node_kind'")

    def as_iri(key: str) -> Iri:
        try:
            return Iri(raw[key])
        except (TypeError, ValueError) as exc:
            raise ShapeSchemaError(path_label, f"{where}: {key}: {exc}") from None

    path = as_iri("path")
    node_kind = raw["node_kind"]
    if node_kind not in _NODE_KINDS:
        raise ShapeSchemaError(path_label, f"{where}: node_kind must be one of {_NODE_KINDS}")

    min_count = raw.get("min_count", 0)
    if not isinstance(min_count, int) or isinstance(min_count, bool) or min_count < 0:
        raise ShapeSchemaError(path_label, f"{where}: min_count must be a natural number")
    max_count = raw.get("max_count")
    if max_count is not None:
        if not isinstance(max_count, int) or isinstance(max_count, bool) or max_count < 0:
            raise ShapeSchemaError(path_label, f"{where}: max_count must be a natural number")
        if min_count > max_count:
            raise ShapeSchemaError(
                path_label, f"{where}: min_count {min_count} exceeds max_count {max_count}"
            )

    datatype = as_iri("datatype") if "datatype" in raw else None
    if datatype is not None and node_kind != "literal":
        raise ShapeSchemaError(path_label, f"{where}: datatype requires literal node kind")

    value_in: Optional[frozenset[Iri]] = None
    if "value_in" in raw:
        if node_kind != "iri":
            raise ShapeSchemaError(path_label, f"{where}: value_in requires iri node kind")
        values = raw["value_in"]
        if not isinstance(values, list) or not values:
            raise ShapeSchemaError(path_label, f"{where}: value_in must be a non-empty list")
        try:
            value_in = frozenset(Iri(v) for v in values)
        except (TypeError, ValueError) as exc:
            raise ShapeSchemaError(path_label, f"{where}: value_in: {exc}") from None

    value_class = as_iri("value_class") if "value_class" in raw else None
    if value_class is not None and node_kind != "iri":
        raise ShapeSchemaError(path_label, f"{where}: value_class requires iri node kind")

    return PropertyConstraint(
        path=path,
        node_kind=node_kind,
        min_count=min_count,
        max_count=max_count,
        datatype=datatype,
        value_in=value_in,
        value_class=value_class,
    )


def load_shapes(source: Union[str, Path, bytes]) -> ShapeSet:
    """Read a shapes document (path, or JSON text/bytes) into a ShapeSet."""
    if isinstance(source, Path):
        path_label = str(source)
        try:
            text = source.read_text(encoding="utf-8")
        except OSError as exc:
            raise ShapeSchemaError(path_label, str(exc)) from None
    elif isinstance(source, bytes):
        path_label = "<data>"
        text = source.decode("utf-8")
    else:
        # a str is a filesystem path if one exists there, else JSON text
        if "{" not in source and "\n" not in source:
            return load_shapes(Path(source))
        path_label = "<data>"
        text = source

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ShapeSchemaError(path_label, f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "shapes" not in doc:
        raise ShapeSchemaError(path_label, "document must be an object with a 'shapes' list")
    raw_shapes = doc["shapes"]
    if not isinstance(raw_shapes, list):
        raise ShapeSchemaError(path_label, "'shapes' must be a list")

    shapes: list[Shape] = []
    seen_ids: set[str] = set()
    for index, raw in enumerate(raw_shapes):
        where = f"shapes[{index}]"
        if not isinstance(raw, dict):
            raise ShapeSchemaError(path_label, f"{where}: shape must be an object")
        unknown = set(raw) - {"id", "target_class", "constraints"}
        if unknown:
            raise ShapeSchemaError(path_label, f"{where}: unknown keys {sorted(unknown)}")
        shape_id = raw.get("id")
        if not isinstance(shape_id, str) or not shape_id:
            raise ShapeSchemaError(path_label, f"{where}: missing or empty 'id'")
        if shape_id in seen_ids:
            raise ShapeSchemaError(path_label, f"{where}: duplicate shape id {shape_id!r}")
        seen_ids.add(shape_id)
        try:
            target = Iri(raw.get("target_class"))
        except (TypeError, ValueError) as exc:
            raise ShapeSchemaError(path_label, f"{where}: target_class: {exc}") from None
        raw_constraints = raw.get("constraints", [])
        if not isinstance(raw_constraints, list):
            raise ShapeSchemaError(path_label, f"{where}: 'constraints' must be a list")
        constraints: list[PropertyConstraint] = []
        seen_paths: set[Iri] = set()
        for cindex, rawc in enumerate(raw_constraints):
            constraint = _constraint_from_json(
                rawc, f"{where}.constraints[{cindex}]", path_label
            )
            if constraint.path in seen_paths:
                raise ShapeSchemaError(
                    path_label,
                    f"{where}: duplicate constraint path {constraint.path.value}",
                )
            seen_paths.add(constraint.path)
            constraints.append(constraint)
        shapes.append(Shape(id=shape_id, target_class=target, constraints=tuple(constraints)))
    return ShapeSet(tuple(shapes))


def _check_value(
    focus: Iri,
    shape: Shape,
    constraint: PropertyConstraint,
    value,
    typed: set[tuple[Iri, Iri]],
) -> list[Violation]:
    out: list[Violation] = []

    def bad(kind: str, message: str) -> None:
        out.append(Violation(focus, shape.id, kind, constraint.path, message))

    if constraint.node_kind == "iri":
        if not isinstance(value, Iri):
            bad("node_kind", f"value {term_nt(value)} is not an IRI")
            return out
    else:
        if not isinstance(value, Literal):
            bad("node_kind", f"value {term_nt(value)} is not a literal")
            return out

    if constraint.datatype is not None and value.datatype != constraint.datatype:
        bad(
            "datatype",
            f"value {term_nt(value)} does not have datatype {constraint.datatype.value}",
        )
    if constraint.value_in is not None and value not in constraint.value_in:
        bad("value_in", f"value {term_nt(value)} is not in the allowed set")
    if constraint.value_class is not None and (value, constraint.value_class) not in typed:
        bad(
            "value_class",
            f"value {term_nt(value)} is not typed {constraint.value_class.value}",
        )
    return out


def validate(graph: Graph, shapes: ShapeSet) -> ValidationReport:
    """Evaluate every shape over its explicitly-typed focus nodes.

    Read-only; the report lists each violation once, ordered by
    (focus, shape id, path, kind, message).
    """
    # Index the graph once: types and outgoing edges.
    typed: set[tuple[Iri, Iri]] = set()
    by_class: dict[Iri, list[Iri]] = {}
    outgoing: dict[tuple[Iri, Iri], list] = {}
    for t in graph:
        if not isinstance(t.subject, Iri):
            continue
        if t.predicate == RDF_TYPE and isinstance(t.object, Iri):
            typed.add((t.subject, t.object))
            by_class.setdefault(t.object, []).append(t.subject)
        outgoing.setdefault((t.subject, t.predicate), []).append(t.object)

    violations: list[Violation] = []
    for shape in shapes:
        for focus in by_class.get(shape.target_class, ()):
            for constraint in shape.constraints:
                values = outgoing.get((focus, constraint.path), [])
                count = len(values)
                if count < constraint.min_count:
                    violations.append(
                        Violation(
                            focus,
                            shape.id,
                            "min_count",
                            constraint.path,
                            f"found {count} values, need at least {constraint.min_count}",
                        )
                    )
                if constraint.max_count is not None and count > constraint.max_count:
                    violations.append(
                        Violation(
                            focus,
                            shape.id,
                            "max_count",
                            constraint.path,
                            f"found {count} values, allow at most {constraint.max_count}",
                        )
                    )
                for value in values:
                    violations.extend(_check_value(focus, shape, constraint, value, typed))

    unique = sorted(
        set(violations),
        key=lambda v: (v.focus.value, v.shape_id, v.path.value, v.kind, v.message),
    )
    return ValidationReport(conforms=not unique, violations=tuple(unique))


def report_text(report: ValidationReport) -> str:
    """Human-readable rendering of a validation report."""
    if report.conforms:
        return "conforms: true\n"
    lines = ["conforms: false", f"violations: {len(report.violations)}"]
    for v in report.violations:
        lines.append(
            f"- [{v.kind}] focus {v.focus.value} shape {v.shape_id} "
            f"path {v.path.value}: {v.message}"
        )
    return "\n".join(lines) + "\n"


def report_json(report: ValidationReport) -> str:
    """JSON rendering of a validation report."""
    doc = {
        "conforms": report.conforms,
        "violations": [
            {
                "focus": v.focus.value,
                "shape": v.shape_id,
                "kind": v.kind,
                "path": v.path.value,
                "message": v.message,
            }
            for v in report.violations
        ],
    }
    return json.dumps(doc, indent=2) + "\n"
