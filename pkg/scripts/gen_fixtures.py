#!/usr/bin/env python3
"""Regenerate the derived fixtures under tests/fixtures/.

Hand-edited fixtures (source ontology excerpts, CSV tables, mapping,
shapes, queries, bundles) are NOT touched.  This script derives the
repetitive ones — the AAT excerpt, the two term manifests — so the term
lists stay consistent in one place.  Outputs are committed; rerunning must
be byte-stable.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

sys.path.insert(0, str(FIXTURES.parent.parent))  # for tests.oracles imports

CRM = "http://www.cidoc-crm.org/cidoc-crm/"
LRMOO = "http://iflastandards.info/ns/lrm/lrmoo/"
CRMDIG = "http://www.ics.forth.gr/isl/CRMdig/"
AAT = "http://vocab.getty.edu/aat/"

# ---------------------------------------------------------------------------
# Term selections
# ---------------------------------------------------------------------------

DESK_CLASSES_CRM = [
    "E35_Title",
    "E55_Type",
    "E52_Time-Span",
    "E7_Activity",
    "E39_Actor",
    "E73_Information_Object",
    "E42_Identifier",
    "E24_Physical_Human-Made_Thing",
    "E53_Place",
    "E21_Person",
    "E74_Group",
]
DESK_CLASSES_LRMOO = ["F1_Work", "F2_Expression", "F3_Manifestation", "F5_Item", "F28_Expression_Creation"]
DESK_CLASSES_CRMDIG = ["D2_Digitization_Process", "D9_Data_Object", "D8_Digital_Device", "D10_Software_Execution", "D14_Software"]

FULL_EXTRA_CLASSES_CRM = ["E41_Appellation", "E89_Propositional_Object", "E22_Human-Made_Object"]
FULL_EXTRA_CLASSES_CRMDIG = ["D1_Digital_Object"]

# The six properties the desk-scale prose names, tallied as plain
# "properties" there; the full profile categorises by stated OWL typing.
DESK_PROPERTIES_CRM = [
    "P82a_begin_of_the_begin",
    "P82b_end_of_the_end",
    "P82_at_some_time_within",
    "P70i_is_documented_in",
    "P3_has_note",
    "P46_is_composed_of",
]

FULL_OBJECT_PROPERTIES_CRM = [
    "P1_is_identified_by",
    "P2_has_type",
    "P4_has_time-span",
    "P7_took_place_at",
    "P9_consists_of",
    "P14_carried_out_by",
    "P16_used_specific_object",
    "P32_used_general_technique",
    "P46_is_composed_of",
    "P49_has_former_or_current_keeper",
    "P53_has_former_or_current_location",
    "P62_depicts",
    "P67_refers_to",
    "P70i_is_documented_in",
    "P102_has_title",
    "P125_used_object_of_type",
    "P129_is_about",
]
FULL_OBJECT_PROPERTIES_LRMOO = [
    "R3_is_realised_in",
    "R4_embodies",
    "R7_exemplifies",
    "R10_is_member_of",
    "R17_created",
    "R19_created_a_realisation_of",
]
FULL_OBJECT_PROPERTIES_CRMDIG = [
    "L1_digitized",
    "L10_had_input",
    "L11_had_output",
    "L12_happened_on_device",
    "L23_used_software_or_firmware",
]
FULL_DATA_PROPERTIES_CRM = [
    "P3_has_note",
    "P82_at_some_time_within",
    "P82a_begin_of_the_begin",
    "P82b_end_of_the_end",
    "P190_has_symbolic_content",
]

# AAT concepts named in the modelled scenario (id, label)
AAT_NAMED = [
    ("300417204", "original titles"),
    ("300417207", "exhibition titles"),
    ("300404387", "creating (artistic activity)"),
    ("300054196", "drawing (image-making)"),
    ("300404126", "subject (general concept)"),
    ("300435434", "copyright/licensing statements"),
    ("300054277", "curating"),
    ("300025976", "collections (object groupings)"),
    ("300053580", "photogrammetry"),
    ("300391312", "structured light scanning"),
    ("300266792", "digital cameras"),
    ("300429747", "structured light scanners"),
    ("300054636", "processing (function)"),
    ("300391447", "modelling (process)"),
    ("300386427", "optimisation"),
]

# Synthetic desk-scale stand-ins for further selected concepts; ids in a
# reserved-looking range so they cannot be mistaken for published ones.
AAT_STANDINS = [
    ("300200001", "illuminating (drawing technique)"),
    ("300200002", "woodcut (process)"),
    ("300200003", "printed books"),
    ("300200004", "manuscripts (documents)"),
    ("300200005", "shelf marks"),
    ("300200006", "inventory numbers"),
    ("300200007", "series (object groupings)"),
]
AAT_PADDING = [(f"3001{n:05d}", f"thesaurus concept 3001{n:05d}") for n in range(1, 60)]

AAT_ALL = AAT_NAMED + AAT_STANDINS + AAT_PADDING


def aat_iri(ident: str) -> str:
    return AAT + ident


def write_aat_source() -> None:
    lines = [
        "# Desk-scale excerpt of the Getty Art & Architecture Thesaurus:",
        "# the selected concepts only, as named individuals.",
        "",
        "@prefix aat:  <http://vocab.getty.edu/aat/> .",
        "@prefix owl:  <http://www.w3.org/2002/07/owl#> .",
        "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .",
        "",
    ]
    for ident, label in AAT_ALL:
        lines.append(f'aat:{ident} a owl:NamedIndividual ;')
        lines.append(f'    rdfs:label "{label}"@en .')
        lines.append("")
    (FIXTURES / "sources" / "aat.ttl").write_text("\n".join(lines), encoding="utf-8")


def entries(namespace: str, source: str, locals_: list[str]) -> list[dict]:
    return [{"iri": namespace + local, "source": source} for local in locals_]


def sources_block() -> dict:
    return {
        "crm": {"namespace": CRM, "document": "../sources/cidoc_crm.ttl"},
        "lrmoo": {"namespace": LRMOO, "document": "../sources/lrmoo.ttl"},
        "crmdig": {"namespace": CRMDIG, "document": "../sources/crmdig.ttl"},
        "aat": {"namespace": AAT, "document": "../sources/aat.ttl"},
    }


def write_manifests() -> None:
    desk = {
        "sources": sources_block(),
        "classes": (
            entries(CRM, "crm", DESK_CLASSES_CRM)
            + entries(LRMOO, "lrmoo", DESK_CLASSES_LRMOO)
            + entries(CRMDIG, "crmdig", DESK_CLASSES_CRMDIG)
        ),
        "object_properties": entries(CRM, "crm", DESK_PROPERTIES_CRM),
        "data_properties": [],
        "individuals": [{"iri": aat_iri(i), "source": "aat"} for i, _ in AAT_NAMED],
    }
    full = {
        "sources": sources_block(),
        "classes": (
            entries(CRM, "crm", DESK_CLASSES_CRM + FULL_EXTRA_CLASSES_CRM)
            + entries(LRMOO, "lrmoo", DESK_CLASSES_LRMOO)
            + entries(CRMDIG, "crmdig", DESK_CLASSES_CRMDIG + FULL_EXTRA_CLASSES_CRMDIG)
        ),
        "object_properties": (
            entries(CRM, "crm", FULL_OBJECT_PROPERTIES_CRM)
            + entries(LRMOO, "lrmoo", FULL_OBJECT_PROPERTIES_LRMOO)
            + entries(CRMDIG, "crmdig", FULL_OBJECT_PROPERTIES_CRMDIG)
        ),
        "data_properties": entries(CRM, "crm", FULL_DATA_PROPERTIES_CRM),
        "individuals": [{"iri": aat_iri(i), "source": "aat"} for i, _ in AAT_ALL],
    }
    out = FIXTURES / "manifests"
    out.mkdir(parents=True, exist_ok=True)
    for name, doc in (("chad_ap_desk.json", desk), ("chad_ap_full.json", full)):
        (out / name).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Iteration bundle manifests
#
# The eight bundles partition the full profile manifest: every term appears
# in at least one bundle, and the per-category set union over all bundles
# equals the full manifest exactly (asserted below).  A handful of terms are
# deliberately shared between bundles 1 and 2 because bundle 2's exemplar
# data re-states the item/manifestation chain it hangs digitisation off.
# ---------------------------------------------------------------------------

NAMESPACES = {"crm": CRM, "lrmoo": LRMOO, "crmdig": CRMDIG, "aat": AAT}

BUNDLE_PLAN: dict[int, dict] = {
    1: {
        "sources": ["crm", "lrmoo", "aat"],
        "classes": [
            ("lrmoo", "F1_Work"),
            ("lrmoo", "F2_Expression"),
            ("lrmoo", "F3_Manifestation"),
            ("lrmoo", "F5_Item"),
            ("lrmoo", "F28_Expression_Creation"),
            ("crm", "E35_Title"),
            ("crm", "E52_Time-Span"),
            ("crm", "E7_Activity"),
            ("crm", "E39_Actor"),
        ],
        "object_properties": [
            ("lrmoo", "R3_is_realised_in"),
            ("lrmoo", "R4_embodies"),
            ("lrmoo", "R7_exemplifies"),
            ("lrmoo", "R10_is_member_of"),
            ("lrmoo", "R17_created"),
            ("lrmoo", "R19_created_a_realisation_of"),
            ("crm", "P102_has_title"),
            ("crm", "P2_has_type"),
            ("crm", "P4_has_time-span"),
            ("crm", "P9_consists_of"),
            ("crm", "P14_carried_out_by"),
        ],
        "data_properties": [
            ("crm", "P190_has_symbolic_content"),
            ("crm", "P82_at_some_time_within"),
        ],
        "individuals": ["300417204", "300404387", "300200004"],
    },
    2: {
        "sources": ["crm", "lrmoo", "crmdig", "aat"],
        "classes": [
            ("crmdig", "D2_Digitization_Process"),
            ("crmdig", "D10_Software_Execution"),
            ("crmdig", "D9_Data_Object"),
            ("crmdig", "D8_Digital_Device"),
            ("crmdig", "D14_Software"),
            ("crm", "E21_Person"),
            ("crm", "E74_Group"),
            ("crm", "E52_Time-Span"),
            ("lrmoo", "F5_Item"),
            ("lrmoo", "F3_Manifestation"),
            ("lrmoo", "F2_Expression"),
        ],
        "object_properties": [
            ("crmdig", "L1_digitized"),
            ("crmdig", "L10_had_input"),
            ("crmdig", "L11_had_output"),
            ("crmdig", "L12_happened_on_device"),
            ("crmdig", "L23_used_software_or_firmware"),
            ("crm", "P32_used_general_technique"),
            ("crm", "P2_has_type"),
            ("crm", "P4_has_time-span"),
            ("crm", "P14_carried_out_by"),
            ("lrmoo", "R4_embodies"),
            ("lrmoo", "R7_exemplifies"),
        ],
        "data_properties": [
            ("crm", "P82a_begin_of_the_begin"),
            ("crm", "P82b_end_of_the_end"),
        ],
        "individuals": ["300053580", "300266792", "300054636", "300200004"],
    },
    3: {
        "sources": ["crm", "aat"],
        "classes": [("crm", "E42_Identifier"), ("crm", "E41_Appellation")],
        "object_properties": [("crm", "P1_is_identified_by")],
        "data_properties": [("crm", "P3_has_note")],
        "individuals": ["300200005", "300200006"],
    },
    4: {
        "sources": ["crm", "aat"],
        "classes": [("crm", "E73_Information_Object"), ("crm", "E89_Propositional_Object")],
        "object_properties": [("crm", "P129_is_about"), ("crm", "P67_refers_to")],
        "data_properties": [],
        "individuals": ["300404126"],
    },
    5: {
        "sources": ["crm", "aat"],
        "classes": [("crm", "E24_Physical_Human-Made_Thing"), ("crm", "E53_Place")],
        "object_properties": [
            ("crm", "P46_is_composed_of"),
            ("crm", "P49_has_former_or_current_keeper"),
            ("crm", "P53_has_former_or_current_location"),
            ("crm", "P7_took_place_at"),
        ],
        "data_properties": [],
        "individuals": ["300025976"],
    },
    6: {
        "sources": ["crm", "aat"],
        "classes": [("crm", "E22_Human-Made_Object")],
        "object_properties": [("crm", "P62_depicts"), ("crm", "P70i_is_documented_in")],
        "data_properties": [],
        "individuals": ["300435434"],
    },
    7: {
        "sources": ["crm", "aat"],
        "classes": [("crm", "E55_Type")],
        "object_properties": [("crm", "P16_used_specific_object"), ("crm", "P125_used_object_of_type")],
        "data_properties": [],
        "individuals": ["300054277"],
    },
    8: {
        "sources": ["crmdig", "aat"],
        "classes": [("crmdig", "D1_Digital_Object")],
        "object_properties": [],
        "data_properties": [],
        # every selected concept not claimed by an earlier bundle
        "individuals": None,
    },
}


def bundle_sources_block(source_ids: list[str]) -> dict:
    docs = {
        "crm": "cidoc_crm.ttl",
        "lrmoo": "lrmoo.ttl",
        "crmdig": "crmdig.ttl",
        "aat": "aat.ttl",
    }
    return {
        sid: {"namespace": NAMESPACES[sid], "document": f"../../sources/{docs[sid]}"}
        for sid in source_ids
    }


def write_bundle_manifests() -> None:
    claimed = {
        ident
        for plan in BUNDLE_PLAN.values()
        if plan["individuals"] is not None
        for ident in plan["individuals"]
    }
    leftovers = [ident for ident, _ in AAT_ALL if ident not in claimed]
    union: dict[str, set] = {
        "classes": set(),
        "object_properties": set(),
        "data_properties": set(),
        "individuals": set(),
    }
    for number, plan in sorted(BUNDLE_PLAN.items()):
        individuals = plan["individuals"] if plan["individuals"] is not None else leftovers
        doc = {
            "sources": bundle_sources_block(plan["sources"]),
            "classes": [
                {"iri": NAMESPACES[src] + local, "source": src}
                for src, local in plan["classes"]
            ],
            "object_properties": [
                {"iri": NAMESPACES[src] + local, "source": src}
                for src, local in plan["object_properties"]
            ],
            "data_properties": [
                {"iri": NAMESPACES[src] + local, "source": src}
                for src, local in plan["data_properties"]
            ],
            "individuals": [{"iri": aat_iri(i), "source": "aat"} for i in individuals],
        }
        for category in union:
            union[category].update(entry["iri"] for entry in doc[category])
        directory = FIXTURES / "bundles" / f"iteration-{number}"
        directory.mkdir(parents=True, exist_ok=True)
        (directory / "manifest.json").write_text(
            json.dumps(doc, indent=2) + "\n", encoding="utf-8"
        )

    # The bundles must partition the full manifest: per-category set union
    # over all eight bundles equals the full selection exactly.
    full = json.loads((FIXTURES / "manifests" / "chad_ap_full.json").read_text("utf-8"))
    for category in union:
        expected = {entry["iri"] for entry in full[category]}
        assert union[category] == expected, (
            category,
            sorted(union[category] ^ expected),
        )


def write_expected_results() -> None:
    """Expected query answers, evaluated brute-force over the triple tally."""
    from tests.oracles import bruteforce, tally
    from tests.oracles.cq_specs import QUERIES

    tables = FIXTURES / "tables"
    union, _ = tally.tally_dataset(
        (tables / "objects.csv").read_text(encoding="utf-8"),
        (tables / "process.csv").read_text(encoding="utf-8"),
        (tables / "vocab.csv").read_text(encoding="utf-8"),
    )
    out = FIXTURES / "queries"
    out.mkdir(parents=True, exist_ok=True)
    for name, spec in QUERIES.items():
        rows = bruteforce.solve(spec, union)
        (out / f"{name}.tsv").write_text(bruteforce.as_tsv(spec, rows), encoding="utf-8")


def main() -> None:
    write_aat_source()
    write_manifests()
    write_bundle_manifests()
    write_expected_results()
    counts = {
        "desk": (
            len(DESK_CLASSES_CRM) + len(DESK_CLASSES_LRMOO) + len(DESK_CLASSES_CRMDIG),
            len(DESK_PROPERTIES_CRM),
            0,
            len(AAT_NAMED),
        ),
        "full": (
            len(DESK_CLASSES_CRM) + len(FULL_EXTRA_CLASSES_CRM) + len(DESK_CLASSES_LRMOO)
            + len(DESK_CLASSES_CRMDIG) + len(FULL_EXTRA_CLASSES_CRMDIG),
            len(FULL_OBJECT_PROPERTIES_CRM) + len(FULL_OBJECT_PROPERTIES_LRMOO) + len(FULL_OBJECT_PROPERTIES_CRMDIG),
            len(FULL_DATA_PROPERTIES_CRM),
            len(AAT_ALL),
        ),
    }
    print(json.dumps(counts))


if __name__ == "__main__":
    main()
