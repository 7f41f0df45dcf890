"""Namespace IRIs and frequently used vocabulary terms.

CRM is CIDOC-CRM, LRMOO its library-reference extension, CRMDIG its
digitisation-provenance extension, and AAT the Getty Art & Architecture
Thesaurus.  The toolkit never fetches these over the network; local excerpt
documents are declared per manifest.
"""

from __future__ import annotations

from chadkit.rdf.model import Iri

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
OWL = "http://www.w3.org/2002/07/owl#"
XSD = "http://www.w3.org/2001/XMLSchema#"

CRM = "http://www.cidoc-crm.org/cidoc-crm/"
LRMOO = "http://iflastandards.info/ns/lrm/lrmoo/"
CRMDIG = "http://www.ics.forth.gr/isl/CRMdig/"
AAT = "http://vocab.getty.edu/aat/"

RDF_TYPE = Iri(RDF + "type")
RDF_LANGSTRING = Iri(RDF + "langString")

RDFS_LABEL = Iri(RDFS + "label")
RDFS_COMMENT = Iri(RDFS + "comment")
RDFS_SUBCLASSOF = Iri(RDFS + "subClassOf")
RDFS_SUBPROPERTYOF = Iri(RDFS + "subPropertyOf")
RDFS_DOMAIN = Iri(RDFS + "domain")
RDFS_RANGE = Iri(RDFS + "range")
RDFS_ISDEFINEDBY = Iri(RDFS + "isDefinedBy")

OWL_CLASS = Iri(OWL + "Class")
OWL_OBJECT_PROPERTY = Iri(OWL + "ObjectProperty")
OWL_DATATYPE_PROPERTY = Iri(OWL + "DatatypeProperty")
OWL_NAMED_INDIVIDUAL = Iri(OWL + "NamedIndividual")

XSD_STRING = Iri(XSD + "string")
XSD_BOOLEAN = Iri(XSD + "boolean")
XSD_INTEGER = Iri(XSD + "integer")
XSD_DECIMAL = Iri(XSD + "decimal")
XSD_DOUBLE = Iri(XSD + "double")
XSD_DATE = Iri(XSD + "date")
XSD_DATETIME = Iri(XSD + "dateTime")

# Prefix map used by shipped fixtures and default CLI output.
STANDARD_PREFIXES = {
    "rdf": Iri(RDF),
    "rdfs": Iri(RDFS),
    "owl": Iri(OWL),
    "xsd": Iri(XSD),
    "crm": Iri(CRM),
    "lrmoo": Iri(LRMOO),
    "crmdig": Iri(CRMDIG),
    "aat": Iri(AAT),
}


def crm_term(local: str) -> Iri:
    return Iri(CRM + local)


def lrmoo_term(local: str) -> Iri:
    return Iri(LRMOO + local)


def crmdig_term(local: str) -> Iri:
    return Iri(CRMDIG + local)


def aat_term(local: str) -> Iri:
    return Iri(AAT + local)
