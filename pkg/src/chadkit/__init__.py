"""Toolkit for building and checking CHAD-AP knowledge graphs.

The package covers the full curation pipeline: a small RDF core (Turtle and
N-Triples), application-profile extraction from source ontologies, CSV
ingestion of catalogue and digitisation-process tables, deterministic
lowering of records into profile-conformant RDF, shape validation,
competency-question queries, and the iterative test harness that ties the
pieces together.
"""

__version__ = "0.1.0"
