"""okb: a small workbench for building domain ontologies from Ukrainian/Russian text.

The pipeline: load inflected-form dictionaries, ingest plain-text documents,
tag and link tokens with a shallow rule grammar, extract candidate terms by
part-of-speech patterns, let a human pick the terms that matter, draft an
ontology graph from the picked terms, and export it as KVP or OWL XML.
"""

from .errors import OkbError

__all__ = ["OkbError"]
__version__ = "0.1.0"
