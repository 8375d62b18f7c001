"""Text notation, diagram emitters and the command-line front end."""

from .diagrams import DiagramDoc, emit_partition_diagram, emit_structure_diagram, validate
from .dsl import SpecDocument, document_from_state, format_document, parse, tokenize
