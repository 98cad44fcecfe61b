"""afm-forge: synthesize maximal attributed feature models from configuration matrices."""

from .matrix import CellValue, ConfigurationMatrix, IngestionHints, column_domain, parse_matrix
from .knowledge import DecisionProvider, DefaultProvider, DomainKnowledge, load_dk
from .pipeline import SynthesisOptions, synthesize

__version__ = "0.1.0"

__all__ = [
    "CellValue",
    "ConfigurationMatrix",
    "IngestionHints",
    "column_domain",
    "parse_matrix",
    "DecisionProvider",
    "DefaultProvider",
    "DomainKnowledge",
    "load_dk",
    "SynthesisOptions",
    "synthesize",
    "__version__",
]
