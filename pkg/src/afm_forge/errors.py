"""Exception hierarchy. Every error names the pipeline stage it belongs to."""


class ForgeError(Exception):
    """Base class; carries a stage and a machine-readable code."""

    stage = "general"
    code = "Error"

    def __init__(self, message=""):
        super().__init__(message)
        self.message = message

    def __init_subclass__(cls, **kw):
        super().__init_subclass__(**kw)
        if "code" not in cls.__dict__:
            cls.code = cls.__name__


# --- matrix ingestion ---

class MatrixError(ForgeError):
    stage = "matrix-core"


class EmptyMatrix(MatrixError):
    pass


class RaggedRow(MatrixError):
    pass


class DuplicateRow(MatrixError):
    pass


class EmptyCell(MatrixError):
    pass


class MixedTypeColumn(MatrixError):
    pass


class DuplicateVariable(MatrixError):
    pass


class IndexOutOfRange(MatrixError):
    pass


# --- variable extraction ---

class ExtractionError(ForgeError):
    stage = "extraction"


class UnclassifiedColumn(ExtractionError):
    pass


class NullValueNotInDomain(ExtractionError):
    pass


class AmbiguousPresenceMapping(ExtractionError):
    pass


# --- domain knowledge ---

class SchemaError(ForgeError):
    stage = "knowledge"

    def __init__(self, message="", path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


# --- hierarchy and placement ---

class StructureError(ForgeError):
    stage = "structure"


class IllegalRoot(StructureError):
    pass


class IllegalParent(StructureError):
    pass


class IllegalPlacement(StructureError):
    pass


class Unreachable(StructureError):
    pass


# --- groups ---

class IllegalGroupChoice(ForgeError):
    stage = "variability"


# --- semantics ---

class SemanticsError(ForgeError):
    stage = "semantics"


class UnknownVariable(SemanticsError):
    pass


class BudgetExceeded(SemanticsError):
    pass
