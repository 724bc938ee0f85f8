"""Error types shared across the engine.

Every error carries a short machine-readable code so the CLI and the HTTP
service can map failures onto the closed {not_found, conflict, schema,
parameter, internal} set without string matching.
"""


class ArchlinkError(Exception):
    """Base class for engine errors."""

    code = "internal"

    def __init__(self, message: str, detail: dict | None = None):
        super().__init__(message)
        self.message = message
        self.detail = detail or {}


class NotFoundError(ArchlinkError):
    code = "not_found"


class ConflictError(ArchlinkError):
    code = "conflict"


class ReferentialError(ArchlinkError):
    """A statement or record points at an entity that is not in the store."""

    code = "schema"


class VocabularyError(ArchlinkError):
    """Predicate token outside the closed relation vocabulary."""

    code = "schema"


class KindError(ArchlinkError):
    """Text or statement attached to an entity of the wrong kind."""

    code = "schema"


class InvalidPairError(ArchlinkError):
    """Pair operations require two distinct historians."""

    code = "parameter"


class ParseError(ArchlinkError):
    code = "schema"

    def __init__(self, message: str, line: int | None = None, detail: dict | None = None):
        super().__init__(message, detail)
        self.line = line


class SchemaError(ArchlinkError):
    code = "schema"


class LabelError(ArchlinkError):
    """Annotation label outside {0, 0.5, 1}."""

    code = "schema"


class ParameterError(ArchlinkError):
    code = "parameter"


class MissingInputError(ArchlinkError):
    """A feature spec needs a table that was not supplied."""

    code = "parameter"


class IncompleteDataError(ArchlinkError):
    """Statistics requested on rows that lack annotations."""

    code = "parameter"


class ProvenanceError(ArchlinkError):
    """Datasets built from different store snapshots cannot be combined."""

    code = "conflict"


class DegenerateDataError(ArchlinkError):
    """Training data with a single class cannot fit a classifier."""

    code = "parameter"


class ConfigurationError(ArchlinkError):
    code = "parameter"


class ShapeError(ArchlinkError):
    code = "parameter"


class UnsupportedTableError(ArchlinkError):
    """Operation needs annotation columns the given table does not carry."""

    code = "parameter"
