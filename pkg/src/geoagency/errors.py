"""Exception hierarchy shared across the package.

Every error raised by library code derives from AgencyError so callers
(CLI, service) can map them to exit codes / HTTP statuses uniformly.
"""


class AgencyError(Exception):
    """Base class for all library errors."""


class ValidationError(AgencyError):
    """Bad input: the request can never succeed as stated."""


# -- geometry / workspace ---------------------------------------------------

class InvalidGeometry(ValidationError):
    pass


class OutOfRoi(ValidationError):
    pass


class SchemaError(ValidationError):
    """Persisted data does not match the expected format/version."""


# -- memory -----------------------------------------------------------------

class EmptyQuery(ValidationError):
    pass


class NotFound(AgencyError):
    pass


class AlreadyDeleted(AgencyError):
    pass


# -- embeddings -------------------------------------------------------------

class ZeroVector(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class EmptyIndex(AgencyError):
    pass


class KTooLarge(ValidationError):
    pass


# -- navigation -------------------------------------------------------------

class NoLayers(AgencyError):
    pass


class BudgetZero(ValidationError):
    pass


class AllNoData(AgencyError):
    pass


# -- perception -------------------------------------------------------------

class UnknownTask(ValidationError):
    pass


class CallBudgetExhausted(AgencyError):
    pass


# -- compute graphs ---------------------------------------------------------

class CycleDetected(ValidationError):
    pass


class UnknownOp(ValidationError):
    pass


class ParamSchemaError(ValidationError):
    pass


class MissingLayer(AgencyError):
    pass


class RuntimeOpError(AgencyError):
    def __init__(self, node_id: str, cause: str):
        super().__init__(f"node {node_id!r} failed: {cause}")
        self.node_id = node_id
        self.cause = cause


class BandMismatch(ValidationError):
    pass


class NoCellsCovered(AgencyError):
    pass


# -- propagation ------------------------------------------------------------

class EmptySeedSet(ValidationError):
    pass


class EmptyPool(AgencyError):
    pass


class StaleCandidate(AgencyError):
    pass


# -- attribution ------------------------------------------------------------

class MissingSourceLayer(AgencyError):
    pass


class FixtureMiss(AgencyError):
    pass


class UnsortedStack(ValidationError):
    pass


# -- dual modeling ----------------------------------------------------------

class SingleClass(ValidationError):
    pass


# -- sessions / benchmark ---------------------------------------------------

class CapabilityDenied(AgencyError):
    pass


class SpecInvalid(ValidationError):
    pass


class EmptySamples(ValidationError):
    pass


class ShapeMismatch(ValidationError):
    pass


class InvalidTransition(AgencyError):
    pass
