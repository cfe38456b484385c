"""Exception hierarchy.

Three top-level families map onto CLI exit codes: UsageError (2),
DataError (3), TransportError (4).
"""


class ProsePoetError(Exception):
    exit_code = 1


class UsageError(ProsePoetError):
    exit_code = 2


class DataError(ProsePoetError):
    exit_code = 3


class TransportError(ProsePoetError):
    exit_code = 4


class CorpusError(DataError):
    pass


class EmptyCorpusError(CorpusError):
    pass


class LexiconError(DataError):
    pass


class ExtractionError(DataError):
    pass


class MissingWordError(DataError):
    pass


class ArtifactError(DataError):
    """Missing, corrupt, or version-mismatched resource artifact."""


class UnplaceableKeywordError(DataError):
    def __init__(self, keyword):
        super().__init__(f"keyword {keyword!r} has zero frequency at every index 1..10")
        self.keyword = keyword


class ShortfallError(DataError):
    def __init__(self, deficit):
        super().__init__(f"cannot re-augment keyword pool: {deficit} keyword(s) short")
        self.deficit = deficit


class InfeasiblePartitionError(DataError):
    pass


class InsufficientRhymesError(DataError):
    pass


class NoMaskError(DataError):
    pass


class DecodingStuckError(DataError):
    pass


class StageError(DataError):
    """Wraps an error raised inside a named pipeline stage."""

    def __init__(self, stage, cause):
        super().__init__(f"stage {stage!r}: {cause}")
        self.stage = stage
        self.cause = cause


class ProtocolError(TransportError):
    """Remote predictor answered with an invariant-violating payload."""


class RemoteHTTPError(TransportError):
    def __init__(self, status, detail=""):
        super().__init__(f"remote predictor returned HTTP {status}: {detail}")
        self.status = status


class RemoteBadRequestError(RemoteHTTPError):
    pass


class RemoteNoMaskError(RemoteHTTPError):
    pass


class RemoteUnavailableError(RemoteHTTPError):
    pass
