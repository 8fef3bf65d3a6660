"""Exception types shared across the engine modules.

Every error carries a machine-readable ``code`` (snake_case discriminant)
used verbatim in service error bodies and CLI messages.
"""


class EmbexError(Exception):
    """Base class for all engine errors."""

    code = "error"


# --- model I/O ---------------------------------------------------------

class MalformedHeader(EmbexError):
    code = "malformed_header"


class DimensionMismatch(EmbexError):
    code = "dimension_mismatch"

    def __init__(self, line_no: int):
        self.line_no = line_no
        super().__init__(f"wrong number of vector components on line {line_no}")


class DuplicateToken(EmbexError):
    code = "duplicate_token"

    def __init__(self, token: str):
        self.token = token
        super().__init__(f"token appears more than once: {token!r}")


class NonFiniteValue(EmbexError):
    code = "non_finite_value"

    def __init__(self, line_no: int):
        self.line_no = line_no
        super().__init__(f"non-finite vector component on line/record {line_no}")


class TruncatedFile(EmbexError):
    code = "truncated_file"


class IoFailure(EmbexError):
    code = "io_failure"


# --- queries -----------------------------------------------------------

class OutOfVocabulary(EmbexError):
    code = "out_of_vocabulary"

    def __init__(self, token: str, where: str = ""):
        self.token = token
        self.where = where
        suffix = f" ({where})" if where else ""
        super().__init__(f"token not in vocabulary{suffix}: {token!r}")


class ZeroVector(EmbexError):
    code = "zero_vector"


class LengthMismatch(EmbexError):
    code = "length_mismatch"


# --- t-SNE -------------------------------------------------------------

class PerplexityTooLarge(EmbexError):
    code = "perplexity_too_large"


class DegenerateInput(EmbexError):
    code = "degenerate_input"


# --- graphs ------------------------------------------------------------

class NodeNotInGraph(EmbexError):
    code = "node_not_in_graph"

    def __init__(self, token: str):
        self.token = token
        super().__init__(f"node not in graph: {token!r}")


class NodeCapExceeded(EmbexError):
    code = "node_cap_exceeded"


# --- training ----------------------------------------------------------

class MalformedRecord(EmbexError):
    code = "malformed_record"

    def __init__(self, line_no: int, reason: str = ""):
        self.line_no = line_no
        detail = f": {reason}" if reason else ""
        super().__init__(f"malformed corpus record on line {line_no}{detail}")


class EmptyVocab(EmbexError):
    code = "empty_vocab"
