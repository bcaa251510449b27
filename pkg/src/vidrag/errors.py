"""Exception types shared across the package."""


class VidragError(Exception):
    """Base class for all vidrag errors."""

    code = "error"


# --- parsing / transcripts ---------------------------------------------------

class MalformedTimestamp(VidragError):
    code = "malformed_timestamp"

    def __init__(self, line_no: int, line: str):
        self.line_no = line_no
        self.line = line
        super().__init__(f"line {line_no}: unparseable time line: {line!r}")


class EmptyInput(VidragError):
    code = "empty_input"


class MalformedLine(VidragError):
    code = "malformed_line"

    def __init__(self, line_no: int, line: str):
        self.line_no = line_no
        self.line = line
        super().__init__(f"line {line_no}: not a rendered transcript line: {line!r}")


class InvalidParams(VidragError):
    code = "invalid_params"


class SchemaError(VidragError):
    code = "schema_error"

    def __init__(self, line_no: int, message: str, field: str | None = None):
        self.line_no = line_no
        self.field = field
        super().__init__(f"line {line_no}: {message}")


class DuplicateVideoId(VidragError):
    code = "duplicate_video_id"

    def __init__(self, video_id: str, line_no: int):
        self.video_id = video_id
        self.line_no = line_no
        super().__init__(f"line {line_no}: duplicate video_id {video_id!r}")


class EmptyCatalog(VidragError):
    code = "empty_catalog"


# --- providers ---------------------------------------------------------------

class ProviderError(VidragError):
    code = "provider_error"


class EmptyText(VidragError):
    code = "empty_text"

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"input text at index {index} is empty after trimming")


class DimensionMismatch(VidragError):
    code = "dimension_mismatch"


class PromptTooLong(VidragError):
    code = "prompt_too_long"


class FixtureMiss(VidragError):
    code = "fixture_miss"


# --- index -------------------------------------------------------------------

class EmptyIndex(VidragError):
    code = "empty_index"


class NoIndexableText(VidragError):
    code = "no_indexable_text"


class CorruptIndex(VidragError):
    code = "corrupt_index"


# --- evaluation --------------------------------------------------------------

class BadJudgeOutput(VidragError):
    code = "bad_judge_output"


class InsufficientQuestions(VidragError):
    code = "insufficient_questions"


class InsufficientDepth(VidragError):
    code = "insufficient_depth"


class EmptyTranscript(VidragError):
    code = "empty_transcript"


class EmptyContext(VidragError):
    code = "empty_context"


class JudgeFailureBudgetExceeded(VidragError):
    code = "judge_failure_budget_exceeded"


# --- service -----------------------------------------------------------------

class NoTools(VidragError):
    code = "no_tools"
