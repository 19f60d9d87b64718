"""Exception hierarchy. Every error carries a short machine-readable ``code``."""


class GradedK1Error(Exception):
    code = "E_GENERIC"

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        out = {"code": self.code, "message": str(self)}
        if self.details:
            out["details"] = {k: str(v) for k, v in sorted(self.details.items())}
        return out


class GroupMismatchError(GradedK1Error):
    code = "E_GROUP_MISMATCH"


class RingMismatchError(GradedK1Error):
    code = "E_RING_MISMATCH"


class DegreeError(GradedK1Error):
    code = "E_DEGREE"


class FamilyError(GradedK1Error):
    code = "E_FAMILY"


class UnsupportedOperationError(GradedK1Error):
    code = "E_UNSUPPORTED"


class NotInvertibleError(GradedK1Error):
    code = "E_NOT_INVERTIBLE"


class WitnessUnavailableError(GradedK1Error):
    code = "E_NO_WITNESS"


class IdealError(GradedK1Error):
    code = "E_IDEAL"


class CertificateError(GradedK1Error):
    code = "E_CERTIFICATE"


class TruncatedError(GradedK1Error):
    """Raised when a computation needs a snapshot that hit its closure cap."""

    code = "E_TRUNCATED"


class JobError(GradedK1Error):
    code = "E_JOB"


class JobSyntaxError(JobError):
    code = "E_SYNTAX"
