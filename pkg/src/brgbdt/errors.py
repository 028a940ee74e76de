"""Exception types raised across the package."""


class BrgbdtError(Exception):
    """Base class for all package errors."""


class ConfigError(BrgbdtError, ValueError):
    pass


class EmptyFile(BrgbdtError, ValueError):
    pass


class MalformedLine(BrgbdtError, ValueError):
    def __init__(self, line_no, reason=""):
        self.line_no = line_no
        msg = f"malformed line {line_no}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class DimensionMismatch(BrgbdtError, ValueError):
    pass


class EmptyCorpus(BrgbdtError, ValueError):
    pass


class InvalidThreshold(BrgbdtError, ValueError):
    pass


class MissingVector(BrgbdtError, KeyError):
    def __init__(self, doc_id):
        self.doc_id = doc_id
        super().__init__(f"no feature vector for document {doc_id!r}")

    def __str__(self):
        return self.args[0]


class EmptyTargets(BrgbdtError, ValueError):
    pass


class LengthMismatch(BrgbdtError, ValueError):
    pass


class UnknownLabel(BrgbdtError, ValueError):
    pass


class NonFiniteLoss(BrgbdtError, FloatingPointError):
    pass


class KTooLarge(BrgbdtError, ValueError):
    pass


class TooFewInstances(BrgbdtError, ValueError):
    pass
