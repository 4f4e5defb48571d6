"""Exception hierarchy shared across the package."""


class CcdhError(Exception):
    """Base class for every error raised by ccdhest."""


class ParameterError(CcdhError, ValueError):
    pass


class ParseError(CcdhError, ValueError):
    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class BoundsError(CcdhError, IndexError):
    pass


class UndefinedInputError(CcdhError, ValueError):
    pass


class StreamIntegrityError(CcdhError):
    pass


class InvariantError(CcdhError, ValueError):
    pass


class GadgetValidationError(CcdhError):
    """A generated gadget does not have the structure its construction promises."""

    def __init__(self, claim, detail):
        self.claim = claim
        self.detail = detail
        super().__init__(f"{claim}: {detail}")
