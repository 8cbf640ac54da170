class MorphPieceError(Exception):
    """Raised for core failures; `code` names the core error, `line` is 0 when not applicable."""

    def __init__(self, code, line, message):
        super().__init__(message)
        self.code = code
        self.line = line


_BY_CODE = {}


def _subclass(code):
    if code not in _BY_CODE:
        _BY_CODE[code] = type(code, (MorphPieceError,), {})
    return _BY_CODE[code]


def make_error(code, line, message):
    return _subclass(code)(code, line, message)
