"""Exception hierarchy shared by every module of the package."""


class HsvrError(Exception):
    """Base class for all errors raised by hsvrkit."""


class InvalidSignal(HsvrError, ValueError):
    pass


class InvalidMatrix(HsvrError, ValueError):
    pass


class OracleTooLarge(HsvrError, ValueError):
    pass


class InvalidTrainingSet(HsvrError, ValueError):
    pass


class EmptyScales(HsvrError, ValueError):
    pass


class NonUniformGrid(HsvrError, ValueError):
    pass


class NoOscillatoryContent(HsvrError):
    """The spectral support is empty, so no kernel scale can be derived."""


class InvalidEmbedding(HsvrError, ValueError):
    pass


class DegenerateData(HsvrError, ValueError):
    pass


class UnknownFunction(HsvrError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown function"


class ParseError(HsvrError, ValueError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class LayerTrainingError(HsvrError):
    """Wraps a solver failure with the index of the layer that raised it."""

    def __init__(self, layer_index, cause):
        super().__init__(f"layer {layer_index}: {cause}")
        self.layer_index = layer_index
        self.cause = cause
