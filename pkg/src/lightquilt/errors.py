"""Exception hierarchy shared by every stage of the pipeline."""


class LightQuiltError(Exception):
    """Base class for all errors raised by this package."""


# calibration
class MalformedDocument(LightQuiltError):
    pass


class MissingKey(LightQuiltError):
    def __init__(self, name):
        super().__init__(f"missing required calibration key {name!r}")
        self.name = name


class InvalidValue(LightQuiltError):
    def __init__(self, name, detail=""):
        msg = f"invalid value for {name!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.name = name


# lut / .map files
class QuiltTooLarge(LightQuiltError):
    pass


class BadMagic(LightQuiltError):
    pass


class TruncatedFile(LightQuiltError):
    pass


class DimensionMismatch(LightQuiltError):
    pass


# rasters
class EmptyImage(LightQuiltError):
    pass


# depth
class NonFiniteValue(LightQuiltError):
    pass


class ProviderUnavailable(LightQuiltError):
    pass


class UnreadableInput(LightQuiltError):
    pass


class ModelLoadFailure(LightQuiltError):
    pass


# view synthesis
class InvalidFov(LightQuiltError):
    pass


class InvalidDepthRange(LightQuiltError):
    pass


# inpainting
class MaskCoversEverything(LightQuiltError):
    pass


class NoKnownNeighbor(LightQuiltError):
    pass


class InpaintFailure(LightQuiltError):
    pass


# quilt
class WrongViewCount(LightQuiltError):
    pass


class TileDimensionMismatch(LightQuiltError):
    pass


class IndexOutOfRange(LightQuiltError, IndexError):
    pass


# pipeline
class MapNotFound(LightQuiltError):
    def __init__(self, path):
        super().__init__(f"lookup table not found: {path} (pass --build-map to create it)")
        self.path = path


class NoFrames(LightQuiltError):
    pass


class StageError(LightQuiltError):
    """Wraps a failure with the pipeline stage and input that produced it."""

    def __init__(self, stage, source, cause):
        super().__init__(f"[{stage}] {source}: {cause}")
        self.stage = stage
        self.source = source
        self.cause = cause
