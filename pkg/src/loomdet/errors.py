"""Exception hierarchy shared across the package."""


class LoomdetError(Exception):
    """Base class for all package errors."""


# --- parameter / kernel construction ---

class NonPositiveSigma(LoomdetError):
    pass


class NonPositiveRadius(LoomdetError):
    pass


class InvalidWindow(LoomdetError):
    pass


class DegenerateLatency(LoomdetError):
    pass


# --- per-frame computation ---

class DimensionMismatch(LoomdetError):
    pass


class KernelTooLarge(LoomdetError):
    pass


class EmptyHistory(LoomdetError):
    pass


class NonPositiveDenominator(LoomdetError):
    pass


# --- analysis ---

class WindowOutOfRange(LoomdetError):
    pass


# --- stimulus generation ---

class ContactBeforeEnd(LoomdetError):
    pass


class ObjectOutOfView(LoomdetError):
    pass


# --- frame ingestion / configuration ---

class EmptyDirectory(LoomdetError):
    pass


class MixedDimensions(LoomdetError):
    pass


class UnreadableFrame(LoomdetError):
    pass


class InvalidFactor(LoomdetError):
    pass


class ConfigError(LoomdetError):
    pass
