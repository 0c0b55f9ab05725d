"""Exception hierarchy shared by all fbwaves modules."""


class FBWavesError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(FBWavesError, ValueError):
    """Inconsistent or incomplete run configuration."""


# model
class NoBackwardRegion(FBWavesError, ValueError):
    """D_i <= 4 D_g: the diffusivity has no interval of negative values."""


class UndefinedAllee(FBWavesError, ValueError):
    """Intrinsic growth rate r is zero, so A = 1 - lambda_g / r is undefined."""


class DomainError(FBWavesError, ValueError):
    pass


# layer
class NoMaxwellPoint(FBWavesError):
    pass


class DegenerateFold(FBWavesError, ValueError):
    pass


class NoTripleRoot(FBWavesError, ValueError):
    pass


# phase plane
class DegenerateSeed(FBWavesError, ValueError):
    pass


class ManifoldEscape(FBWavesError):
    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class NoCrossing(FBWavesError):
    def __init__(self, c, line=None):
        super().__init__(f"no first crossing of u={line} at c={c}")
        self.c = c
        self.line = line


class NoSpeedInBracket(FBWavesError):
    pass


# pde
class NonConvergence(FBWavesError):
    pass


class NoFront(FBWavesError):
    pass


# bvp
class NoConvergence(FBWavesError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class MeshOverflow(FBWavesError):
    pass
