"""Exception hierarchy shared by all netcov modules."""


class NetcovError(Exception):
    """Base class for every error raised by netcov."""


# network construction and points
class NetworkError(NetcovError, ValueError):
    pass


class DisconnectedNetwork(NetworkError):
    def __init__(self, components):
        self.components = [sorted(int(v) for v in c) for c in components]
        desc = "; ".join(
            "{" + ", ".join(map(str, c[:8])) + (", ..." if len(c) > 8 else "") + "}"
            for c in self.components
        )
        super().__init__(
            f"network has {len(self.components)} connected components: {desc}"
        )


class ZeroLengthEdge(NetworkError):
    pass


class DanglingVertexIndex(NetworkError):
    pass


class DuplicateEdge(NetworkError):
    pass


class OffsetOutOfRange(NetworkError):
    pass


# linear algebra
class FactorizationFailure(NetcovError, ArithmeticError):
    pass


class NotPositiveDefinite(NetcovError, ArithmeticError):
    pass


# kernels
class DomainError(NetcovError, ValueError):
    pass


class NonPositiveParameter(NetcovError, ValueError):
    pass


class NonPSDBeta(NetcovError, ValueError):
    pass


# simulation
class ResolutionTooCoarse(NetcovError, ValueError):
    pass


# inference
class OptimizationFailed(NetcovError, RuntimeError):
    pass


class InsufficientData(NetcovError, ValueError):
    pass
