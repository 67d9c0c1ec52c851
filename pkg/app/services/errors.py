"""Exception hierarchy shared by the graph, solver and pipeline services."""
from typing import Optional, Tuple


class WntvError(Exception):
    """Base class for every failure raised by this package."""


# Input / configuration ------------------------------------------------------

class InputError(WntvError):
    """Caller supplied a file, buffer or option that cannot be used."""


class ConfigValidationError(InputError):
    """One or more RunConfig fields are invalid."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


class ImageFormatError(InputError):
    """Netpbm file could not be decoded."""


class MalformedHeaderError(ImageFormatError):
    pass


class UnsupportedDepthError(ImageFormatError):
    pass


class TruncatedPayloadError(ImageFormatError):
    pass


class IdxFormatError(InputError):
    """MNIST IDX file could not be decoded."""


class MagicNumberError(IdxFormatError):
    def __init__(self, path: str, expected: int, found: int):
        self.expected = expected
        self.found = found
        super().__init__(f"{path}: magic number 0x{found:08x}, expected 0x{expected:08x}")


class IdxTruncatedError(IdxFormatError):
    pass


class CountMismatchError(IdxFormatError):
    def __init__(self, images: int, labels: int):
        self.images = images
        self.labels = labels
        super().__init__(f"image file holds {images} records but label file holds {labels}")


# Graph construction ---------------------------------------------------------

class GraphError(WntvError):
    """Weight graph cannot be built from the given cloud."""


class NotEnoughNeighborsError(GraphError):
    def __init__(self, k: int, n: int):
        self.k = k
        self.n = n
        super().__init__(f"k={k} neighbors requested but the cloud has only {n} points")


class NonFiniteInputError(GraphError):
    pass


class DegenerateBandwidthError(GraphError):
    """sigma(x) is zero: the r-th neighbor of a point coincides with it."""

    def __init__(self, index: int, r_sigma: int, pixel: Optional[Tuple[int, int]] = None):
        self.index = index
        self.r_sigma = r_sigma
        self.pixel = pixel
        where = f"point {index}" if pixel is None else f"point {index} (pixel {pixel})"
        super().__init__(
            f"sigma is zero at {where}: its {r_sigma}-th neighbor is a duplicate; "
            "deduplicate the data or raise r_sigma"
        )


# Solvers --------------------------------------------------------------------

class SolverError(WntvError):
    """A variational solve could not produce a solution."""


class SingularSystemError(SolverError):
    def __init__(self, component_size: int):
        self.component_size = component_size
        super().__init__(
            f"a connected component of {component_size} unlabeled points has no labeled point; "
            "the pinned system is singular"
        )


class ConvergenceError(SolverError):
    def __init__(self, residual: float, iterations: int, tol: float):
        self.residual = residual
        self.iterations = iterations
        self.tol = tol
        super().__init__(
            f"conjugate gradient stopped at relative residual {residual:.3e} "
            f"after {iterations} iterations (tol {tol:.1e})"
        )


class DivergenceError(SolverError):
    pass


class EvaluationError(WntvError):
    """Nothing to evaluate, or an empty observation set."""
