"""Phase functions, contextuality certification and group cohomology for group-input MBQC."""

__version__ = "0.1.0"

from .errors import GMBQCError, InvariantError, SizeGuardError  # noqa: E402
from .fixtures import builtin  # noqa: E402
from .obsset import ObservableSet, compute_V  # noqa: E402
from .pauli import Pauli  # noqa: E402

__all__ = ["GMBQCError", "InvariantError", "SizeGuardError", "ObservableSet", "Pauli", "builtin", "compute_V", "__version__"]
