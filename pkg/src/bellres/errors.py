"""Exception hierarchy shared by all bellres modules."""


class BellresError(Exception):
    """Base class for all bellres errors."""


class NotHermitian(BellresError):
    """Input matrix violates the Hermitian symmetry tolerance."""


class DimMismatch(BellresError):
    """Operands have incompatible dimensions."""


class DimensionOverflow(BellresError):
    """Tensor product would exceed the dense-matrix size cap (256)."""


class BadSubsystem(BellresError):
    """Subsystem index is invalid for the given dimension list."""


class NotUnit(BellresError):
    """Bloch vector is not normalized."""


class NotDichotomic(BellresError):
    """Observable does not have +/-1 eigenvalues."""


class TooLargeToEnumerate(BellresError):
    """Deterministic-strategy enumeration would exceed the cap."""


class OutOfRange(BellresError):
    """Scalar argument outside its documented domain."""


class Infeasible(BellresError):
    """No quantum state can satisfy the requested constraint."""


class InfeasibleConstraint(BellresError):
    """Sampler constraint value lies outside the feasible set."""


class NotBellDiagonal(BellresError):
    """Operator is not diagonal in any maximally entangled basis."""


class SolverFailure(BellresError):
    """Convex solver failed to converge; message carries diagnostics."""
