"""Exception hierarchy shared by all melab modules."""


class MelabError(Exception):
    """Base class for library errors."""


class DomainError(MelabError, ValueError):
    """An argument lies outside the domain of a function (e.g. a non-positive eigenvalue)."""


class NotHermitianError(MelabError, ValueError):
    """A matrix expected to be Hermitian (or self-adjoint) is not, within tolerance."""


class DimensionError(MelabError, ValueError):
    pass


class EighConvergenceError(MelabError, ArithmeticError):
    """The Jacobi iteration hit its sweep cap before the off-diagonal mass vanished."""

    def __init__(self, residual, sweeps):
        super().__init__(
            f"Jacobi eigensolver did not converge in {sweeps} sweeps "
            f"(off-diagonal residual {residual:.3e})"
        )
        self.residual = residual
        self.sweeps = sweeps


class SingularDifferentialError(MelabError, ArithmeticError):
    """A Loewner matrix entry is (numerically) zero, so the Frechet differential is not invertible."""


class DegenerateKernelError(MelabError, ValueError):
    """The kernel (s - t)/(f(s) - f(t)) is undefined because f is constant (affine phi)."""


class NumericalInstabilityError(MelabError, ArithmeticError):
    pass


class SkipBudgetExceeded(MelabError, RuntimeError):
    """More trials were skipped than the checker allows."""
