"""Exception hierarchy.  :class:`DomainError` marks mathematically degenerate
or inapplicable analyses (as opposed to malformed input)."""


class DomainError(Exception):
    pass


class NonHolomorphicError(DomainError):
    """An activation is not complex-differentiable at the equilibrium."""

    def __init__(self, component: int, z: complex):
        self.component = component
        self.z = z
        super().__init__(
            f"activation of neuron {component + 1} is not complex-differentiable at "
            f"z={z!r}; linearised stability analysis needs g_k holomorphic at the equilibrium"
        )


class DegenerateSpectrumError(DomainError):
    """A zero eigenvalue (or root) makes the argument criterion inapplicable."""


class NonUniformCoefficientsError(DomainError):
    """Structured (hub/ring) reduction does not apply; use the general spectral path."""


class EigenSolverError(DomainError):
    def __init__(self, message: str, partial=None):
        self.partial = partial
        super().__init__(message)


class ConvergenceError(DomainError):
    pass
