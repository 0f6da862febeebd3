"""Exception types shared across the package."""


class ScenarioError(ValueError):
    """Invalid model coefficients, grids or controls."""


class DomainError(ValueError):
    """A lifted state violates the boundary constraint of an operator domain."""


class UnsupportedScenario(ValueError):
    """The requested operation is undefined for this kind of scenario.

    Raised, for instance, when the structural operator is asked to handle a
    point-delay forgetting kernel.
    """
