"""Exception types shared across the package."""


class GroupConstructionError(ValueError):
    """A group, subgroup or action table failed validation."""


class SpecParseError(ValueError):
    """A group/action/coefficient specification string could not be parsed."""


class BudgetExceededError(RuntimeError):
    """A builder refused to run because its size estimate exceeds the memory budget."""


class EquivarianceError(ValueError):
    """A transversal does not induce a map of invariant complexes."""


class InternalCheckError(AssertionError):
    """A cross-check that can only fail on an internal bug fired."""
