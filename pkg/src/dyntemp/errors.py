"""Exception types shared across the package.

The CLI maps these onto exit codes: InvalidInputError -> 2 (validation),
MissingArtifactError -> 3 (a required upstream artifact does not exist).
"""


class InvalidInputError(ValueError):
    """An argument or config value violates a documented precondition."""


class MissingArtifactError(FileNotFoundError):
    """A pipeline stage was run before the stage that produces its input."""


class StaleArtifactError(InvalidInputError):
    """An upstream artifact changed after its dependents were produced."""
