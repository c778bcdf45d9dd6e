"""Exception types raised across herzlab."""


class HerzlabError(Exception):
    """Base class for all library errors."""


class InvalidArgumentError(HerzlabError, ValueError):
    pass


class DivergenceError(HerzlabError, ArithmeticError):
    """An integral or series that should be finite is not."""


class InsufficientDataError(HerzlabError, ValueError):
    pass


class SingularityError(HerzlabError, ValueError):
    """Evaluation requested at a kernel singularity."""


class ConfigError(HerzlabError):
    """Experiment configuration failed validation.

    ``errors`` holds one human-readable message per problem found.
    """

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
