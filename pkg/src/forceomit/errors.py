"""Exception types shared across the package and their CLI exit codes."""


class ForceOmitError(Exception):
    """Base class for every error raised by forceomit."""

    exit_code = 1


class ParameterError(ForceOmitError, ValueError):
    """A physical parameter is missing, non-finite or out of range."""

    exit_code = 2

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class ConfigError(ForceOmitError, ValueError):
    """Base for configuration-file problems."""

    exit_code = 2

    def __init__(self, key, message, line=None):
        self.key = key
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{key}{where}: {message}")


class MissingKey(ConfigError):
    def __init__(self, key, line=None):
        super().__init__(key, "mandatory key missing", line)


class UnknownKey(ConfigError):
    def __init__(self, key, line=None):
        super().__init__(key, "unknown key", line)


class UnparsableValue(ConfigError):
    def __init__(self, key, value, line=None):
        self.value = value
        super().__init__(key, f"cannot parse value {value!r}", line)


class BracketFailure(ForceOmitError):
    exit_code = 3

    def __init__(self, bracket, values):
        self.bracket = bracket
        self.values = values
        super().__init__(
            f"no sign change on bracket [{bracket[0]:.6g}, {bracket[1]:.6g}] N; "
            f"residuals {values[0]:.6g}, {values[1]:.6g}"
        )


class MultistableAmbiguity(ForceOmitError):
    exit_code = 4

    def __init__(self, roots):
        self.roots = tuple(roots)
        super().__init__(f"cubic has {len(self.roots)} distinct real roots: {self.roots}")


class NonConvergence(ForceOmitError):
    exit_code = 5

    def __init__(self, message, last_state=None, residual=None):
        self.last_state = last_state
        self.residual = residual
        super().__init__(message)


class SingularSystem(ForceOmitError):
    exit_code = 6

    def __init__(self, condition):
        self.condition = condition
        super().__init__(f"sideband system is singular (condition number {condition:.3e})")


class DegenerateDenominator(ForceOmitError):
    exit_code = 7


class ZeroTransmission(ForceOmitError):
    exit_code = 8


class NonlinearWindow(ForceOmitError):
    exit_code = 9


class OutOfMonotoneRange(ForceOmitError):
    exit_code = 10

    def __init__(self, tau, attainable):
        self.tau = tau
        self.attainable = attainable
        super().__init__(
            f"delay {tau:.6g} s outside attainable range "
            f"[{attainable[0]:.6g}, {attainable[1]:.6g}] s"
        )


class OutputError(ForceOmitError, OSError):
    exit_code = 11

    def __init__(self, path, reason):
        self.path = path
        super().__init__(f"{path}: {reason}")


EXIT_CODES = {
    cls.__name__: cls.exit_code
    for cls in (
        ForceOmitError,
        ParameterError,
        ConfigError,
        MissingKey,
        UnknownKey,
        UnparsableValue,
        BracketFailure,
        MultistableAmbiguity,
        NonConvergence,
        SingularSystem,
        DegenerateDenominator,
        ZeroTransmission,
        NonlinearWindow,
        OutOfMonotoneRange,
        OutputError,
    )
}
