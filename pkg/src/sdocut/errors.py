class CircuitError(ValueError):
    """Malformed gate or circuit."""


class QasmError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class WidthError(ValueError):
    """Circuit is wider than the simulator is configured to handle."""


class InfeasibleCutError(ValueError):
    """No cut set satisfies the width/cut-count constraints."""


class NonSeparatingCutError(ValueError):
    """A cut leaves its upstream and downstream segments connected."""


class ConfigError(ValueError):
    pass
