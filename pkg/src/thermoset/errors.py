"""Exception types shared across the package."""


class ThermosetError(Exception):
    """Base class for all package-specific errors."""


class EmptySubshift(ThermosetError):
    """No infinite admissible symbol stream survives the forbidden words."""


class ParseError(ThermosetError):
    """Malformed expression source; carries the byte offset of the failure."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class DomainError(ThermosetError):
    """Evaluation left the mathematical domain (log of nonpositive, division by zero, ...)."""


class NotMonotone(ThermosetError):
    """A branch map required to be strictly monotone changes derivative sign."""


class OutOfRange(ThermosetError):
    """Requested inversion target lies outside the image of the branch."""


class ValidationError(ThermosetError):
    """System construction failed; lists every violated invariant."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        super().__init__("invalid system: " + "; ".join(self.violations))


class NoConvergence(ThermosetError):
    """Iteration budget exhausted before reaching the requested tolerance."""


class NoSignChange(ThermosetError):
    """Pressure estimate stayed positive over the whole search range."""


class NoTransitivity(ThermosetError):
    """Operation requires a transitive system."""


class ContractionDetected(ThermosetError):
    """A periodic multiplier below one was found inside the limit set."""


class InversionStall(ThermosetError):
    """Backward-orbit bracket collapsed below representable width."""


class ConfigError(ThermosetError):
    """Configuration file violates the schema; names the offending field."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"config field '{field}': {message}")
