"""Exception types shared across the package."""


class CoolsimError(Exception):
    """Base class for all package errors."""


class InvalidDims(CoolsimError):
    """Operands have incompatible or non-qubit dimensions."""


class InvalidState(CoolsimError):
    """Matrix is not a valid density operator within tolerance."""


class InvalidUnitary(CoolsimError):
    """Matrix is not unitary within tolerance."""


class InvalidInput(CoolsimError):
    """Input violates a structural precondition (e.g. not Hermitian)."""


class InvalidParam(CoolsimError):
    """Scalar parameter out of its allowed range."""


class InvalidQubits(CoolsimError):
    """Qubit indices overlap or fall outside the register."""


class NotTranspiled(CoolsimError):
    """Circuit still contains gates outside the {CX, SX, RZ} basis."""


class SizeLimit(CoolsimError):
    """Requested dense object exceeds the supported qubit count."""


class NoConvergence(CoolsimError):
    """Iterative solver failed to reach the requested tolerance."""


class Unmitigable(CoolsimError):
    """Depolarizing strength too large to invert the expectation value."""


class NegativeTemperature(CoolsimError):
    """Population inversion: no positive effective temperature exists."""


class ConfigError(CoolsimError):
    """Experiment configuration file is malformed or inconsistent."""


class ZeroTemperatureWarning(UserWarning):
    """Excited-state population is zero; effective temperature reported as 0."""
