"""Exception hierarchy.

ValidationError (and subclasses) map to CLI exit code 2; everything else
that goes wrong inside a computation maps to exit code 1.
"""


class VdqecError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(VdqecError):
    """Invalid argument, malformed input file, or broken precondition."""


class InvalidCircuitError(ValidationError):
    """Circuit structure violates an invariant (arity, qubit range, ...)."""


class CompileError(VdqecError):
    """A rotation could not be approximated within the requested budget."""


class CampaignError(VdqecError):
    """Fault-injection campaign cannot produce a meaningful profile."""


class AssignmentError(ValidationError):
    """Code assignment is malformed or does not cover a requested timestep."""


class StaleCacheError(ValidationError):
    """A cached artifact does not match the circuit it claims to describe."""
