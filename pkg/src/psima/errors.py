"""Exception taxonomy for the psima engine.

Exit-code mapping used by the CLI: InputError family -> 2,
degeneracy at every sample -> 3, usage problems -> 1.
"""


class PsimaError(Exception):
    """Base class for all errors raised by this package."""


class InputError(PsimaError):
    """Malformed or out-of-contract user input (data files, arguments)."""


class CapabilityError(InputError):
    """Requested order or size exceeds what the numerics can support."""


class EmptyWindowError(PsimaError):
    """No ticks remain inside the exponential window at the evaluation time."""


class NoVolumeError(PsimaError):
    """Window contains ticks but zero traded volume; flow operators vanish."""


class DegenerateStateError(PsimaError):
    """Numerical degeneracy: the Gram pencil could not be solved at any order."""
