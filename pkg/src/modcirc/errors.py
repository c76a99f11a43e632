"""Exception hierarchy shared by all modules."""


class ModCircError(Exception):
    """Base class for toolkit errors."""


class InvalidModulus(ModCircError, ValueError):
    pass


class InvalidArgument(ModCircError, ValueError):
    pass


class InvalidAssignment(ModCircError, ValueError):
    pass


class MalformedCircuit(ModCircError, ValueError):
    pass


class TooLarge(ModCircError):
    """A configured enumeration or search cap was exceeded."""


class NotRigid(ModCircError):
    pass


class InvalidBlock(ModCircError, ValueError):
    pass


class SupportUndefined(ModCircError):
    """No minimal support could be determined within the configured caps."""


class PreconditionFailed(ModCircError):
    pass


class IncompatibleModulus(ModCircError, ValueError):
    pass


class UnsupportedModulus(ModCircError, ValueError):
    """The modulus is a prime power, so AND_n is out of reach."""


class ConstructionFailed(ModCircError):
    """A builder could not produce an object passing its own correctness check."""
