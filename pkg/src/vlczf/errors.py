"""Exception hierarchy.  Everything derives from :class:`VLCError`."""


class VLCError(Exception):
    pass


class SingularMatrix(VLCError):
    """det(H) == 0: the ZF precoder H^-1 does not exist."""


class DegenerateChannel(VLCError):
    """A column of H is all zero, so the parallelogram has no area."""


class InvalidXi(VLCError, ValueError):
    pass


class OutOfRange(VLCError, ValueError):
    pass


class NegativeLength(VLCError, ValueError):
    pass


class RateUnreachable(VLCError):
    pass


class InvalidAlpha(VLCError, ValueError):
    pass


class ConstraintViolation(VLCError):
    """A simulated transmit sample left [0, 1]; indicates a geometry bug."""


class ConfigError(VLCError, ValueError):
    pass
