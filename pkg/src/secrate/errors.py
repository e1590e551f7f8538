"""Exception types and warnings shared across the package."""


class SecrateError(Exception):
    """Base class for all scenario and numeric errors raised by this package."""


class AntennaCountTooSmall(SecrateError):
    """Jammer has too few antennas for the requested eavesdropper counts."""


class RangeError(SecrateError):
    """A parameter lies outside its admissible range."""


class NonPositive(SecrateError):
    """A quantity that must be strictly positive is zero or negative."""


class ZeroVector(SecrateError):
    """A channel vector has numerically zero norm."""


class DegenerateChannel(SecrateError):
    """Channel realizations too close to parallel for beam construction."""


class RankDeficient(SecrateError):
    """Channel/beam matrix does not have full column rank."""


class DimensionMismatch(SecrateError):
    """Array dimensions are inconsistent with the scenario."""


class AlphaZero(SecrateError):
    """Active-eavesdropper secrecy constraint cannot be inverted (no AN margin)."""


class Undefined(SecrateError):
    """Requested analysis is undefined at the given correlation coefficient."""


class ConfigError(SecrateError):
    """Malformed or inconsistent configuration file."""


class DegenerateDistributionWarning(UserWarning):
    """A closed form was evaluated outside the interference-limited regime it assumes."""
