"""Domain exceptions. The CLI maps any ``UsvSimError`` to exit code 1."""


class UsvSimError(Exception):
    """Base class for all domain errors raised by usvsim."""


class NonFiniteState(UsvSimError):
    """Integration produced a NaN or infinite state field."""


class SpeedTooLow(UsvSimError):
    """Course angle requested while the vessel is (almost) at rest."""


class InvalidSetpoint(UsvSimError):
    pass


class RankDeficient(UsvSimError):
    """Regressor does not excite every requested coefficient."""


class UnsupportedPolygon(UsvSimError):
    """Polygon is not monotone with respect to the sweep direction."""


class EmptyPlan(UsvSimError):
    pass


class EmptyLog(UsvSimError):
    pass


class ParameterFileError(UsvSimError):
    pass


class MissionAborted(UsvSimError):
    """Executive ended a run in Abort (or the run hit its time limit)."""


class ConfigMismatch(UsvSimError):
    """Output file was produced with a different configuration."""
