"""Exception types shared across the pipeline."""


class CanalPilotError(Exception):
    """Base class for all canalpilot errors."""


class MalformedRow(CanalPilotError):
    """A demonstration CSV row (or header) could not be parsed."""


class DegenerateQuaternion(CanalPilotError):
    """Quaternion norm too small to normalize."""


class TooShort(CanalPilotError):
    """Demonstration has fewer than 2 samples."""


class EmptyInput(CanalPilotError):
    """An operation received an empty demonstration list."""


class DegenerateCurve(CanalPilotError):
    """All directrix points coincide; no tangent direction exists."""


class NonOrthonormalFrame(CanalPilotError):
    """A frame triad failed the orthonormality check."""


class EndOfCanal(CanalPilotError):
    """A step would leave the valid disk index range."""


class OutOfRange(CanalPilotError):
    """Index or canal parameter outside its legal range."""


class BindFailure(CanalPilotError):
    """Server could not bind to the requested address."""


class MalformedFrame(CanalPilotError):
    """A wire frame was not valid JSON or violated the v1 schema."""
