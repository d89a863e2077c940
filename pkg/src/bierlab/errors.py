"""Exception hierarchy shared by every bierlab module."""


class BierlabError(Exception):
    """Base class. ``code`` is the machine-readable name used in CLI reports."""

    exit_code = 2

    @property
    def code(self) -> str:
        return type(self).__name__

    def to_json(self) -> dict:
        return {"error": self.code, "message": str(self)}


# poset
class CycleDetected(BierlabError):
    pass


class UnknownElement(BierlabError):
    pass


class SizeTooLarge(BierlabError):
    pass


class EmptyPoset(BierlabError):
    pass


class NotComparable(BierlabError):
    pass


class NotBounded(BierlabError):
    pass


class NotSemilattice(BierlabError):
    pass


class NotLattice(NotSemilattice):
    pass


class NotIdeal(BierlabError):
    pass


class NotProperIdeal(NotIdeal):
    pass


# complexes
class NotDownwardClosed(BierlabError):
    pass


class GroundTooSmall(BierlabError):
    pass


class NotProper(BierlabError):
    pass


class FaceNotPresent(BierlabError):
    pass


class EmptyCenter(BierlabError):
    pass


class VertexClash(BierlabError):
    pass


class EmptyComplex(BierlabError):
    pass


class TooLarge(BierlabError):
    pass


# verification failures exit with 3
class VerificationFailed(BierlabError):
    exit_code = 3

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness

    def to_json(self) -> dict:
        out = super().to_json()
        if self.witness is not None:
            out["witness"] = repr(self.witness)
        return out


class IsomorphismFailed(VerificationFailed):
    pass


class StepFailed(VerificationFailed):
    def __init__(self, message: str, step: int, witness=None):
        super().__init__(message, witness)
        self.step = step


class PartialOrderViolated(VerificationFailed):
    pass


# nested sets / blowups
class AlphaIsBottom(BierlabError):
    pass


class AlphaNotMaximal(BierlabError):
    pass


class NotBuildingSet(BierlabError):
    pass


# shelling
class NotCoatoms(BierlabError):
    pass


class InputNotCertified(BierlabError):
    pass


class CenterNotFace(BierlabError):
    pass


class Timeout(BierlabError):
    exit_code = 4
