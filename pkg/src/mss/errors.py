"""Exception types shared across the package."""


class MssError(Exception):
    """Base class for all errors raised by this package."""


# -- field construction / arithmetic -----------------------------------------

class BadDegree(MssError, ValueError):
    """Field bit width outside [2, 16] or polynomial of the wrong degree."""


class NonPrimitivePoly(MssError, ValueError):
    """Candidate polynomial whose root does not generate the full cyclic group."""


class DivideByZero(MssError, ZeroDivisionError):
    """Multiplicative inverse of zero requested."""


# -- ring arithmetic ----------------------------------------------------------

class WrongLength(MssError, ValueError):
    """Ring element vector does not have exactly p lanes."""


class BadShift(MssError, ValueError):
    """Division by 1 + alpha^j with j = 0 mod p (a zero factor)."""


# -- code backends ------------------------------------------------------------

class ParamMismatch(MssError, ValueError):
    """Arguments inconsistent with the code parameters or with each other."""


class DuplicatePosition(MssError, ValueError):
    """A position appears more than once in an erasure or adversary set."""


class OutOfRange(MssError, ValueError):
    """Position outside the allowed index range."""


class InternalDegenerate(MssError):
    """Locator evaluated to zero at 1; inputs were corrupted."""


class Unsolvable(MssError):
    """Erased-column system is inconsistent or underdetermined."""


# -- oracle -------------------------------------------------------------------

class NotUnique(MssError):
    """Brute-force system did not pin down a single solution."""


class TooLargeToEnumerate(MssError):
    """Exhaustive audit would exceed the enumeration cap."""


# -- scheme / wire format -----------------------------------------------------

class BadConfig(MssError, ValueError):
    """Scheme configuration violates its invariants."""


class RandomnessExhausted(MssError):
    """Randomness source returned fewer bytes than requested."""


class NotEnoughShares(MssError):
    """Fewer than threshold-many distinct shares supplied."""


class HeaderMismatch(MssError):
    """Artifacts do not belong to the same package."""


class CrcMismatch(MssError):
    """Payload checksum does not match its header."""


class BadMagic(MssError):
    """Artifact does not start with the expected magic bytes."""


class UnsupportedVersion(MssError):
    """Unknown format version or backend byte."""


class Truncated(MssError):
    """Artifact shorter than its header promises."""
