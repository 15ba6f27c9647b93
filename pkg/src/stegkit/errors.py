"""Exception types shared across the toolkit.

Every error raised on purpose by stegkit derives from StegError, so CLI and
library callers can catch one base class. Extraction uses two distinct
signals: NoMagic means "this carrier holds no message", while CorruptFrame
means "there was a message but the carrier was damaged".
"""


class StegError(Exception):
    """Base class for all stegkit errors."""


class NoMagic(StegError):
    """No payload frame marker present: the carrier holds no message."""


class CorruptFrame(StegError):
    """Frame marker found but the length or CRC check failed."""


class CapacityExceeded(StegError):
    """Payload does not fit the carrier. Carries both sizes in bytes."""

    def __init__(self, requested: int, capacity: int):
        super().__init__(
            f"payload is {requested} bytes but usable capacity is {capacity} bytes"
        )
        self.requested = requested
        self.capacity = capacity


class Truncated(StegError):
    """Input ends before the declared structure is complete."""


class UnsupportedBmp(StegError):
    """Not an uncompressed 24-bit RGB or 8-bit grayscale BMP."""


class UnsupportedScf(StegError):
    """Not a valid SCF coefficient-plane container."""


class UnsupportedWav(StegError):
    """Not a mono 16-bit PCM WAV file."""


class UnsupportedChar(StegError):
    """Character outside the printable ASCII range of the built-in font."""


class AudioTooShort(StegError):
    """Fewer samples than one analysis window."""


class NoTrailer(StegError):
    """No appended data found after the host file's end marker."""


class MalformedPacket(StegError):
    """Packet bytes do not parse as IPv4+TCP or a checksum is invalid."""


class FieldOutOfRange(StegError):
    """A covert header field does not decode to a single byte value."""


class BadMagic(StegError):
    """File does not start with a recognized format magic."""


class AlphabetTooSmall(StegError):
    """Fewer than two distinct letters: no prefix code can be built."""


class UnknownLetter(StegError):
    """Letter not present in the code table."""


class DanglingBits(StegError):
    """Leftover bits match no code: wrong table or corrupted value."""


class NotDivisible(StegError):
    """Series value is not a multiple of the scale factor: wrong key."""


class MalformedCsv(StegError):
    """Series file does not follow the x,y CSV grammar."""


class DegenerateHistogram(StegError):
    """Too few populated value pairs for a chi-square verdict."""
