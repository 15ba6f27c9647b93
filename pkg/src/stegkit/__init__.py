"""stegkit: hide data in everyday carriers, and detect exactly that.

Subsystems:

- ``bitcodec``     payload framing (magic/length/CRC) and bit-order rules
- ``imagesteg``    BMP codec, pixel-LSB embedding, quantized-DCT embedding
- ``filesteg``     byte-append hiding and trailer detection
- ``audiosteg``    WAV codec, sample-LSB embedding, spectrogram painting
- ``netsteg``      TCP/IP covert channels written to / read from pcap files
- ``graphsteg``    Huffman-coded word values published as an (x, y) series
- ``steganalysis`` chi-square LSB attack and signature scanning
- ``cli``          the ``stegkit`` command line
"""

__version__ = "0.1.0"

__all__ = [
    "bitcodec",
    "imagesteg",
    "filesteg",
    "audiosteg",
    "netsteg",
    "graphsteg",
    "steganalysis",
    "cli",
]
