"""Code-64 serialization of (6,6)-functions and the embedded known APN classes.

Character i of a Code-64 string is the standard base64 digit of F(i); bit j
of that digit is output coordinate j+1.  Under this reading every one of the
14 embedded strings decodes to an APN function.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

from .errors import DomainError, ParseError
from .vecfun import VectorialFunction

ALPHABET = string.ascii_uppercase + string.ascii_lowercase + string.digits + "+/"
_INDEX = {c: i for i, c in enumerate(ALPHABET)}


def decode(code: str) -> VectorialFunction:
    code = code.strip()
    if len(code) != 64:
        raise ParseError(f"Code-64 string must have 64 characters, got {len(code)}")
    values = []
    for i, ch in enumerate(code):
        if ch not in _INDEX:
            raise ParseError(f"invalid Code-64 character {ch!r}", position=i)
        values.append(_INDEX[ch])
    return VectorialFunction(6, 6, values)


def encode(F: VectorialFunction) -> str:
    if (F.m, F.n) != (6, 6):
        raise DomainError("Code-64 encodes (6,6)-functions only")
    return "".join(ALPHABET[int(v)] for v in F.table)


@dataclass(frozen=True)
class KnownRepresentative:
    label: int
    code: str
    gamma_rank_expected: int

    @property
    def function(self) -> VectorialFunction:
        return decode(self.code)


# Rows of the published table: (label, Code-64, Gamma-rank column).
_TABLE = [
    (1, "AAA0AEK2AUIoMcOmASMvUCS5FDB2dfTsAYqG7zfvWa0Mh9NpEOncu0DkXJ8Tx/Un", 1170),
    (2, "AAAkA4YEAgw0WO+CAICuE0eK9VPDv/FxASQmrBjtYq4ulvdzUOG47Zx3xLTNIKyU", 1174),
    (3, "AAAEAYIUAQg0We+yA4yOU0uKtF/Tvf1BACQWbBDdIa4uFP9zE+mYLphHhLjN4KyE", 1170),
    (4, "AAABAoQJAhI82PuyAXDzMDv3z3sb5VGpZVhspNBU1YF9zGTDLQwM30s4UczIuOpK", 1166),
    (5, "AAAkAw8oAow8qymaAQSmU06+1NXLLDV5ACQ2zBfJEukqdHB/cOeo7ZFDtXfBgquA", 1172),
    (6, "AAAkAYwMA4o0iC6+AwaOEsuiVdnLzjxFAK4WTBbtcuMatHNDQqysHlVTZbT1s2Wo", 1300),
    (7, "AAAEAIw8Ao4U2W+aAYOSo4WC1FD3rTtRASg2bBLVUuMy5LRncWy8vtx39frN4Sew", 1158),
    (8, "AAAkAQsYAYQsSauCAgim0E6uldXLDrdRACgGzh/JUOka1/pHc+eYbp1jtX/h4SGI", 1170),
    (9, "AAAkAosgA4g8CSO6AYK28MaOtNHDTbV5AKwejB/5UmES1vJ3EW+IbhNT9XnpgiWw", 1170),
    (10, "AAAkAw8oAIoEC6WKAgaeEUiWlNXbj7tRA64mLBPh0Gky9/R3UO2IbxFLFXP5Iq+4", 1146),
    (11, "AAAEAwgUAoQ8OW+iAICO0MWq9dvLHX1hAqoGbBTNgiYe1HtbU2+Y7pxnJDz9oSyM", 1166),
    (12, "AAAkAYQsA4o0SyquAIyes8O6td3jT7ZVACY+bBTtUuk6d/97Qa6Un1drpbr9MmeQ", 1168),
    (13, "AAAgAIQ4AEY8COKmAwaKM0GelRnzrX5lAyUG7B/lI+ESxPtzgiuMXdJjNLb942+Q", 1102),
    (14, "AAAgAoYQAEQ0qGiuAwaKEcG+lRv7LXZlA6cGTBXlgesyZPN7ICOkf9BDNDb1wW+4", 1172),
]

# The published Gamma-rank column sits five rows below the code it belongs
# to: the class of row-i code has the rank printed in row i+5 (cyclically).
# The same offset reconciles the degree columns with the per-class EA counts.
GAMMA_ROW_OFFSET = 5


def known_representatives() -> list[KnownRepresentative]:
    return [KnownRepresentative(label, code, rank) for label, code, rank in _TABLE]


def representative(label: int) -> KnownRepresentative:
    if not 1 <= label <= len(_TABLE):
        raise DomainError(f"representative labels run 1..{len(_TABLE)}, got {label}")
    return known_representatives()[label - 1]


def published_gamma_rank_of_code(label: int) -> int:
    """Gamma-rank printed for the class whose Code-64 string sits in row ``label``."""
    return _TABLE[(label - 1 + GAMMA_ROW_OFFSET) % len(_TABLE)][2]


def read_c64(path) -> list[VectorialFunction]:
    """Read a .c64 file: one Code-64 string per line, '#' comments allowed."""
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                out.append(decode(line))
    return out
