"""
Reading and writing shot files.

``dets``: one shot per line, whitespace-separated ``D<k>`` tokens; a blank line
is an empty syndrome. ``b01``: one shot per line, exactly one ``0``/``1``
character per detector (or per observable for observable files).
"""

import re
from enum import Enum
from typing import List, Sequence

from mle_decoder.model import Syndrome

LOW_CONFIDENCE = "LOW_CONFIDENCE"

_DET_TOKEN = re.compile(r"^D(\d+)$")


class ShotFormat(str, Enum):
    DETS = "dets"
    B01 = "b01"


def parse_dets_line(line: str, num_detectors: int, lineno: int) -> Syndrome:
    activated = set()
    for token in line.split():
        match = _DET_TOKEN.match(token)
        if match is None:
            raise ValueError(f"Shot line {lineno}: malformed detector token {token!r}")
        d = int(match.group(1))
        if d >= num_detectors:
            raise ValueError(
                f"Shot line {lineno}: D{d} is beyond the model's {num_detectors} detectors"
            )
        activated ^= {d}
    return Syndrome(activated=frozenset(activated))


def parse_b01_line(line: str, width: int, lineno: int) -> int:
    """Parse a 0/1 string into a bit-mask (character k is bit k)."""
    line = line.strip()
    if len(line) != width or any(c not in "01" for c in line):
        raise ValueError(f"Shot line {lineno}: expected {width} characters of 0/1, got {line!r}")
    mask = 0
    for k, c in enumerate(line):
        if c == "1":
            mask |= 1 << k
    return mask


def _lines(text: str) -> List[str]:
    return text.splitlines()


def read_syndromes(text: str, fmt: ShotFormat, num_detectors: int) -> List[Syndrome]:
    """
    Parse a whole shot file.

    Raises:
        ValueError: On a malformed line, with its line number.
    """
    fmt = ShotFormat(fmt)
    shots: List[Syndrome] = []
    for lineno, line in enumerate(_lines(text), start=1):
        if fmt == ShotFormat.DETS:
            shots.append(parse_dets_line(line, num_detectors, lineno))
        else:
            mask = parse_b01_line(line, num_detectors, lineno)
            shots.append(Syndrome.of(d for d in range(num_detectors) if mask >> d & 1))
    return shots


def read_observables(text: str, num_observables: int) -> List[int]:
    """Parse a b01 file of observable flips into bit-masks."""
    return [
        parse_b01_line(line, num_observables, lineno)
        for lineno, line in enumerate(_lines(text), start=1)
    ]


def format_bits(mask: int, width: int) -> str:
    """Render a bit-mask as a 0/1 string, bit k at position k."""
    return "".join("1" if mask >> k & 1 else "0" for k in range(width))


def format_dets(syndrome: Syndrome) -> str:
    return " ".join(f"D{d}" for d in syndrome.detectors())


def format_b01(syndrome: Syndrome, num_detectors: int) -> str:
    return "".join("1" if d in syndrome.activated else "0" for d in range(num_detectors))


def write_syndromes(syndromes: Sequence[Syndrome], fmt: ShotFormat, num_detectors: int) -> str:
    """Render syndromes as shot-file text that ``read_syndromes`` parses back."""
    fmt = ShotFormat(fmt)
    if fmt == ShotFormat.DETS:
        lines = [format_dets(s) for s in syndromes]
    else:
        lines = [format_b01(s, num_detectors) for s in syndromes]
    return "".join(line + "\n" for line in lines)


def write_observables(masks: Sequence[int], num_observables: int) -> str:
    """Render observable bit-masks as b01 text."""
    return "".join(format_bits(mask, num_observables) + "\n" for mask in masks)
