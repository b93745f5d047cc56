"""
Serialization of DEM programs and error models back to text.
"""

import math
from typing import List, Sequence

from mle_decoder.dem.program import DemInstruction, DemKind, DemProgram, DemTarget
from mle_decoder.model import ErrorModel

INDENT = "    "


def format_number(value: float) -> str:
    """Shortest text that parses back to exactly ``value``, integers without a point."""
    if math.isfinite(value) and value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


def _arguments(values: Sequence[float]) -> str:
    if not values:
        return ""
    return "(" + ", ".join(format_number(v) for v in values) + ")"


def _line(head: str, targets: Sequence[object]) -> str:
    return " ".join([head, *(str(t) for t in targets)])


def _emit(instructions: Sequence[DemInstruction], depth: int, out: List[str]) -> None:
    pad = INDENT * depth
    for instruction in instructions:
        if instruction.kind == DemKind.ERROR:
            out.append(pad + _line(f"error({instruction.probability!r})", instruction.targets))
        elif instruction.kind == DemKind.DETECTOR:
            head = "detector" + _arguments(instruction.coordinates)
            out.append(pad + _line(head, instruction.targets))
        elif instruction.kind == DemKind.LOGICAL_OBSERVABLE:
            out.append(pad + _line("logical_observable", instruction.targets))
        elif instruction.kind == DemKind.SHIFT_DETECTORS:
            head = "shift_detectors" + _arguments(instruction.coordinates)
            out.append(pad + f"{head} {instruction.offset}")
        else:
            out.append(pad + f"repeat {instruction.repeat_count} {{")
            _emit(instruction.body, depth + 1, out)
            out.append(pad + "}")


def serialize_dem(program: DemProgram) -> str:
    """
    Render a program as canonical DEM text, one instruction per line.

    Probabilities print with ``repr`` so they parse back to the identical float.
    """
    lines: List[str] = []
    _emit(program.instructions, 0, lines)
    return "".join(line + "\n" for line in lines)


def model_to_program(model: ErrorModel) -> DemProgram:
    """
    Express an error model as a DEM program that instantiates back to the same model.

    Errors come first in channel order, then detector declarations for
    coordinates and for trailing detectors no channel mentions, then a
    declaration for trailing unused observables.
    """
    instructions: List[DemInstruction] = []
    max_detector = -1
    max_observable = -1
    for channel in model.channels:
        targets = [DemTarget.detector(d) for d in channel.detectors]
        observables = [k for k in range(model.num_observables) if channel.observables >> k & 1]
        targets.extend(DemTarget.observable(k) for k in observables)
        if channel.detectors:
            max_detector = max(max_detector, channel.detectors[-1])
        if observables:
            max_observable = max(max_observable, observables[-1])
        instructions.append(
            DemInstruction(
                kind=DemKind.ERROR, probability=channel.probability, targets=tuple(targets)
            )
        )

    for detector, coords in sorted(model.detector_coords.items()):
        max_detector = max(max_detector, detector)
        instructions.append(
            DemInstruction(
                kind=DemKind.DETECTOR,
                coordinates=coords,
                targets=(DemTarget.detector(detector),),
            )
        )
    if model.num_detectors - 1 > max_detector:
        instructions.append(
            DemInstruction(
                kind=DemKind.DETECTOR, targets=(DemTarget.detector(model.num_detectors - 1),)
            )
        )
    if model.num_observables - 1 > max_observable:
        instructions.append(
            DemInstruction(
                kind=DemKind.LOGICAL_OBSERVABLE,
                targets=(DemTarget.observable(model.num_observables - 1),),
            )
        )
    return DemProgram(instructions=tuple(instructions))
