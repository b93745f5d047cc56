"""
Flattening of DEM programs into concrete error models.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from mle_decoder.dem.program import DemInstruction, DemKind, DemProgram, TargetKind
from mle_decoder.exceptions import ModelTooLarge
from mle_decoder.model import Coords, ErrorChannel, ErrorModel

logger = logging.getLogger(__name__)

# Limits on what a DEM may expand to
MAX_UNROLLED_INSTRUCTIONS = 10_000_000
MAX_DETECTORS = 1 << 22
MAX_OBSERVABLES = 1 << 12


@dataclass
class _FlattenState:
    detector_offset: int = 0
    coord_offset: List[float] = field(default_factory=list)
    channels: List[ErrorChannel] = field(default_factory=list)
    coords: Dict[int, Coords] = field(default_factory=dict)
    max_detector: int = -1
    max_observable: int = -1

    def shifted_coords(self, coordinates: Sequence[float]) -> Coords:
        return tuple(
            c + (self.coord_offset[i] if i < len(self.coord_offset) else 0.0)
            for i, c in enumerate(coordinates)
        )


def _split_components(instruction: DemInstruction) -> List[Tuple[List[int], List[int]]]:
    """Split error targets at each ``^`` into (detectors, observables) components."""
    components: List[Tuple[List[int], List[int]]] = [([], [])]
    for target in instruction.targets:
        if target.kind == TargetKind.SEPARATOR:
            components.append(([], []))
        elif target.kind == TargetKind.DETECTOR:
            components[-1][0].append(target.value)
        else:
            components[-1][1].append(target.value)
    return components


def _unrolled_size(instructions: Sequence[DemInstruction], limit: int) -> int:
    """Instruction count after unrolling, stopping early once it passes ``limit``."""
    total = 0
    for instruction in instructions:
        if instruction.kind == DemKind.REPEAT:
            count = instruction.repeat_count or 0
            body = _unrolled_size(instruction.body, limit) if count else 0
            total += 1 + count * body
        else:
            total += 1
        if total > limit:
            break
    return total


def _check_detector(d: int) -> int:
    if d >= MAX_DETECTORS:
        raise ModelTooLarge(f"Detector index {d} exceeds the limit of {MAX_DETECTORS} detectors")
    return d


def _check_observable(k: int) -> int:
    if k >= MAX_OBSERVABLES:
        raise ModelTooLarge(
            f"Observable index {k} exceeds the limit of {MAX_OBSERVABLES} observables"
        )
    return k


def _walk(instructions: Sequence[DemInstruction], state: _FlattenState) -> None:
    for instruction in instructions:
        if instruction.kind == DemKind.REPEAT:
            for _ in range(instruction.repeat_count or 0):
                _walk(instruction.body, state)

        elif instruction.kind == DemKind.ERROR:
            assert instruction.probability is not None
            for raw_detectors, raw_observables in _split_components(instruction):
                detectors: set = set()
                for d in raw_detectors:
                    d = _check_detector(d + state.detector_offset)
                    state.max_detector = max(state.max_detector, d)
                    detectors.symmetric_difference_update((d,))
                observables = 0
                for k in raw_observables:
                    _check_observable(k)
                    state.max_observable = max(state.max_observable, k)
                    observables ^= 1 << k
                state.channels.append(
                    ErrorChannel(
                        index=len(state.channels),
                        probability=instruction.probability,
                        detectors=tuple(sorted(detectors)),
                        observables=observables,
                    )
                )

        elif instruction.kind == DemKind.DETECTOR:
            for target in instruction.targets:
                d = _check_detector(target.value + state.detector_offset)
                state.max_detector = max(state.max_detector, d)
                if instruction.coordinates:
                    state.coords[d] = state.shifted_coords(instruction.coordinates)

        elif instruction.kind == DemKind.LOGICAL_OBSERVABLE:
            for target in instruction.targets:
                state.max_observable = max(state.max_observable, _check_observable(target.value))

        elif instruction.kind == DemKind.SHIFT_DETECTORS:
            state.detector_offset += instruction.offset
            for i, c in enumerate(instruction.coordinates):
                if i < len(state.coord_offset):
                    state.coord_offset[i] += c
                else:
                    state.coord_offset.append(c)


def instantiate(program: DemProgram) -> ErrorModel:
    """
    Flatten a DEM program into an error model.

    Repeat blocks are unrolled, detector shifts applied cumulatively, and every
    ``^``-separated component of an error becomes its own channel with the
    instruction's probability. Channel order follows textual order after
    unrolling.

    Args:
        program: A parsed DEM program.

    Returns:
        ErrorModel: The flattened (not yet canonicalized) model.

    Raises:
        ModelTooLarge: If unrolling exceeds MAX_UNROLLED_INSTRUCTIONS, or a
            detector or observable index passes MAX_DETECTORS or MAX_OBSERVABLES.
    """
    size = _unrolled_size(program.instructions, MAX_UNROLLED_INSTRUCTIONS)
    if size > MAX_UNROLLED_INSTRUCTIONS:
        raise ModelTooLarge(
            f"Program unrolls to more than {MAX_UNROLLED_INSTRUCTIONS} instructions"
        )
    state = _FlattenState()
    _walk(program.instructions, state)
    model = ErrorModel(
        channels=tuple(state.channels),
        num_detectors=state.max_detector + 1,
        num_observables=state.max_observable + 1,
        detector_coords=dict(sorted(state.coords.items())),
    )
    logger.debug(
        f"Instantiated model with {model.num_channels} channels, {model.num_detectors} "
        f"detectors and {model.num_observables} observables"
    )
    return model
