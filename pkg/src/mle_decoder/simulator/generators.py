"""
Small benchmark models: repetition code, rotated surface code under
code-capacity bit-flip noise, and random sparse parity-check codes.
"""

import logging
from typing import Dict, List, Tuple

from mle_decoder.exceptions import InvalidParams
from mle_decoder.model import Coords, ErrorChannel, ErrorModel, canonicalize
from mle_decoder.utils.rng import RngLike, Stream, as_rng

logger = logging.getLogger(__name__)

SURFACE_DISTANCES = (3, 5)


def _check_probability(p: float) -> None:
    if not 0.0 < p <= 0.5:
        raise InvalidParams(f"Probability must be in (0, 1/2], got {p}")


def gen_repetition_code(distance: int, p: float) -> ErrorModel:
    """
    Bit-flip repetition code of odd ``distance``.

    Channel i flips the neighbouring parity checks D(i-1) and D(i) that exist;
    channel 0 also flips L0.
    """
    if distance < 3 or distance % 2 == 0:
        raise InvalidParams(f"Repetition code distance must be odd and at least 3, got {distance}")
    _check_probability(p)
    num_detectors = distance - 1
    channels = [
        ErrorChannel(
            index=i,
            probability=p,
            detectors=tuple(d for d in (i - 1, i) if 0 <= d < num_detectors),
            observables=1 if i == 0 else 0,
        )
        for i in range(distance)
    ]
    return ErrorModel(channels=tuple(channels), num_detectors=num_detectors, num_observables=1)


def _is_z_plaquette(x: int, y: int, distance: int) -> bool:
    if (x + y) % 2 or not 1 <= x <= distance - 1:
        return False
    return 0 <= y <= distance


def gen_surface_code_capacity(distance: int, p: float) -> ErrorModel:
    """
    Rotated surface code, Z checks only, independent X flips on each data qubit.

    Data qubit (i, j) sits at coordinates (i, j); a check at plaquette corner
    (x, y) touches qubits i in {x-1, x}, j in {y-1, y} and has coordinates
    (x - 0.5, y - 0.5). Weight-two checks lie on the top and bottom edges.
    Qubits in column 0 flip L0.
    """
    if distance not in SURFACE_DISTANCES:
        raise InvalidParams(f"Surface code distance must be one of {SURFACE_DISTANCES}")
    _check_probability(p)

    plaquettes = [
        (x, y)
        for y in range(distance + 1)
        for x in range(distance + 1)
        if _is_z_plaquette(x, y, distance)
    ]
    coords: Dict[int, Coords] = {
        d: (x - 0.5, y - 0.5) for d, (x, y) in enumerate(plaquettes)
    }
    touching: Dict[Tuple[int, int], List[int]] = {}
    for d, (x, y) in enumerate(plaquettes):
        for i in (x - 1, x):
            for j in (y - 1, y):
                if 0 <= i < distance and 0 <= j < distance:
                    touching.setdefault((i, j), []).append(d)

    channels = []
    for j in range(distance):
        for i in range(distance):
            channels.append(
                ErrorChannel(
                    index=len(channels),
                    probability=p,
                    detectors=tuple(sorted(touching.get((i, j), []))),
                    observables=1 if i == 0 else 0,
                )
            )
    return ErrorModel(
        channels=tuple(channels),
        num_detectors=len(plaquettes),
        num_observables=1,
        detector_coords=coords,
    )


def gen_random_ldpc(
    num_errors: int,
    num_detectors: int,
    max_row_weight: int,
    p_range: Tuple[float, float],
    rng: RngLike = 0,
) -> ErrorModel:
    """
    Random sparse parity-check instance with one observable.

    Each channel flips between 1 and ``max_row_weight`` distinct detectors and
    has a probability drawn uniformly from ``p_range``. L0 is flipped by a
    random nonempty subset of the channels. The result is canonicalized, so
    channels drawn twice are merged.

    Raises:
        InvalidParams: On negative sizes, a zero row weight, a missing
            detector for a nonempty model, or a p_range outside (0, 1/2].
    """
    lo, hi = p_range
    if num_errors < 0 or num_detectors < 0 or max_row_weight < 1:
        raise InvalidParams(
            f"Invalid sizes N={num_errors}, K={num_detectors}, max_row_weight={max_row_weight}"
        )
    if num_errors > 0 and num_detectors == 0:
        raise InvalidParams("A model with channels needs at least one detector")
    if not 0.0 < lo <= hi <= 0.5:
        raise InvalidParams(f"p_range must satisfy 0 < lo <= hi <= 1/2, got {p_range}")
    if num_errors == 0:
        return ErrorModel(channels=(), num_detectors=num_detectors, num_observables=0)

    generator = as_rng(rng, Stream.GENERATOR)
    logical = generator.random(num_errors) < 0.5
    if not logical.any():
        logical[generator.integers(num_errors)] = True

    channels = []
    for i in range(num_errors):
        weight = int(generator.integers(1, min(max_row_weight, num_detectors) + 1))
        detectors = generator.choice(num_detectors, size=weight, replace=False)
        channels.append(
            ErrorChannel(
                index=i,
                probability=float(generator.uniform(lo, hi)),
                detectors=tuple(sorted(int(d) for d in detectors)),
                observables=int(logical[i]),
            )
        )
    model = ErrorModel(channels=tuple(channels), num_detectors=num_detectors, num_observables=1)
    return canonicalize(model)
