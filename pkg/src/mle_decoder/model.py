"""
Error model representation for the MLE decoder.

An error model is a hypergraph: each error channel fires independently with
its probability and flips a set of detectors and a mask of logical
observables. This module holds the channel and model records, the weight
function, and the syndrome algebra shared by the search, the oracles and the
simulator.
"""

import logging
import math
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

from mle_decoder.exceptions import (
    DomainError,
    InvalidPermutation,
    InvalidSyndrome,
    UnsupportedProbability,
)

logger = logging.getLogger(__name__)

Coords = Tuple[float, ...]


def weight_of(p: float) -> float:
    """
    Return the weight -ln(p / (1 - p)) of an error with probability p.

    Args:
        p: Error probability, strictly between 0 and 1.

    Returns:
        The natural-log weight. Non-negative when p <= 1/2.

    Raises:
        DomainError: If p is not in (0, 1).
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"Probability must be in (0, 1), got {p!r}")
    return math.log((1.0 - p) / p)


def xor_probability(p: float, q: float) -> float:
    """Probability that exactly one of two independent events with probabilities p, q occurs."""
    return p * (1.0 - q) + q * (1.0 - p)


class ErrorChannel(BaseModel):
    """A single independent error mechanism."""

    model_config = ConfigDict(frozen=True)

    index: int = Field(..., ge=0, description="Position of the channel in its model")
    probability: float = Field(..., gt=0.0, lt=1.0, description="Firing probability")
    detectors: Tuple[int, ...] = Field((), description="Sorted detector indices D(e)")
    observables: int = Field(0, ge=0, description="Bit-mask of flipped logical observables")

    @field_validator("detectors")
    @classmethod
    def _check_detectors(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        for a, b in zip(value, value[1:]):
            if a >= b:
                raise ValueError(f"Detectors must be strictly increasing, got {value}")
        if value and value[0] < 0:
            raise ValueError(f"Detector indices must be non-negative, got {value}")
        return value

    @computed_field  # type: ignore[prop-decorator]
    @property
    def weight(self) -> float:
        """Weight -ln(p / (1 - p)) of this channel."""
        return weight_of(self.probability)

    @property
    def is_pure_logical(self) -> bool:
        """True for undetectable channels that only flip observables."""
        return not self.detectors and self.observables != 0


class ErrorModel(BaseModel):
    """
    An immutable detector error model.

    ``incidence[d]`` lists the channels flipping detector ``d`` (the set E(d)) and is
    derived from the channels, so it always is the exact transpose of the
    channel-to-detector relation.
    """

    model_config = ConfigDict(frozen=True)

    channels: Tuple[ErrorChannel, ...] = ()
    num_detectors: int = Field(0, ge=0)
    num_observables: int = Field(0, ge=0)
    detector_coords: Dict[int, Coords] = Field(
        default_factory=dict, description="Coordinates of the detectors that declare them"
    )

    @model_validator(mode="after")
    def _check_consistency(self) -> "ErrorModel":
        for position, channel in enumerate(self.channels):
            if channel.index != position:
                raise ValueError(
                    f"Channel at position {position} carries index {channel.index}"
                )
            if channel.detectors and channel.detectors[-1] >= self.num_detectors:
                raise ValueError(
                    f"Channel {position} flips D{channel.detectors[-1]} but the model has "
                    f"{self.num_detectors} detectors"
                )
            if channel.observables >> self.num_observables:
                raise ValueError(
                    f"Channel {position} flips an observable beyond L{self.num_observables - 1}"
                )
        for detector in self.detector_coords:
            if not 0 <= detector < self.num_detectors:
                raise ValueError(f"Coordinates given for unknown detector D{detector}")
        return self

    @property
    def num_channels(self) -> int:
        return len(self.channels)

    @cached_property
    def incidence(self) -> Tuple[Tuple[int, ...], ...]:
        """E(d) for every detector d, each sorted by channel index."""
        table: List[List[int]] = [[] for _ in range(self.num_detectors)]
        for channel in self.channels:
            for detector in channel.detectors:
                table[detector].append(channel.index)
        return tuple(tuple(row) for row in table)

    @cached_property
    def weights(self) -> Tuple[float, ...]:
        return tuple(channel.weight for channel in self.channels)

    @property
    def num_pure_logical(self) -> int:
        """Number of undetectable channels that flip observables."""
        return sum(1 for channel in self.channels if channel.is_pure_logical)

    @property
    def has_complete_coords(self) -> bool:
        """True if every detector has coordinates of one common dimension."""
        if self.num_detectors == 0 or len(self.detector_coords) != self.num_detectors:
            return False
        return len({len(c) for c in self.detector_coords.values()}) == 1

    def path_cost(self, errors: Iterable[int]) -> float:
        """Sum of channel weights over ``errors``, summed in increasing index order."""
        weights = self.weights
        return sum(weights[e] for e in sorted(errors))


class Syndrome(BaseModel):
    """The set of activated detectors handed to a decoder."""

    model_config = ConfigDict(frozen=True)

    activated: FrozenSet[int] = frozenset()

    @classmethod
    def of(cls, detectors: Iterable[int]) -> "Syndrome":
        return cls(activated=frozenset(detectors))

    def __len__(self) -> int:
        return len(self.activated)

    def detectors(self) -> Tuple[int, ...]:
        """Activated detectors in increasing order."""
        return tuple(sorted(self.activated))

    def xor(self, other: "Syndrome") -> "Syndrome":
        return Syndrome(activated=self.activated ^ other.activated)


def validate_syndrome(model: ErrorModel, syndrome: Syndrome) -> None:
    """Raise InvalidSyndrome if the syndrome names detectors the model lacks."""
    bad = [d for d in syndrome.activated if not 0 <= d < model.num_detectors]
    if bad:
        raise InvalidSyndrome(
            f"Syndrome references detectors {sorted(bad)} but the model has "
            f"{model.num_detectors} detectors"
        )


def _check_channels(model: ErrorModel, errors: Iterable[int]) -> List[int]:
    indices = list(errors)
    for e in indices:
        if not 0 <= e < model.num_channels:
            raise IndexError(f"Channel index {e} out of range for {model.num_channels} channels")
    return indices


def syndrome_of(model: ErrorModel, errors: Iterable[int]) -> Syndrome:
    """Return D(F), the symmetric difference of D(e) over the channels in F."""
    flipped: set = set()
    for e in _check_channels(model, errors):
        flipped.symmetric_difference_update(model.channels[e].detectors)
    return Syndrome(activated=frozenset(flipped))


def observables_of(model: ErrorModel, errors: Iterable[int]) -> int:
    """Return the XOR of the observable masks of the channels in F."""
    mask = 0
    for e in _check_channels(model, errors):
        mask ^= model.channels[e].observables
    return mask


def canonicalize(model: ErrorModel) -> ErrorModel:
    """
    Bring a model into the form the decoders require.

    Channels with identical (detectors, observables) are merged left to right with
    the exclusive-or probability, the merged channel keeping the position of its
    first occurrence. Channels that flip nothing are dropped and indices are
    renumbered in order.

    Raises:
        UnsupportedProbability: If any channel has probability above 1/2.
    """
    for channel in model.channels:
        if channel.probability > 0.5:
            raise UnsupportedProbability(
                f"Channel {channel.index} has probability {channel.probability} > 1/2"
            )

    merged: Dict[Tuple[Tuple[int, ...], int], float] = {}
    dropped = 0
    for channel in model.channels:
        if not channel.detectors and not channel.observables:
            dropped += 1
            continue
        key = (channel.detectors, channel.observables)
        if key in merged:
            merged[key] = xor_probability(merged[key], channel.probability)
        else:
            merged[key] = channel.probability

    channels = tuple(
        ErrorChannel(index=i, probability=p, detectors=dets, observables=obs)
        for i, ((dets, obs), p) in enumerate(merged.items())
    )
    num_merged = model.num_channels - dropped - len(channels)
    if dropped or num_merged:
        logger.debug(f"Canonicalized model: merged {num_merged} and dropped {dropped} channels")

    result = ErrorModel(
        channels=channels,
        num_detectors=model.num_detectors,
        num_observables=model.num_observables,
        detector_coords=dict(model.detector_coords),
    )
    if result.num_pure_logical:
        logger.warning(
            f"Model has {result.num_pure_logical} undetectable channels that flip observables"
        )
    return result


def reorder_detectors(model: ErrorModel, perm: Sequence[int]) -> ErrorModel:
    """
    Relabel detectors so that detector d becomes perm[d].

    Channel order is unchanged; detectors, incidence and coordinates follow the
    relabeling.

    Raises:
        InvalidPermutation: If perm is not a bijection on 0..K-1.
    """
    perm = list(perm)
    if len(perm) != model.num_detectors or sorted(perm) != list(range(model.num_detectors)):
        raise InvalidPermutation(
            f"Expected a permutation of 0..{model.num_detectors - 1}, got {perm}"
        )
    channels = tuple(
        channel.model_copy(update={"detectors": tuple(sorted(perm[d] for d in channel.detectors))})
        for channel in model.channels
    )
    coords = {perm[d]: c for d, c in model.detector_coords.items()}
    return ErrorModel(
        channels=channels,
        num_detectors=model.num_detectors,
        num_observables=model.num_observables,
        detector_coords=dict(sorted(coords.items())),
    )


def invert_permutation(perm: Sequence[int]) -> List[int]:
    """Return the inverse of a permutation given as a sequence."""
    inverse = [0] * len(perm)
    for i, p in enumerate(perm):
        inverse[p] = i
    return inverse
