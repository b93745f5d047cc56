"""
Shot sampling and decoding experiments.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, List, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from mle_decoder.decoders.factory import Decoder, build_decoder, describe
from mle_decoder.decoders.search import DecodeOutcome
from mle_decoder.exceptions import DecoderError, ExperimentAborted, InvalidParams
from mle_decoder.model import ErrorModel, Syndrome, observables_of, syndrome_of
from mle_decoder.simulator.stats import ShotStats, summarize
from mle_decoder.utils.config import DecoderConfig
from mle_decoder.utils.rng import Stream, make_rng

logger = logging.getLogger(__name__)


class Shot(BaseModel):
    """One sampled shot: the channels that fired and what they produced."""

    model_config = ConfigDict(frozen=True)

    fired_errors: Tuple[int, ...]
    syndrome: Syndrome
    true_observables: int


def sample_shot(model: ErrorModel, rng: np.random.Generator) -> Shot:
    """Fire every channel independently with its probability."""
    probabilities = np.fromiter(
        (c.probability for c in model.channels), dtype=float, count=model.num_channels
    )
    fired = tuple(int(e) for e in np.flatnonzero(rng.random(model.num_channels) < probabilities))
    return Shot(
        fired_errors=fired,
        syndrome=syndrome_of(model, fired),
        true_observables=observables_of(model, fired),
    )


def shot_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for shot ``index``."""
    return make_rng(seed, int(Stream.SAMPLING), index)


def decode_all(
    model: ErrorModel,
    syndromes: Sequence[Syndrome],
    decoder: Decoder,
    threads: int = 1,
) -> Iterator[Tuple[DecodeOutcome, float]]:
    """
    Decode syndromes, yielding (outcome, seconds) in input order.

    With ``threads > 1`` shots are decoded on a thread pool; results are still
    produced in input order.
    """

    def work(syndrome: Syndrome) -> Tuple[DecodeOutcome, float]:
        started = time.perf_counter()
        outcome = decoder(model, syndrome)
        return outcome, time.perf_counter() - started

    if threads <= 1:
        yield from map(work, syndromes)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        yield from pool.map(work, syndromes)


def run_experiment(
    model: ErrorModel,
    num_shots: int,
    rounds: int = 1,
    decoder: Union[DecoderConfig, Callable[[ErrorModel, Syndrome], DecodeOutcome], None] = None,
    seed: int = 0,
    threads: int = 1,
) -> ShotStats:
    """
    Sample ``num_shots`` shots, decode them and count logical errors.

    A shot counts as an error when any predicted observable bit differs from
    the sampled one, or when the decoder reports low confidence. Shot i draws
    from its own stream keyed by ``(seed, i)``, so results do not depend on
    ``threads``.

    Raises:
        InvalidParams: If num_shots < 1.
        ExperimentAborted: If a decoder raises; carries the stats so far with
            ``valid=False``.
    """
    if num_shots < 1:
        raise InvalidParams(f"num_shots must be at least 1, got {num_shots}")
    if decoder is None:
        decoder = DecoderConfig()
    if isinstance(decoder, DecoderConfig):
        label = describe(decoder)
        decode_fn = build_decoder(decoder)
    else:
        label = getattr(decoder, "__name__", "custom")
        decode_fn = decoder

    shots: List[Shot] = [sample_shot(model, shot_rng(seed, i)) for i in range(num_shots)]
    errors = 0
    low_confidence = 0
    nodes = 0
    times: List[float] = []
    results = decode_all(model, [s.syndrome for s in shots], decode_fn, threads)
    try:
        for shot, (outcome, elapsed) in zip(shots, results):
            times.append(elapsed)
            nodes += outcome.stats.nodes_expanded
            if outcome.low_confidence:
                low_confidence += 1
                errors += 1
            elif outcome.predicted_observables != shot.true_observables:
                errors += 1
    except DecoderError as e:
        partial = summarize(len(times), errors, rounds, low_confidence, nodes, times, valid=False)
        logger.error(f"Experiment aborted after {len(times)} shots: {e}")
        raise ExperimentAborted(f"Decoding failed after {len(times)} shots: {e}", partial) from e

    if low_confidence:
        logger.warning(f"{low_confidence} of {num_shots} shots were low-confidence")
    stats = summarize(num_shots, errors, rounds, low_confidence, nodes, times)
    logger.info(
        f"Experiment with {label}: {errors}/{num_shots} errors, "
        f"per-shot rate {stats.per_shot_rate:.5f}"
    )
    return stats
