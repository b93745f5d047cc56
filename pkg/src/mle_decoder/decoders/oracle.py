"""
Reference decoders used to check the search.

``brute_force_mle`` enumerates every subset of channels with numpy and is the
ground truth for small models. ``dijkstra_decode`` is the exact search with the
heuristic switched off.
"""

import logging
import time
from typing import NamedTuple, Optional, Tuple

import numpy as np

from mle_decoder.decoders.search import DecodeOutcome, DecodeStats, decode
from mle_decoder.exceptions import TooLarge, Unsatisfiable
from mle_decoder.model import ErrorModel, Syndrome, observables_of, validate_syndrome
from mle_decoder.utils.config import SearchConfig

logger = logging.getLogger(__name__)

MAX_BRUTE_FORCE_CHANNELS = 25
COST_TOLERANCE = 1e-9


class BruteForceResult(NamedTuple):
    cost: float
    errors: Tuple[int, ...]
    optima_count: int


def _packed(detectors, words: int) -> np.ndarray:
    row = np.zeros(words, dtype=np.uint64)
    for d in detectors:
        row[d // 64] ^= np.uint64(1) << np.uint64(d % 64)
    return row


def brute_force_mle(model: ErrorModel, syndrome: Syndrome) -> BruteForceResult:
    """
    Exhaustive most-likely error.

    Subset j contains channel i exactly when bit i of j is set. Syndromes and
    costs of all 2^N subsets are built by doubling.

    Returns:
        The optimal cost, the lexicographically smallest optimal set, and how
        many sets reach the optimum within COST_TOLERANCE.

    Raises:
        TooLarge: If the model has more than MAX_BRUTE_FORCE_CHANNELS channels.
        Unsatisfiable: If no subset reproduces the syndrome.
    """
    n = model.num_channels
    if n > MAX_BRUTE_FORCE_CHANNELS:
        raise TooLarge(f"Brute force supports at most {MAX_BRUTE_FORCE_CHANNELS} channels, got {n}")
    validate_syndrome(model, syndrome)

    words = max(1, (model.num_detectors + 63) // 64)
    syndromes = np.zeros((1, words), dtype=np.uint64)
    costs = np.zeros(1, dtype=float)
    for channel in model.channels:
        flip = _packed(channel.detectors, words)
        syndromes = np.concatenate([syndromes, syndromes ^ flip])
        costs = np.concatenate([costs, costs + channel.weight])

    target = _packed(syndrome.activated, words)
    matching = np.flatnonzero(np.all(syndromes == target, axis=1))
    if matching.size == 0:
        raise Unsatisfiable(f"No error set produces syndrome {list(syndrome.detectors())}")

    matching_costs = costs[matching]
    optimum = matching_costs.min()
    optimal = matching[matching_costs <= optimum + COST_TOLERANCE]
    best = min(tuple(i for i in range(n) if int(j) >> i & 1) for j in optimal)
    return BruteForceResult(cost=model.path_cost(best), errors=best, optima_count=int(optimal.size))


def brute_force_decode(model: ErrorModel, syndrome: Syndrome) -> DecodeOutcome:
    """brute_force_mle wrapped as a decoder outcome."""
    started = time.perf_counter()
    result = brute_force_mle(model, syndrome)
    return DecodeOutcome(
        errors=result.errors,
        cost=result.cost,
        predicted_observables=observables_of(model, result.errors),
        stats=DecodeStats(
            wall_time=time.perf_counter() - started,
            num_pure_logical=model.num_pure_logical,
            attempts=1,
        ),
    )


def dijkstra_decode(
    model: ErrorModel, syndrome: Syndrome, pqlimit: Optional[int] = None
) -> DecodeOutcome:
    """Exact uniform-cost search: the A* search with a zero heuristic and no penalty."""
    return decode(model, syndrome, SearchConfig(pqlimit=pqlimit), use_heuristic=False)
