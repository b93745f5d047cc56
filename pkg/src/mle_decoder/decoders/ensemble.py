"""
Ensemble decoding: several searches with different detector orders and beams.

Attempt i uses beam ``i mod (B + 1)`` when beam climbing is on and the i-th
detector ordering drawn from the ensemble seed. Orderings project detector
coordinates on a random Gaussian direction; models without complete
coordinates fall back to uniformly random permutations.
"""

import logging
import threading
from collections import OrderedDict
from typing import List, Mapping, Optional, Sequence, Tuple

import numpy as np

from mle_decoder.decoders.search import DecodeOutcome, DecodeStats, decode
from mle_decoder.exceptions import MissingCoordinates
from mle_decoder.model import ErrorModel, Syndrome
from mle_decoder.utils.config import EnsembleConfig, SearchConfig
from mle_decoder.utils.rng import Stream, make_rng, random_permutation, standard_normals

logger = logging.getLogger(__name__)


def order_by_projection(
    coords: Mapping[int, Sequence[float]], direction: Sequence[float]
) -> List[int]:
    """Detectors sorted by the dot product of their coordinates with ``direction``.

    Equal projections keep index order.
    """
    z = np.asarray(direction, dtype=float)
    keyed = sorted((float(np.dot(np.asarray(c, dtype=float), z)), d) for d, c in coords.items())
    return [d for _, d in keyed]


def gaussian_ordering(
    coords: Mapping[int, Sequence[float]],
    rng: np.random.Generator,
    num_detectors: Optional[int] = None,
) -> List[int]:
    """
    Order detectors along a random direction drawn from a standard Gaussian.

    Args:
        coords: Coordinates of every detector 0..K-1, all of one dimension.
        rng: Source of the direction.
        num_detectors: K; defaults to the number of coordinate entries.

    Returns:
        A permutation listing detectors from highest to lowest priority.

    Raises:
        MissingCoordinates: If a detector lacks coordinates or dimensions differ.
    """
    if num_detectors is None:
        num_detectors = len(coords)
    if num_detectors == 0:
        return []
    if sorted(coords) != list(range(num_detectors)):
        raise MissingCoordinates(f"Coordinates are required for all {num_detectors} detectors")
    dims = {len(c) for c in coords.values()}
    if len(dims) != 1 or 0 in dims:
        raise MissingCoordinates(
            f"Detector coordinates have inconsistent dimensions {sorted(dims)}"
        )
    return order_by_projection(coords, standard_normals(rng, dims.pop()))


def plan_attempts(model: ErrorModel, config: EnsembleConfig) -> List[SearchConfig]:
    """The search configuration of every attempt, in attempt order."""
    rng = make_rng(config.seed, int(Stream.ORDERING))
    use_coords = model.has_complete_coords
    base = config.base_config
    attempts = []
    for i in range(config.num_orderings):
        if use_coords:
            order = gaussian_ordering(model.detector_coords, rng, model.num_detectors)
        else:
            order = random_permutation(rng, model.num_detectors)
        beam = i % (config.max_beam + 1) if config.beam_climbing else base.beam
        attempts.append(base.model_copy(update={"beam": beam, "detector_order": tuple(order)}))
    return attempts


_PLAN_CACHE_SIZE = 16
_plan_cache: "OrderedDict[Tuple[int, EnsembleConfig], Tuple[ErrorModel, List[SearchConfig]]]" = (
    OrderedDict()
)
_plan_lock = threading.Lock()


def _cached_plan(model: ErrorModel, config: EnsembleConfig) -> List[SearchConfig]:
    key = (id(model), config)
    with _plan_lock:
        hit = _plan_cache.get(key)
        if hit is not None and hit[0] is model:
            return hit[1]
    plan = plan_attempts(model, config)
    with _plan_lock:
        _plan_cache[key] = (model, plan)
        while len(_plan_cache) > _PLAN_CACHE_SIZE:
            _plan_cache.popitem(last=False)
    return plan


def decode_ensemble(model: ErrorModel, syndrome: Syndrome, config: EnsembleConfig) -> DecodeOutcome:
    """
    Run every planned attempt and keep the cheapest successful one.

    Ties go to fewer errors, then to the earlier attempt. The returned stats
    sum the counters of all attempts. If every attempt is low-confidence the
    result is low-confidence too.
    """
    best: Optional[DecodeOutcome] = None
    best_key: Tuple[float, int, int] = (0.0, 0, 0)
    stats = DecodeStats()
    for i, attempt in enumerate(_cached_plan(model, config)):
        outcome = decode(model, syndrome, attempt)
        stats = stats.merge(outcome.stats)
        if outcome.low_confidence:
            continue
        key = (outcome.cost, len(outcome.errors), i)
        if best is None or key < best_key:
            best, best_key = outcome, key
    if best is None:
        logger.debug(f"All {config.num_orderings} attempts were low-confidence")
        return DecodeOutcome(low_confidence=True, stats=stats)
    return best.model_copy(update={"stats": stats})
