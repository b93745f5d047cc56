"""
Decoder selection from a DecoderConfig.
"""

import logging
from functools import partial
from typing import Callable

from mle_decoder.decoders.ensemble import decode_ensemble
from mle_decoder.decoders.oracle import brute_force_decode, dijkstra_decode
from mle_decoder.decoders.search import DecodeOutcome, decode
from mle_decoder.model import ErrorModel, Syndrome
from mle_decoder.utils.config import DecoderConfig, DecoderKind, EnsembleConfig

logger = logging.getLogger(__name__)

Decoder = Callable[[ErrorModel, Syndrome], DecodeOutcome]


def build_decoder(config: DecoderConfig) -> Decoder:
    """
    Return a callable decoding one syndrome with the configured decoder.

    Raises:
        ValueError: If the decoder kind is unknown.
    """
    if config.kind == DecoderKind.ASTAR:
        return partial(decode, config=config.search)
    if config.kind == DecoderKind.DIJKSTRA:
        return partial(dijkstra_decode, pqlimit=config.search.pqlimit)
    if config.kind == DecoderKind.BRUTE:
        return brute_force_decode
    if config.kind == DecoderKind.ENSEMBLE:
        ensemble = config.ensemble or EnsembleConfig(base_config=config.search)
        return partial(decode_ensemble, config=ensemble)
    raise ValueError(f"Unknown decoder kind: {config.kind}")


def describe(config: DecoderConfig) -> str:
    """Short label for logs and CSV rows."""
    if config.kind == DecoderKind.ENSEMBLE and config.ensemble is not None:
        e = config.ensemble
        return f"ensemble(B={e.max_beam},n={e.num_orderings})"
    if config.kind == DecoderKind.ASTAR and config.search.beam is not None:
        return f"astar(beam={config.search.beam})"
    return config.kind.value
