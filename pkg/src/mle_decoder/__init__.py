"""
Most-likely-error decoding of detector error models by A* search.
"""

from mle_decoder.decoders import (
    DecodeOutcome,
    build_decoder,
    decode,
    decode_ensemble,
    dijkstra_decode,
)
from mle_decoder.dem import load_model
from mle_decoder.model import ErrorChannel, ErrorModel, Syndrome
from mle_decoder.simulator import run_experiment
from mle_decoder.utils.config import DecoderConfig, EnsembleConfig, SearchConfig

__version__ = "0.1.0"

__all__ = [
    "DecodeOutcome",
    "DecoderConfig",
    "EnsembleConfig",
    "ErrorChannel",
    "ErrorModel",
    "SearchConfig",
    "Syndrome",
    "build_decoder",
    "decode",
    "decode_ensemble",
    "dijkstra_decode",
    "load_model",
    "run_experiment",
]
