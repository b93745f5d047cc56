"""
Decoders: the A* search, its ensemble wrapper and the reference oracles.
"""

from mle_decoder.decoders.ensemble import decode_ensemble, gaussian_ordering, plan_attempts
from mle_decoder.decoders.factory import Decoder, build_decoder
from mle_decoder.decoders.oracle import brute_force_decode, brute_force_mle, dijkstra_decode
from mle_decoder.decoders.search import DecodeOutcome, DecodeStats, SearchNode, decode

__all__ = [
    "DecodeOutcome",
    "DecodeStats",
    "Decoder",
    "SearchNode",
    "brute_force_decode",
    "brute_force_mle",
    "build_decoder",
    "decode",
    "decode_ensemble",
    "dijkstra_decode",
    "gaussian_ordering",
    "plan_attempts",
]
