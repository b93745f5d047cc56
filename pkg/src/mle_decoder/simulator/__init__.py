"""
Monte-Carlo simulation of decoders and benchmark model generators.
"""

from mle_decoder.simulator.generators import (
    gen_random_ldpc,
    gen_repetition_code,
    gen_surface_code_capacity,
)
from mle_decoder.simulator.sampling import Shot, decode_all, run_experiment, sample_shot
from mle_decoder.simulator.stats import ShotStats, compose_rounds, per_round_rate, wilson_interval

__all__ = [
    "Shot",
    "ShotStats",
    "compose_rounds",
    "decode_all",
    "gen_random_ldpc",
    "gen_repetition_code",
    "gen_surface_code_capacity",
    "per_round_rate",
    "run_experiment",
    "sample_shot",
    "wilson_interval",
]
