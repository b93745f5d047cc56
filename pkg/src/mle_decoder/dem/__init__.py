"""
Detector error model (DEM) text format: parsing, flattening and serialization.
"""

import logging
import os
from typing import Union

from mle_decoder.dem.flatten import instantiate
from mle_decoder.dem.parser import parse_dem
from mle_decoder.dem.program import DemInstruction, DemKind, DemProgram, DemTarget, TargetKind
from mle_decoder.dem.writer import model_to_program, serialize_dem
from mle_decoder.model import ErrorModel, canonicalize

logger = logging.getLogger(__name__)


def load_model(path: Union[str, "os.PathLike[str]"]) -> ErrorModel:
    """
    Read a DEM file and return its canonicalized error model.

    Raises:
        OSError: If the file cannot be read.
        DemParseError: If the text is not valid DEM.
        UnsupportedProbability: If a channel has probability above 1/2.
    """
    with open(path, "rb") as f:
        data = f.read()
    model = canonicalize(instantiate(parse_dem(data)))
    logger.info(
        f"Loaded {path}: {model.num_channels} channels, {model.num_detectors} detectors, "
        f"{model.num_observables} observables"
    )
    return model


def dump_model(model: ErrorModel, path: Union[str, "os.PathLike[str]"]) -> None:
    """Write a model to ``path`` as DEM text."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(serialize_dem(model_to_program(model)))


__all__ = [
    "DemInstruction",
    "DemKind",
    "DemProgram",
    "DemTarget",
    "TargetKind",
    "dump_model",
    "instantiate",
    "load_model",
    "model_to_program",
    "parse_dem",
    "serialize_dem",
]
