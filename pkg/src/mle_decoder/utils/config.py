"""
Configuration module for the MLE decoder.
"""

import logging
import os
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field

logger = logging.getLogger(__name__)

# Path of the preset file, relative to the package directory unless absolute
PRESETS_PATH = os.getenv("MLE_DECODER_PRESETS_PATH", "config/presets.yaml")


class DecoderKind(str, Enum):
    """Decoders that can be selected from the CLI or an experiment."""

    ASTAR = "astar"
    DIJKSTRA = "dijkstra"
    BRUTE = "brute"
    ENSEMBLE = "ensemble"


class PresetName(str, Enum):
    """Named ensemble presets shipped in config/presets.yaml."""

    SHORT_BEAM = "short-beam"
    LONG_BEAM = "long-beam"


class SearchConfig(BaseModel):
    """Parameters of a single A* search. ``None`` means unbounded."""

    model_config = ConfigDict(frozen=True)

    beam: Optional[int] = Field(None, ge=0, description="Beam cutoff on residual detection events")
    pqlimit: Optional[int] = Field(
        None, gt=0, description="Maximum cumulative priority-queue insertions"
    )
    det_penalty: float = Field(0.0, ge=0.0, description="Queue penalty per residual detection")
    no_revisit: bool = Field(False, description="Skip nodes whose residual was already visited")
    at_most_two: bool = Field(
        False, description="Forbid errors that put a third chosen error on one detector"
    )
    detector_order: Optional[Tuple[int, ...]] = Field(
        None, description="Detector priority order; natural order when unset"
    )
    rng_seed: int = Field(
        0,
        ge=0,
        lt=2**64,
        description="Reserved for randomized tie-breaking; the search itself is deterministic",
    )

    @property
    def is_exact(self) -> bool:
        """True when the configuration guarantees a most-likely error."""
        return self.beam is None and not self.at_most_two and self.det_penalty == 0.0


class EnsembleConfig(BaseModel):
    """Beam climbing and detector reordering around a base search."""

    model_config = ConfigDict(frozen=True)

    max_beam: int = Field(0, ge=0, description="Largest beam B tried when climbing")
    num_orderings: int = Field(1, gt=0, description="Number of search attempts")
    beam_climbing: bool = Field(True, description="Cycle beams 0..B across attempts")
    base_config: SearchConfig = Field(default_factory=SearchConfig)
    seed: int = Field(0, ge=0, lt=2**64)


class DecoderConfig(BaseModel):
    """Which decoder to run and how it is configured."""

    model_config = ConfigDict(frozen=True)

    kind: DecoderKind = DecoderKind.ASTAR
    search: SearchConfig = Field(default_factory=SearchConfig)
    ensemble: Optional[EnsembleConfig] = None


def _resolve_path(path: str) -> str:
    if os.path.isabs(path):
        return path
    return os.path.abspath(os.path.join(os.path.dirname(__file__), "..", path))


def load_presets(path: Optional[str] = None) -> Dict[str, Dict[str, Any]]:
    """
    Load the preset definitions from YAML.

    Args:
        path: Preset file; defaults to PRESETS_PATH.

    Returns:
        Mapping of preset name to its raw parameters.

    Raises:
        ValueError: If the file is missing or not a mapping of mappings.
    """
    config_path = _resolve_path(path or PRESETS_PATH)
    try:
        with open(config_path, "r") as f:
            loaded = yaml.safe_load(f)
    except FileNotFoundError:
        raise ValueError(f"Preset file not found at {config_path}") from None
    except yaml.YAMLError as e:
        raise ValueError(f"Error parsing preset file {config_path}: {e}") from None

    if not isinstance(loaded, dict) or not all(isinstance(v, dict) for v in loaded.values()):
        raise ValueError(f"Invalid format in {config_path}: expected a mapping of presets")
    logger.debug(f"Loaded presets {list(loaded)} from {config_path}")
    return loaded


def preset_config(name: PresetName, seed: int = 0, path: Optional[str] = None) -> EnsembleConfig:
    """
    Build the ensemble configuration of a named preset.

    Raises:
        ValueError: If the preset is not defined in the preset file.
    """
    presets = load_presets(path)
    name = PresetName(name)
    if name.value not in presets:
        raise ValueError(f"Preset '{name.value}' not defined; available: {list(presets)}")
    raw = presets[name.value]
    base = SearchConfig(
        pqlimit=raw.get("pqlimit"),
        det_penalty=raw.get("det_penalty", 0.0),
        no_revisit=raw.get("no_revisit", False),
        at_most_two=raw.get("at_most_two", False),
        rng_seed=seed,
    )
    return EnsembleConfig(
        max_beam=raw["max_beam"],
        num_orderings=raw["num_orderings"],
        beam_climbing=raw.get("beam_climbing", True),
        base_config=base,
        seed=seed,
    )
