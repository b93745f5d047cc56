"""
Instruction records for the detector error model (DEM) text format.
"""

from enum import Enum
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class DemKind(str, Enum):
    """Instructions supported by the DEM grammar."""

    ERROR = "error"
    DETECTOR = "detector"
    LOGICAL_OBSERVABLE = "logical_observable"
    SHIFT_DETECTORS = "shift_detectors"
    REPEAT = "repeat"


class TargetKind(str, Enum):
    """Kinds of instruction targets."""

    DETECTOR = "D"
    OBSERVABLE = "L"
    SEPARATOR = "^"


class DemTarget(BaseModel):
    """A detector, an observable, or the ``^`` component separator."""

    model_config = ConfigDict(frozen=True)

    kind: TargetKind
    value: int = Field(0, ge=0)

    @classmethod
    def detector(cls, index: int) -> "DemTarget":
        return cls(kind=TargetKind.DETECTOR, value=index)

    @classmethod
    def observable(cls, index: int) -> "DemTarget":
        return cls(kind=TargetKind.OBSERVABLE, value=index)

    @classmethod
    def separator(cls) -> "DemTarget":
        return cls(kind=TargetKind.SEPARATOR)

    def __str__(self) -> str:
        if self.kind == TargetKind.SEPARATOR:
            return "^"
        return f"{self.kind.value}{self.value}"


class DemInstruction(BaseModel):
    """One instruction of a DEM program; repeat blocks nest their body."""

    model_config = ConfigDict(frozen=True)

    kind: DemKind
    probability: Optional[float] = Field(None, description="Error probability (error only)")
    targets: Tuple[DemTarget, ...] = ()
    coordinates: Tuple[float, ...] = Field((), description="Detector or shift coordinates")
    offset: int = Field(0, ge=0, description="Detector index shift (shift_detectors only)")
    body: Tuple["DemInstruction", ...] = ()
    repeat_count: Optional[int] = Field(None, ge=0)

    @model_validator(mode="after")
    def _check_kind_fields(self) -> "DemInstruction":
        if self.kind == DemKind.ERROR:
            if self.probability is None or not 0.0 < self.probability < 1.0:
                raise ValueError(f"error probability must be in (0, 1), got {self.probability}")
        elif self.probability is not None:
            raise ValueError(f"{self.kind.value} takes no probability")
        if self.kind == DemKind.REPEAT and self.repeat_count is None:
            raise ValueError("repeat requires a repeat_count")
        if self.kind != DemKind.REPEAT and (self.body or self.repeat_count is not None):
            raise ValueError(f"{self.kind.value} cannot carry a repeat body")
        return self


DemInstruction.model_rebuild()


class DemProgram(BaseModel):
    """An ordered sequence of DEM instructions."""

    model_config = ConfigDict(frozen=True)

    instructions: Tuple[DemInstruction, ...] = ()
