import csv
import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from modgrav.exceptions import DomainError, ValidationError
from modgrav.types import Metric
from modgrav.utils import format_float

Point = Tuple[float, float]


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    nx: int
    y_min: float
    y_max: float
    ny: int

    def __post_init__(self):
        if not (0.0 < self.x_min < self.x_max and 0.0 < self.y_min < self.y_max):
            raise DomainError(f"grid ranges must be positive and increasing: {self}")
        if self.nx < 2 or self.ny < 2:
            raise DomainError(f"grid needs at least 2x2 points, got {self.nx}x{self.ny}")

    def x_axis(self) -> np.ndarray:
        return np.logspace(math.log10(self.x_min), math.log10(self.x_max), self.nx)

    def y_axis(self) -> np.ndarray:
        return np.logspace(math.log10(self.y_min), math.log10(self.y_max), self.ny)

    def with_resolution(self, nx: int, ny: int) -> "GridSpec":
        return GridSpec(self.x_min, self.x_max, nx, self.y_min, self.y_max, ny)

    def serialize(self) -> dict:
        return {
            "x": [self.x_min, self.x_max],
            "y": [self.y_min, self.y_max],
            "resolution": [self.nx, self.ny],
        }

    @staticmethod
    def deserialize(config: dict, name: str = "scan") -> "GridSpec":
        try:
            x_min, x_max = config["x"]
            y_min, y_max = config["y"]
            nx, ny = config["resolution"]
            return GridSpec(
                float(x_min), float(x_max), int(nx), float(y_min), float(y_max), int(ny)
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(name, f"malformed grid spec: {e}")


@dataclass(frozen=True)
class BoundaryLine:
    vertices: List[Point]
    level: float

    def serialize(self) -> dict:
        return {"level": self.level, "vertices": [list(v) for v in self.vertices]}


@dataclass
class ExclusionGrid:
    """
    ratio[j, i] belongs to (x_axis[i], y_axis[j]). Ratios below one mark
    parameter points the sensor would detect, i.e. excluded points.
    Cells without a finite value are explained in annotations, keyed "i,j".
    """

    x_axis: np.ndarray
    y_axis: np.ndarray
    ratio: np.ndarray
    metric: Metric
    probe_screening: bool = False
    annotations: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.ratio.shape != (len(self.y_axis), len(self.x_axis)):
            raise DomainError(
                f"ratio shape {self.ratio.shape} does not match axes "
                f"({len(self.y_axis)}, {len(self.x_axis)})"
            )
        for name, axis in (("x", self.x_axis), ("y", self.y_axis)):
            if np.any(np.diff(axis) <= 0.0):
                raise DomainError(f"{name} axis is not strictly increasing")

    def excluded_mask(self) -> np.ndarray:
        # eps*sigma compares forces; it does not state an exclusion
        if self.metric == Metric.FORCE_RATIO:
            return np.zeros(self.ratio.shape, dtype=bool)
        with np.errstate(invalid="ignore"):
            return np.isfinite(self.ratio) & (self.ratio < 1.0)

    def excluded_points(self) -> List[Point]:
        rows, cols = np.nonzero(self.excluded_mask())
        return [(float(self.x_axis[i]), float(self.y_axis[j])) for j, i in zip(rows, cols)]

    def rows(self):
        mask = self.excluded_mask()
        for j, y in enumerate(self.y_axis):
            for i, x in enumerate(self.x_axis):
                yield (
                    format_float(x),
                    format_float(y),
                    format_float(self.ratio[j, i]),
                    "1" if mask[j, i] else "0",
                )

    def write_csv(self, path: str):
        with open(path, "w", newline="") as csvfile:
            writer = csv.writer(csvfile, delimiter=",", lineterminator="\n")
            writer.writerow(["x", "y", "ratio", "excluded_flag"])
            for row in self.rows():
                writer.writerow(row)

    def serialize(self) -> dict:
        return {
            "metric": self.metric.value,
            "probe_screening": self.probe_screening,
            "x_axis": self.x_axis.tolist(),
            "y_axis": self.y_axis.tolist(),
            "ratio": self.ratio.tolist(),
            "annotations": self.annotations,
        }
