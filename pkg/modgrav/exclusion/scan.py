import math
import os
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from multiprocessing.pool import ThreadPool
from typing import Dict, List, Optional, Tuple

import numpy as np

from modgrav.chameleon import (
    ChameleonModel,
    effective_yukawa,
    screening_onset_lambda,
)
from modgrav.exceptions import ModGravError
from modgrav.exclusion.contour import extract_boundary
from modgrav.exclusion.grid import BoundaryLine, ExclusionGrid, GridSpec, Point
from modgrav.exclusion.hull import convex_hull
from modgrav.forces import (
    ExperimentSetup,
    LinearizedCoefficients,
    linearized_coefficients,
    newtonian_acceleration,
)
from modgrav.optomech import ClosedFormSensitivities, OptomechConfig, closed_form_sensitivities
from modgrav.types import Command, Metric, OutputFormat, Parameter
from modgrav.units import CONSTANTS
from modgrav.utils import LoggingBase, serialize, worker_count


def _ratio(
    coefficients: LinearizedCoefficients,
    sensitivities: ClosedFormSensitivities,
    metric: Metric,
    epsilon: float,
) -> float:
    if metric == Metric.FORCE_RATIO:
        return epsilon * coefficients.sigma
    signal = coefficients.kappa if metric.parameter == Parameter.KAPPA else coefficients.sigma
    if signal == 0.0:
        return math.inf
    return sensitivities.value(metric) / signal


def yukawa_ratio(
    alpha: float,
    lam: float,
    setup: ExperimentSetup,
    sensitivities: ClosedFormSensitivities,
    metric: Metric,
) -> float:
    """
    Delta theta / theta for a point-probe Yukawa modification (alpha, lambda).
    """
    coefficients = linearized_coefficients(alpha, lam, setup.x0, setup.probe.radius, False)
    return _ratio(coefficients, sensitivities, metric, setup.epsilon)


def chameleon_ratio(
    M_ratio: float,
    Lambda: float,
    setup: ExperimentSetup,
    sensitivities: ClosedFormSensitivities,
    metric: Metric,
    probe_screening: bool,
) -> float:
    """
    Delta theta / theta for the chameleon (M/M_P, Lambda), through its
    screened effective Yukawa parameters.
    """
    model = ChameleonModel.from_planck_ratio(M_ratio, Lambda)
    alpha, lam = effective_yukawa(model, setup.source, setup.probe, setup.rho_bg, probe_screening)
    coefficients = linearized_coefficients(
        alpha, lam, setup.x0, setup.probe.radius, probe_screening
    )
    return _ratio(coefficients, sensitivities, metric, setup.epsilon)


@dataclass
class ScanResult:
    grid: ExclusionGrid
    boundaries: List[BoundaryLine]
    hull: List[Point]
    screening_lines: Dict[str, BoundaryLine] = field(default_factory=dict)

    def serialize(self) -> dict:
        return {
            "metric": self.grid.metric.value,
            "probe_screening": self.grid.probe_screening,
            "boundaries": [line.serialize() for line in self.boundaries],
            "hull": [list(p) for p in self.hull],
            "screening_lines": {k: v.serialize() for k, v in self.screening_lines.items()},
            "annotations": self.grid.annotations,
        }

    def write(self, path: str, output_format: OutputFormat = OutputFormat.CSV) -> str:
        """
        Writes the grid to path and the boundaries, hull and screening
        lines to <stem>.boundary.json next to it. Returns the JSON path.
        """
        if output_format == OutputFormat.CSV:
            self.grid.write_csv(path)
        else:
            with open(path, "w", newline="\n") as out_f:
                out_f.write(serialize(self.grid))
        boundary_path = f"{os.path.splitext(path)[0]}.boundary.json"
        with open(boundary_path, "w", newline="\n") as out_f:
            out_f.write(serialize(self))
        return boundary_path


class Scan(ABC, LoggingBase):
    """
    Maps a per-point pipeline over a log-spaced parameter grid, one row
    per task. Rows come back in submission order, so the grid does not
    depend on the number of workers.
    """

    def __init__(
        self,
        setup: ExperimentSetup,
        cfg: OptomechConfig,
        grid: GridSpec,
        metric: Metric = Metric.SIGMA_MOD,
        threads: Optional[int] = None,
    ):
        super().__init__()
        self._setup = setup
        self._optomech = cfg
        self._grid = grid
        self._metric = metric
        self._threads = threads
        self._sensitivities = closed_form_sensitivities(
            cfg, newtonian_acceleration(setup), setup.epsilon
        )

    @property
    def setup(self) -> ExperimentSetup:
        return self._setup

    @property
    def sensitivities(self) -> ClosedFormSensitivities:
        return self._sensitivities

    @property
    def probe_screening(self) -> bool:
        return False

    @staticmethod
    @abstractmethod
    def name() -> str:
        pass

    @staticmethod
    @abstractmethod
    def typename() -> str:
        pass

    @abstractmethod
    def cell(self, x: float, y: float) -> float:
        pass

    def _row(self, j: int) -> Tuple[List[float], Dict[str, str]]:
        y = self._y_axis[j]
        values, notes = [], {}
        for i, x in enumerate(self._x_axis):
            try:
                value = self.cell(float(x), float(y))
                if math.isinf(value):
                    notes[f"{i},{j}"] = "no signal: the modification vanishes"
            except ModGravError as e:
                value = math.nan
                notes[f"{i},{j}"] = str(e)
            values.append(value)
        return values, notes

    def compute_grid(self) -> ExclusionGrid:
        self._x_axis = self._grid.x_axis()
        self._y_axis = self._grid.y_axis()
        workers = worker_count(self._threads)
        self.logging.info(
            f"{self.name()}: {self._grid.nx}x{self._grid.ny} {self._metric.value} grid "
            f"with {workers} workers"
        )
        with ThreadPool(workers) as pool:
            rows = pool.map(self._row, range(self._grid.ny))

        annotations: Dict[str, str] = {}
        for _, notes in rows:
            annotations.update(notes)
        if annotations:
            self.logging.warning(f"{len(annotations)} cells have no finite ratio")
        return ExclusionGrid(
            x_axis=self._x_axis,
            y_axis=self._y_axis,
            ratio=np.array([values for values, _ in rows], dtype=float),
            metric=self._metric,
            probe_screening=self.probe_screening,
            annotations=annotations,
        )

    def screening_lines(self, grid: ExclusionGrid) -> Dict[str, BoundaryLine]:
        return {}

    def run(self) -> ScanResult:
        grid = self.compute_grid()
        boundaries = extract_boundary(grid, 1.0)
        excluded = grid.excluded_points()
        hull = convex_hull(excluded) if excluded else []
        self.logging.debug(
            f"{len(boundaries)} boundary lines, {len(excluded)} excluded cells, "
            f"{len(hull)} hull vertices"
        )
        return ScanResult(grid, boundaries, hull, self.screening_lines(grid))


class YukawaScan(Scan):
    """
    x axis: lambda in m, y axis: alpha.
    """

    @staticmethod
    def name() -> str:
        return Command.SCAN_YUKAWA.value

    @staticmethod
    def typename() -> str:
        return "Exclusion.YukawaScan"

    def cell(self, x: float, y: float) -> float:
        return yukawa_ratio(y, x, self._setup, self._sensitivities, self._metric)


class ChameleonScan(Scan):
    """
    x axis: M/M_P, y axis: Lambda in eV.
    """

    def __init__(
        self,
        setup: ExperimentSetup,
        cfg: OptomechConfig,
        grid: GridSpec,
        metric: Metric = Metric.SIGMA_MOD,
        probe_screening: bool = False,
        threads: Optional[int] = None,
    ):
        super().__init__(setup, cfg, grid, metric, threads)
        self._probe_screening = probe_screening

    @property
    def probe_screening(self) -> bool:
        return self._probe_screening

    @staticmethod
    def name() -> str:
        return Command.SCAN_CHAMELEON.value

    @staticmethod
    def typename() -> str:
        return "Exclusion.ChameleonScan"

    def cell(self, x: float, y: float) -> float:
        return chameleon_ratio(
            x, y, self._setup, self._sensitivities, self._metric, self._probe_screening
        )

    def screening_lines(self, grid: ExclusionGrid) -> Dict[str, BoundaryLine]:
        return {
            "source": screening_onset_line(self._setup, grid, source=True),
            "probe": screening_onset_line(self._setup, grid, source=False),
        }


def screening_onset_line(
    setup: ExperimentSetup, grid: ExclusionGrid, source: bool
) -> BoundaryLine:
    """
    S = 0 locus of the source (or probe) sampled at the grid's M/M_P
    values, clipped to the Lambda range of the grid.
    """
    body = setup.source if source else setup.probe
    y_min, y_max = float(grid.y_axis[0]), float(grid.y_axis[-1])
    vertices = []
    for x in grid.x_axis:
        M = float(x) * CONSTANTS.reduced_planck_mass_eV
        Lambda = screening_onset_lambda(body, setup.rho_bg, M)
        if y_min <= Lambda <= y_max:
            vertices.append((float(x), Lambda))
    return BoundaryLine(vertices=vertices, level=0.0)


def scan_yukawa(
    setup: ExperimentSetup,
    cfg: OptomechConfig,
    grid_spec: GridSpec,
    metric: Metric = Metric.SIGMA_MOD,
    threads: Optional[int] = None,
) -> ExclusionGrid:
    return YukawaScan(setup, cfg, grid_spec, metric, threads).compute_grid()


def scan_chameleon(
    setup: ExperimentSetup,
    cfg: OptomechConfig,
    model_grid_spec: GridSpec,
    probe_screening: bool,
    metric: Metric = Metric.SIGMA_MOD,
    threads: Optional[int] = None,
) -> Tuple[ExclusionGrid, BoundaryLine, BoundaryLine]:
    scan = ChameleonScan(setup, cfg, model_grid_spec, metric, probe_screening, threads)
    grid = scan.compute_grid()
    lines = scan.screening_lines(grid)
    return grid, lines["source"], lines["probe"]
