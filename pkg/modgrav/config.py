import json
from typing import Callable, Optional, TypeVar

from modgrav.chameleon import ChameleonModel, SphereBody
from modgrav.exceptions import DomainError, ValidationError
from modgrav.exclusion.grid import GridSpec
from modgrav.forces import ExperimentSetup, newtonian_acceleration
from modgrav.optomech import OptomechConfig, metric_for
from modgrav.types import CouplingProfile, Metric, OutputFormat, Parameter
from modgrav.units import density_from_pressure
from modgrav.utils import merge_nested_dict, project_absolute_path

T = TypeVar("T")

# sections that describe one body: a user section replaces the default one,
# since any two of mass/radius/density fix the third
REPLACED_SECTIONS = ("source", "probe")


def _section(name: str, builder: Callable[[], T]) -> T:
    try:
        return builder()
    except ValidationError:
        raise
    except KeyError as e:
        raise ValidationError(f"{name}.{e.args[0]}", "missing value")
    except (DomainError, TypeError, ValueError) as e:
        raise ValidationError(name, str(e))


def default_config() -> dict:
    with open(project_absolute_path("config", "defaults.json"), "r") as cfg:
        return json.load(cfg)


class ScanConfig:
    def __init__(
        self,
        yukawa: GridSpec,
        chameleon: GridSpec,
        metric: Metric,
        probe_screening: bool,
        threads: Optional[int],
    ):
        self.yukawa = yukawa
        self.chameleon = chameleon
        self.metric = metric
        self.probe_screening = probe_screening
        self.threads = threads

    def serialize(self) -> dict:
        return {
            "yukawa": self.yukawa.serialize(),
            "chameleon": self.chameleon.serialize(),
            "metric": self.metric.value,
            "probe_screening": self.probe_screening,
            "threads": self.threads,
        }

    @staticmethod
    def deserialize(config: dict, profile: CouplingProfile) -> "ScanConfig":
        """
        Without an explicit metric the scan compares sigma against the
        sensitivity of the configured coupling profile.
        """
        threads = config.get("threads")
        metric = config.get("metric")
        if threads is not None and int(threads) < 1:
            raise ValidationError("scan.threads", f"must be positive, got {threads}")
        return ScanConfig(
            yukawa=GridSpec.deserialize(config["yukawa"], "scan.yukawa"),
            chameleon=GridSpec.deserialize(config["chameleon"], "scan.chameleon"),
            metric=metric_for(Parameter.SIGMA, profile) if metric is None else Metric(metric),
            probe_screening=bool(config["probe_screening"]),
            threads=int(threads) if threads is not None else None,
        )


class RunConfig:
    """
    Fully validated run configuration: project defaults with user overrides.
    """

    def __init__(
        self,
        setup: ExperimentSetup,
        optomech: OptomechConfig,
        model: ChameleonModel,
        casimir_temperature: float,
        scan: ScanConfig,
        output_format: OutputFormat,
        output_path: Optional[str],
    ):
        self.setup = setup
        self.optomech = optomech
        self.model = model
        self.casimir_temperature = casimir_temperature
        self.scan = scan
        self.output_format = output_format
        self.output_path = output_path

    @property
    def source(self) -> SphereBody:
        return self.setup.source

    @property
    def probe(self) -> SphereBody:
        return self.setup.probe

    @property
    def g_N(self) -> float:
        return newtonian_acceleration(self.setup)

    def serialize(self) -> dict:
        geometry = self.setup.serialize()
        return {
            "source": geometry.pop("source"),
            "probe": geometry.pop("probe"),
            "environment": {"rho_bg": geometry.pop("rho_bg")},
            "geometry": geometry,
            "optomech": self.optomech.serialize(),
            "model": {"M_ratio": self.model.planck_ratio, "Lambda": self.model.Lambda},
            "casimir": {"temperature": self.casimir_temperature},
            "scan": self.scan.serialize(),
            "output": {"format": self.output_format.value, "path": self.output_path},
        }

    @staticmethod
    def deserialize(config: dict) -> "RunConfig":
        source = _section("source", lambda: SphereBody.deserialize(config["source"]))
        probe = _section("probe", lambda: SphereBody.deserialize(config["probe"]))
        rho_bg = _section("environment", lambda: _background_density(config["environment"]))
        setup = _experiment_setup(config["geometry"], source, probe, rho_bg)
        optomech = _section(
            "optomech", lambda: OptomechConfig.deserialize(config["optomech"], probe.mass)
        )
        model = _section(
            "model",
            lambda: ChameleonModel.from_planck_ratio(
                float(config["model"]["M_ratio"]), float(config["model"]["Lambda"])
            ),
        )
        casimir_temperature = _section(
            "casimir", lambda: _casimir_temperature(config["casimir"]["temperature"])
        )
        scan = _section(
            "scan", lambda: ScanConfig.deserialize(config["scan"], optomech.coupling_profile)
        )
        output = config["output"]
        output_format = _section("output.format", lambda: OutputFormat(output["format"]))
        return RunConfig(
            setup, optomech, model, casimir_temperature, scan, output_format, output.get("path")
        )


def _casimir_temperature(value) -> float:
    temperature = float(value)
    if not temperature >= 0.0:
        raise ValidationError("casimir.temperature", f"must be non-negative, got {value}")
    return temperature


def _background_density(config: dict) -> float:
    if config.get("pressure") is not None:
        if config.get("temperature") is None:
            raise ValidationError("environment.temperature", "required together with pressure")
        return density_from_pressure(
            float(config["pressure"]), float(config["molecule_mass"]), float(config["temperature"])
        )
    rho_bg = float(config["rho_bg"])
    if not rho_bg > 0.0:
        raise ValidationError("environment.rho_bg", f"must be positive, got {rho_bg}")
    return rho_bg


def _experiment_setup(
    config: dict, source: SphereBody, probe: SphereBody, rho_bg: float
) -> ExperimentSetup:
    x0 = _section("geometry", lambda: float(config["x0"]))
    epsilon = _section("geometry", lambda: float(config["epsilon"]))
    if not x0 > 0.0:
        raise ValidationError("geometry.x0", f"must be positive, got {x0}")
    if not 0.0 < epsilon < 1.0:
        raise ValidationError("geometry.epsilon", f"must lie in (0, 1), got {epsilon}")
    if not x0 * (1.0 - epsilon) > source.radius + probe.radius:
        raise ValidationError(
            "geometry.x0",
            f"source and probe touch at closest approach {x0 * (1.0 - epsilon)} m",
        )
    return _section(
        "geometry",
        lambda: ExperimentSetup(
            x0=x0,
            epsilon=epsilon,
            omega0=float(config["omega0"]),
            phi0=float(config["phi0"]),
            source=source,
            probe=probe,
            rho_bg=rho_bg,
        ),
    )


def merge_with_defaults(user: dict) -> dict:
    merged = merge_nested_dict(default_config(), user)
    for name in REPLACED_SECTIONS:
        if name in user:
            merged[name] = user[name]
    return merged


def parse_config(user: dict) -> RunConfig:
    if not isinstance(user, dict):
        raise ValidationError("config", "top level must be an object")
    return RunConfig.deserialize(merge_with_defaults(user))


def read_config(path: str) -> dict:
    """
    Raw user tree; a file holding only whitespace is an empty config.
    Missing files raise FileNotFoundError.
    """
    with open(path, "r") as cfg:
        text = cfg.read()
    if not text.strip():
        return {}
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError("config", f"not valid JSON: {e}")


def load_config(path: str) -> RunConfig:
    return parse_config(read_config(path))
