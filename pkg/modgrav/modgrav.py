import os
from typing import Dict, Optional, Sequence

from modgrav import types
from modgrav.chameleon import ChameleonModel, background_state, effective_yukawa, screening_radius
from modgrav.config import RunConfig
from modgrav.exclusion.scan import ChameleonScan, Scan, YukawaScan
from modgrav.forces import casimir_acceleration, casimir_force
from modgrav.optomech import (
    QFIVerification,
    closed_form_sensitivities,
    photon_number_variance,
    verify_closed_forms,
)
from modgrav.utils import LoggingBase, LoggingHandlers


class ModGrav(LoggingBase):
    """
    Entry point of the library: owns the output directory and the logging
    handlers, and runs every command on a RunConfig.
    """

    @property
    def output_dir(self) -> str:
        return self._output_dir

    @property
    def verbose(self) -> bool:
        return self._verbose

    @property
    def logging_filename(self) -> Optional[str]:
        return self._logging_filename

    def generate_logging_handlers(self, logging_filename: Optional[str] = None) -> LoggingHandlers:
        filename = logging_filename if logging_filename else self.logging_filename
        if filename in self._handlers:
            return self._handlers[filename]
        else:
            handlers = LoggingHandlers(verbose=self.verbose, filename=filename)
            self._handlers[filename] = handlers
            return handlers

    def __init__(
        self,
        output_dir: str,
        verbose: bool = False,
        logging_filename: Optional[str] = None,
    ):
        super().__init__()
        self._output_dir = output_dir
        self._verbose = verbose
        self._logging_filename = logging_filename
        self._handlers: Dict[Optional[str], LoggingHandlers] = {}
        self.logging_handlers = self.generate_logging_handlers()

        os.makedirs(self.output_dir, exist_ok=True)

    @staticmethod
    def typename() -> str:
        return "ModGrav"

    def sensitivity(self, cfg: RunConfig) -> dict:
        g_N = cfg.g_N
        epsilon = cfg.setup.epsilon
        closed = closed_form_sensitivities(cfg.optomech, g_N, epsilon)
        profile = cfg.optomech.coupling_profile
        selected = closed.for_profile(profile)
        variance = photon_number_variance(cfg.optomech.mu_c, cfg.optomech.r_sq, cfg.optomech.varphi)
        return {
            **closed.serialize(),
            "coupling_profile": profile.value,
            "delta_kappa": selected[types.Parameter.KAPPA.value],
            "delta_sigma": selected[types.Parameter.SIGMA.value],
            "g_N": g_N,
            "newtonian_force": cfg.probe.mass * g_N,
            "delta_N": variance**0.5,
            "r_T": cfg.optomech.r_T,
            "force_sensitivities": closed.force_sensitivities(cfg.probe.mass, g_N, epsilon),
        }

    def screening(self, cfg: RunConfig, model: Optional[ChameleonModel] = None) -> dict:
        model = model if model is not None else cfg.model
        bg = background_state(model, cfg.setup.rho_bg)
        alpha, lam = effective_yukawa(
            model, cfg.source, cfg.probe, cfg.setup.rho_bg, cfg.scan.probe_screening
        )
        self.logging.debug(f"Screening at M/M_P={model.planck_ratio}, Lambda={model.Lambda} eV")
        return {
            "model": model.serialize(),
            "background": bg.serialize(),
            "source": screening_radius(cfg.source, model, bg).serialize(),
            "probe": screening_radius(cfg.probe, model, bg).serialize(),
            "effective_yukawa": {"alpha": alpha, "lambda": lam},
        }

    def casimir(self, cfg: RunConfig, temperature: Optional[float] = None) -> dict:
        T = cfg.casimir_temperature if temperature is None else temperature
        setup = cfg.setup
        acceleration = casimir_acceleration(T, setup)
        return {
            "temperature": T,
            "force": casimir_force(T, setup.source.radius, setup.probe.radius, setup.x0),
            "acceleration": acceleration,
            "newtonian_acceleration": cfg.g_N,
            "relative_to_newtonian": acceleration / cfg.g_N,
        }

    def verify_qfi(self, cfg: RunConfig, n_values: Sequence[int] = (1, 5, 10)) -> QFIVerification:
        self.logging.info(f"Comparing numeric and closed-form sensitivities for n={list(n_values)}")
        result = verify_closed_forms(cfg.optomech, cfg.g_N, cfg.setup.epsilon, n_values)
        self.logging.info(f"Largest relative deviation {result.max_deviation:.3e}")
        return result

    def get_scan(
        self, scan_type: types.Command, cfg: RunConfig, logging_filename: Optional[str] = None
    ) -> Scan:
        scan: Scan
        if scan_type == types.Command.SCAN_YUKAWA:
            scan = YukawaScan(
                cfg.setup, cfg.optomech, cfg.scan.yukawa, cfg.scan.metric, cfg.scan.threads
            )
        elif scan_type == types.Command.SCAN_CHAMELEON:
            scan = ChameleonScan(
                cfg.setup,
                cfg.optomech,
                cfg.scan.chameleon,
                cfg.scan.metric,
                cfg.scan.probe_screening,
                cfg.scan.threads,
            )
        else:
            raise RuntimeError(f"Scan {scan_type} not supported!")
        scan.logging_handlers = self.generate_logging_handlers(logging_filename=logging_filename)
        return scan

    def scan_output_path(self, scan_type: types.Command, cfg: RunConfig) -> str:
        if cfg.output_path:
            return cfg.output_path
        extension = "csv" if cfg.output_format == types.OutputFormat.CSV else "json"
        return os.path.join(self.output_dir, f"{scan_type.value}.{extension}")

    def shutdown(self):
        for handlers in self._handlers.values():
            if handlers.handler is not None:
                handlers.handler.close()

    def __enter__(self):
        return self

    def __exit__(self, *args):
        self.shutdown()
