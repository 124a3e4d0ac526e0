from enum import Enum


class Metric(str, Enum):
    SIGMA_CONST = "sigma_const"
    SIGMA_MOD = "sigma_mod"
    KAPPA_CONST = "kappa_const"
    KAPPA_MOD = "kappa_mod"
    FORCE_RATIO = "force_ratio"

    @property
    def parameter(self) -> "Parameter":
        if self in (Metric.KAPPA_CONST, Metric.KAPPA_MOD):
            return Parameter.KAPPA
        return Parameter.SIGMA


class Parameter(str, Enum):
    KAPPA = "kappa"
    SIGMA = "sigma"


class CouplingProfile(str, Enum):
    CONSTANT = "constant"
    RESONANT_COSINE = "resonant_cosine"


class Command(str, Enum):
    SENSITIVITY = "sensitivity"
    SCREENING = "screening"
    SCAN_YUKAWA = "scan-yukawa"
    SCAN_CHAMELEON = "scan-chameleon"
    CASIMIR = "casimir"
    VERIFY_QFI = "verify-qfi"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"
