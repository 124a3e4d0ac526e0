import datetime
import json
import logging
import math
import os
import uuid
from typing import Any, List, Optional

import click

PROJECT_DIR = os.path.join(os.path.dirname(os.path.realpath(__file__)), os.pardir)
THREADS_ENV = "MODGRAV_THREADS"


def project_absolute_path(*paths: str):
    return os.path.join(PROJECT_DIR, *paths)


class JSONSerializer(json.JSONEncoder):
    def default(self, o):
        if hasattr(o, "serialize"):
            return o.serialize()
        elif isinstance(o, complex):
            return [o.real, o.imag]
        else:
            try:
                return vars(o)
            except TypeError:
                return str(o)


def _finite_floats(obj: Any) -> Any:
    # JSON has no inf/nan literals
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _finite_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite_floats(v) for v in obj]
    return obj


def serialize(obj) -> str:
    if hasattr(obj, "serialize"):
        obj = obj.serialize()
    obj = json.loads(json.dumps(obj, cls=JSONSerializer))
    return json.dumps(_finite_floats(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def format_float(value: float) -> str:
    """
    Shortest round-trip decimal representation, independent of locale.
    """
    return repr(float(value))


def update_nested_dict(cfg: dict, keys: List[str], value: Optional[Any]):
    if value is not None:
        # make sure parent keys exist
        for key in keys[:-1]:
            cfg = cfg.setdefault(key, {})
        cfg[keys[-1]] = value


def merge_nested_dict(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = merge_nested_dict(out[key], value)
        else:
            out[key] = value
    return out


def create_output(directory: str) -> str:
    output_dir = os.path.abspath(directory)
    os.makedirs(output_dir, exist_ok=True)
    return output_dir


def worker_count(requested: Optional[int] = None) -> int:
    """
    Number of scan workers: the explicit request, else the CPU count,
    always capped by MODGRAV_THREADS when it is set.
    """
    count = requested if requested else (os.cpu_count() or 1)
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            count = min(count, int(cap))
        except ValueError:
            logging.warning(f"Ignoring non-integer {THREADS_ENV}={cap}")
    return max(1, count)


LOG_FORMAT = "%(asctime)s,%(msecs)d %(levelname)s %(name)s: %(message)s"
LOG_DATE_FORMAT = "%H:%M:%S"


def global_logging():
    logging.basicConfig(format=LOG_FORMAT, datefmt=LOG_DATE_FORMAT, level=logging.INFO)


class ColoredWrapper:
    """
    Prints colored, prefixed messages to stderr and optionally forwards them
    to a logger with a file handler. Debug messages appear only when verbose.
    """

    BOLD = "\033[1m"
    END = "\033[0m"
    COLORS = {
        logging.DEBUG: "\033[94m",
        logging.INFO: "\033[92m",
        logging.WARNING: "\033[93m",
        logging.ERROR: "\033[91m",
    }

    def __init__(self, prefix: str, logger: logging.Logger, verbose: bool = True, forward=False):
        self.prefix = prefix
        self.verbose = verbose
        self.forward = forward
        self._logging = logger

    def debug(self, message):
        if self.verbose:
            self._emit(logging.DEBUG, message)

    def info(self, message):
        self._emit(logging.INFO, message)

    def warning(self, message):
        self._emit(logging.WARNING, message)

    def error(self, message):
        self._emit(logging.ERROR, message)

    def _emit(self, level: int, message: str):
        timestamp = datetime.datetime.now().strftime("%H:%M:%S.%f")
        # stdout carries the JSON payloads of the CLI
        click.echo(
            f"{self.COLORS[level]}{self.BOLD}[{timestamp}]{self.END} "
            f"{self.BOLD}{self.prefix}{self.END} {message}",
            err=True,
        )
        if self.forward:
            self._logging.log(level, message)


class LoggingHandlers:
    """
    Logging options shared by every object of one ModGrav client: verbosity and
    an optional log file.
    """

    def __init__(self, verbose: bool = False, filename: Optional[str] = None):
        self.verbosity = verbose
        self.handler: Optional[logging.FileHandler] = None
        if filename:
            self.handler = logging.FileHandler(filename=filename, mode="w")
            self.handler.setFormatter(logging.Formatter(LOG_FORMAT, LOG_DATE_FORMAT))
            self.handler.setLevel(self.level)

    @property
    def level(self) -> int:
        return logging.DEBUG if self.verbosity else logging.INFO


class LoggingBase:
    def __init__(self):
        name = self.typename() if hasattr(self, "typename") else self.__class__.__name__
        self.log_name = f"{name}-{uuid.uuid4().hex[:4]}"
        self._logging = logging.getLogger(self.log_name)
        self._logging.setLevel(logging.INFO)
        self.wrapper = ColoredWrapper(self.log_name, self._logging, verbose=False)

    @property
    def logging(self) -> ColoredWrapper:
        return self.wrapper

    @property
    def logging_handlers(self) -> LoggingHandlers:
        return self._logging_handlers

    @logging_handlers.setter
    def logging_handlers(self, handlers: LoggingHandlers):
        self._logging_handlers = handlers
        self._logging.propagate = False
        has_file = handlers.handler is not None
        self.wrapper = ColoredWrapper(
            self.log_name, self._logging, verbose=handlers.verbosity, forward=has_file
        )
        if handlers.handler is not None:
            self._logging.setLevel(handlers.level)
            self._logging.addHandler(handlers.handler)
