import functools
import logging
import os
import traceback
from typing import List, Optional, Tuple

import click

from modgrav import types
from modgrav.config import parse_config, read_config
from modgrav.exceptions import DomainError, NumericalError, ValidationError
from modgrav.modgrav import ModGrav
from modgrav.utils import create_output, global_logging, serialize, update_nested_dict

# largest accepted relative deviation between numeric and closed-form sensitivities
QFI_TOLERANCE = 1e-5

modgrav_client: Optional[ModGrav] = None


class ExceptionProcesser(click.Group):
    """
    Maps failures to exit codes: 1 for invalid options and for invalid or
    unreadable configuration, 2 for numerical and any other failure.
    """

    def invoke(self, ctx: click.Context):
        global modgrav_client
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            # invalid option values count as invalid input
            e.show()
            ctx.exit(1)
        except (click.exceptions.ClickException, click.exceptions.Exit, click.exceptions.Abort):
            raise
        except (ValidationError, DomainError) as e:
            logging.error(f"Invalid configuration: {e}")
            ctx.exit(1)
        except OSError as e:
            logging.error(f"Cannot read input: {e}")
            ctx.exit(1)
        except NumericalError as e:
            logging.error(f"Numerical failure: {e}")
            ctx.exit(2)
        except Exception as e:
            logging.error(e)
            traceback.print_exc()
            ctx.exit(2)
        finally:
            if modgrav_client is not None:
                modgrav_client.shutdown()
                modgrav_client = None


def common_params(func):
    @click.option(
        "--config",
        required=True,
        type=click.Path(dir_okay=False),
        help="Location of the run configuration (JSON).",
    )
    @click.option("--out", default=None, type=str, help="Write the result to this file.")
    @click.option("--output-dir", default=os.path.curdir, help="Output directory for results.")
    @click.option("--output-file", default="out.log", help="Output filename for logging.")
    @click.option("--verbose/--no-verbose", default=False, help="Verbose output.")
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        return func(*args, **kwargs)

    return wrapper


def scan_params(func):
    @click.option("--grid", default=None, type=str, help="Grid resolution as NX,NY.")
    @click.option(
        "--metric",
        default=None,
        type=click.Choice([m.value for m in types.Metric]),
        help="Quantity compared on the grid.",
    )
    @click.option(
        "--probe-screening",
        default=None,
        type=click.Choice(["on", "off"]),
        help="Include the screening and finite size of the probe.",
    )
    @click.option(
        "--format",
        "output_format",
        default=None,
        type=click.Choice([f.value for f in types.OutputFormat]),
        help="Grid file format.",
    )
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        return func(*args, **kwargs)

    return wrapper


def parse_grid(grid: Optional[str]) -> Optional[List[int]]:
    if grid is None:
        return None
    try:
        nx, ny = (int(v) for v in grid.split(","))
    except ValueError:
        raise ValidationError("--grid", f"expected NX,NY, got {grid!r}")
    return [nx, ny]


def parse_common_params(config, out, output_dir, output_file, verbose) -> Tuple[dict, ModGrav]:
    global modgrav_client
    config_obj = read_config(config)
    output_dir = create_output(output_dir)
    logging_filename = os.path.abspath(os.path.join(output_dir, output_file))

    modgrav_client = ModGrav(output_dir, verbose, logging_filename)
    modgrav_client.logging.debug(f"Loaded configuration from {os.path.abspath(config)}")
    return config_obj, modgrav_client


def emit(payload, out: Optional[str]):
    text = serialize(payload)
    click.echo(text, nl=False)
    if out:
        with open(out, "w", newline="\n") as out_f:
            out_f.write(text)


@click.group(cls=ExceptionProcesser)
def cli():
    global_logging()


@cli.command(types.Command.SENSITIVITY.value)
@common_params
def sensitivity(out, **kwargs):
    """
    Closed-form sensitivities and force sensitivities.
    """
    config, client = parse_common_params(out=out, **kwargs)
    emit(client.sensitivity(parse_config(config)), out)


@cli.command(types.Command.SCREENING.value)
@click.option("--m-ratio", default=None, type=float, help="Coupling mass M/M_P.")
@click.option("--lambda-ev", default=None, type=float, help="Energy scale Lambda in eV.")
@click.option(
    "--probe-screening",
    default=None,
    type=click.Choice(["on", "off"]),
    help="Screen the probe in the effective Yukawa parameters.",
)
@common_params
def screening(m_ratio, lambda_ev, probe_screening, out, **kwargs):
    """
    Screening radii, screening factors and background state of a chameleon.
    """
    config, client = parse_common_params(out=out, **kwargs)
    update_nested_dict(config, ["model", "M_ratio"], m_ratio)
    update_nested_dict(config, ["model", "Lambda"], lambda_ev)
    if probe_screening is not None:
        update_nested_dict(config, ["scan", "probe_screening"], probe_screening == "on")
    emit(client.screening(parse_config(config)), out)


def run_scan(
    scan_type: types.Command,
    section: str,
    grid,
    metric,
    probe_screening,
    output_format,
    out,
    **kwargs,
):
    config, client = parse_common_params(out=out, **kwargs)

    # CLI overrides JSON options
    update_nested_dict(config, ["scan", section, "resolution"], parse_grid(grid))
    update_nested_dict(config, ["scan", "metric"], metric)
    if probe_screening is not None:
        update_nested_dict(config, ["scan", "probe_screening"], probe_screening == "on")
    update_nested_dict(config, ["output", "format"], output_format)
    update_nested_dict(config, ["output", "path"], out)
    cfg = parse_config(config)

    scan = client.get_scan(scan_type, cfg)
    result = scan.run()
    path = client.scan_output_path(scan_type, cfg)
    boundary_path = result.write(path, cfg.output_format)
    client.logging.info(f"Saved grid to {os.path.abspath(path)}")
    client.logging.info(f"Saved boundaries to {os.path.abspath(boundary_path)}")


@cli.command(types.Command.SCAN_YUKAWA.value)
@scan_params
@common_params
def scan_yukawa(probe_screening, **kwargs):
    """
    Exclusion grid over the Yukawa parameters (lambda, alpha).
    """
    if probe_screening is not None:
        raise click.BadParameter(
            "the Yukawa scan treats the probe as a point particle",
            param_hint="--probe-screening",
        )
    run_scan(types.Command.SCAN_YUKAWA, "yukawa", probe_screening=None, **kwargs)


@cli.command(types.Command.SCAN_CHAMELEON.value)
@scan_params
@common_params
def scan_chameleon(**kwargs):
    """
    Exclusion grid over the chameleon parameters (M/M_P, Lambda).
    """
    run_scan(types.Command.SCAN_CHAMELEON, "chameleon", **kwargs)


@cli.command(types.Command.CASIMIR.value)
@click.option("--temperature", default=None, type=float, help="Temperature in K.")
@common_params
def casimir(temperature, out, **kwargs):
    """
    Thermal Casimir force and acceleration on the probe.
    """
    config, client = parse_common_params(out=out, **kwargs)
    update_nested_dict(config, ["casimir", "temperature"], temperature)
    emit(client.casimir(parse_config(config)), out)


@cli.command(types.Command.VERIFY_QFI.value)
@click.option("--cycles", default="1,5,10", type=str, help="Comma-separated values of n.")
@common_params
def verify_qfi(cycles, out, **kwargs):
    """
    Cross-check of numeric and closed-form sensitivities.
    """
    config, client = parse_common_params(out=out, **kwargs)
    try:
        n_values = [int(n) for n in cycles.split(",")]
    except ValueError:
        raise ValidationError("--cycles", f"expected comma-separated integers, got {cycles!r}")
    result = client.verify_qfi(parse_config(config), n_values)
    emit(result, out)
    if not result.max_deviation < QFI_TOLERANCE:
        raise NumericalError(
            "numeric and closed-form sensitivities disagree",
            {"max_deviation": result.max_deviation, "tolerance": QFI_TOLERANCE},
        )


def main():
    cli()


if __name__ == "__main__":
    main()
