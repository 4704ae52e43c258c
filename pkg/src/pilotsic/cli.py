#!/usr/bin/env python3
# This file is part of the pilotsic project
# https://github.com/pilotsic/pilotsic
#
# Copyright (c) 2023-2026 pilotsic contributors - MIT License
# SPDX-License-Identifier: MIT

"""CLI for pilotsic.

Exit codes: 0 success, 1 usage or config error, 2 runtime failure.
"""

import sys
import json
import math
import logging
from typing import Any
from typing import Dict
from typing import List
from typing import Tuple
from typing import Callable
from typing import Optional
from typing import Sequence
from typing import NamedTuple

import click

from . import harness
from . import analysis
from . import parameters

try:
    import pretty_traceback

    pretty_traceback.install(envvar='ENABLE_PRETTY_TRACEBACK')
except ImportError:
    pass  # no need to fail because of missing dev dependency


logger = logging.getLogger("pilotsic.cli")

VERSION = "2026.1001-beta"


class LogConfig(NamedTuple):
    fmt: str
    lvl: int


LOG_FORMAT_DEFAULT = "%(levelname)-7s - %(message)s"

LOG_FORMAT_VERBOSE = "%(asctime)s.%(msecs)03d %(levelname)-7s %(name)-16s - %(message)s"


def _parse_logging_config(verbosity: int) -> LogConfig:
    if verbosity == 0:
        return LogConfig(LOG_FORMAT_DEFAULT, logging.WARNING)
    elif verbosity == 1:
        return LogConfig(LOG_FORMAT_VERBOSE, logging.INFO)
    else:
        assert verbosity >= 2
        return LogConfig(LOG_FORMAT_VERBOSE, logging.DEBUG)


_PREV_VERBOSITY: int = -1


def _configure_logging(verbosity: int = 0) -> None:
    # pylint: disable=global-statement
    global _PREV_VERBOSITY

    if verbosity <= _PREV_VERBOSITY:
        # allow function to be called multiple times
        return

    _PREV_VERBOSITY = verbosity

    # remove previous logging handlers
    for handler in list(logging.root.handlers):
        logging.root.removeHandler(handler)

    log_cfg = _parse_logging_config(verbosity)
    logging.basicConfig(level=log_cfg.lvl, format=log_cfg.fmt, datefmt="%Y-%m-%dT%H:%M:%S")


def echo(msg: str = "") -> bool:
    click.echo(msg)
    return True


class RuntimeFailure(click.ClickException):
    exit_code = 2


class ExitCodeGroup(click.Group):
    """Usage errors exit with 1 instead of click's default of 2."""

    def main(self, *args: Any, **kwargs: Any) -> Any:  # type: ignore[override]
        kwargs.pop('standalone_mode', None)
        try:
            return super().main(*args, standalone_mode=False, **kwargs)
        except click.UsageError as err:
            err.show()
            sys.exit(1)
        except click.ClickException as err:
            err.show()
            sys.exit(err.exit_code)
        except click.Abort:
            echo("Aborted!")
            sys.exit(1)


def parse_values(values_arg: str) -> List[float]:
    """Parse 'start:stop:step' (stop inclusive) or a comma separated list.

    >>> parse_values("1:2:0.5")
    [1.0, 1.5, 2.0]
    >>> parse_values("50,100")
    [50.0, 100.0]
    """
    values_arg = values_arg.strip()
    if ":" in values_arg:
        parts = values_arg.split(":")
        if len(parts) != 3:
            raise ValueError(f"Invalid range {values_arg!r}, expected start:stop:step")
        start, stop, step = map(float, parts)
        if step <= 0 or stop < start:
            raise ValueError(f"Invalid range {values_arg!r}")
        num_steps = math.floor((stop - start) / step + 1e-9)
        return [round(start + i * step, 12) for i in range(num_steps + 1)]
    else:
        values = [float(part) for part in values_arg.split(",") if part.strip()]
        if not values:
            raise ValueError(f"Invalid value list {values_arg!r}")
        return values


def _init_config(
    config_path: Optional[str],
    overrides  : Sequence[str],
    seed       : Optional[int],
) -> parameters.SystemConfig:
    try:
        if config_path:
            config = parameters.load_config(config_path)
        else:
            config = parameters.init_config()
        config = parameters.apply_overrides(config, overrides)
        if seed is not None:
            config = parameters.validate_config(config._replace(seed=seed))
    except parameters.ConfigError as err:
        raise click.UsageError(str(err))
    return config


def _write_table(table: harness.ResultTable, out: str, fmt: str) -> None:
    try:
        path = harness.write_results(table, out, harness.ResultFormat(fmt), version=VERSION)
    except harness.ResultWriteError as err:
        raise RuntimeFailure(str(err))
    echo(f"Wrote {path}")


_opt_verbose = click.option(
    '-v',
    '--verbose',
    count=True,
    help="Control log level. -vv for debug level.",
)

_opt_config = click.option(
    '-c',
    '--config',
    'config_path',
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="JSON config document (field names of SystemConfig)",
)

_opt_set = click.option(
    '--set',
    'overrides',
    type=str,
    multiple=True,
    metavar="KEY=VALUE",
    help="Override a config field, may be given multiple times",
)

_opt_out = click.option(
    '-o',
    '--out',
    type=click.Path(dir_okay=False, writable=True),
    required=True,
    help="Result file, a manifest is written to <out>.manifest.json",
)

_opt_format = click.option(
    '-f',
    '--format',
    'fmt',
    type=click.Choice([fmt.value for fmt in harness.ResultFormat]),
    default=harness.ResultFormat.CSV.value,
    show_default=True,
    help="Result file format",
)

_opt_trials = click.option(
    '-n',
    '--trials',
    type=click.IntRange(min=1),
    default=parameters.DEFAULT_TRIALS,
    show_default=True,
    help="Monte Carlo trials per point (env: PILOTSIC_TRIALS)",
)

_opt_workers = click.option(
    '-w',
    '--workers',
    type=click.IntRange(min=1),
    default=parameters.DEFAULT_WORKERS,
    show_default=True,
    help="Worker processes (env: PILOTSIC_WORKERS)",
)

_opt_seed = click.option(
    '--seed',
    type=click.IntRange(min=0, max=parameters.MAX_SEED),
    default=None,
    help="Master seed, overrides the seed of the config",
)

_opt_aloha_optimum = click.option(
    '--aloha-optimum',
    'aloha_at_optimum',
    is_flag=True,
    default=False,
    help="Evaluate ALOHA on its own frame with p_a = tau / K",
)


@click.group(cls=ExitCodeGroup, context_settings={'help_option_names': ["-h", "--help"]})
@_opt_verbose
def cli(verbose: int = 0) -> None:
    """CLI for pilotsic 2026.1001-beta."""
    _configure_logging(verbose)


@cli.command()
def version() -> None:
    """Show version number."""
    echo("pilotsic version: 2026.1001-beta")


@cli.command()
@_opt_config
@_opt_set
@_opt_out
@_opt_format
@_opt_trials
@_opt_workers
@_opt_seed
@_opt_aloha_optimum
@_opt_verbose
def run(
    config_path     : Optional[str],
    overrides       : Tuple[str, ...],
    out             : str,
    fmt             : str  = harness.ResultFormat.CSV.value,
    trials          : int  = parameters.DEFAULT_TRIALS,
    workers         : int  = parameters.DEFAULT_WORKERS,
    seed            : Optional[int] = None,
    aloha_at_optimum: bool = False,
    verbose         : int  = 0,
) -> None:
    """Run one experiment, one result row per scheme."""
    _configure_logging(verbose)
    config = _init_config(config_path, overrides, seed)
    try:
        result = harness.run_experiment(config, trials, workers, aloha_at_optimum)
    except ValueError as err:
        raise RuntimeFailure(str(err))
    table = [harness.SweepRow(harness.NO_AXIS, None, result)]
    _write_table(table, out, fmt)


def _run_sweep(
    config          : parameters.SystemConfig,
    axis            : str,
    values          : Sequence[float],
    trials          : int,
    workers         : int,
    aloha_at_optimum: bool,
    out             : str,
    fmt             : str,
    family          : Sequence[int] = (),
) -> None:
    for value in values:
        try:
            harness.sweep_config(config, axis, value)
        except ValueError as err:
            raise click.UsageError(f"Invalid --values for axis {axis}: {err}")

    try:
        if family:
            table = harness.sweep_family(config, axis, values, family, trials, workers, aloha_at_optimum)
        else:
            table = harness.sweep(config, axis, values, trials, workers, aloha_at_optimum)
    except ValueError as err:
        raise RuntimeFailure(str(err))
    _write_table(table, out, fmt)


@cli.command()
@click.option(
    '-a',
    '--axis',
    type=click.Choice(list(harness.SWEEP_AXES)),
    required=True,
    help="Parameter to sweep",
)
@click.option(
    '--values',
    'values_arg',
    type=str,
    required=True,
    help="start:stop:step (stop inclusive) or a comma separated list",
)
@_opt_config
@_opt_set
@_opt_out
@_opt_format
@_opt_trials
@_opt_workers
@_opt_seed
@_opt_aloha_optimum
@_opt_verbose
def sweep(
    axis            : str,
    values_arg      : str,
    config_path     : Optional[str],
    overrides       : Tuple[str, ...],
    out             : str,
    fmt             : str  = harness.ResultFormat.CSV.value,
    trials          : int  = parameters.DEFAULT_TRIALS,
    workers         : int  = parameters.DEFAULT_WORKERS,
    seed            : Optional[int] = None,
    aloha_at_optimum: bool = False,
    verbose         : int  = 0,
) -> None:
    """Run one experiment per value of a parameter."""
    _configure_logging(verbose)
    config = _init_config(config_path, overrides, seed)
    try:
        values = parse_values(values_arg)
    except ValueError as err:
        raise click.UsageError(str(err))
    _run_sweep(config, axis, values, trials, workers, aloha_at_optimum, out, fmt)


class Preset(NamedTuple):

    axis            : str
    values          : Tuple[float, ...]
    trials          : int
    aloha_at_optimum: bool
    family          : Tuple[int, ...] = ()


FULL_TRIALS = 10000

K_FAMILY = (50, 100, 200, 400)

PRESETS: Dict[str, Preset] = {
    # goodput vs average degree, one curve per K
    'fig6': Preset("avg_degree", (1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0), 500, False, K_FAMILY),
    # goodput vs number of users, ALOHA at its optimum
    'fig7': Preset("K", K_FAMILY, 300, True),
    # BLER vs number of antennas, one curve per K
    'fig8': Preset("M", (50, 100, 200, 400), 500, False, K_FAMILY),
}


@cli.command()
@click.argument('figure', type=click.Choice(sorted(PRESETS)))
@click.option(
    '-o',
    '--out',
    type=click.Path(dir_okay=False, writable=True),
    default=None,
    help="Result file  [default: <figure>.<format>]",
)
@_opt_format
@click.option(
    '-n',
    '--trials',
    type=click.IntRange(min=1),
    default=None,
    help="Trials per point  [default: preset value]",
)
@click.option(
    '--full',
    is_flag=True,
    default=False,
    help=f"Use {FULL_TRIALS} trials per point",
)
@_opt_workers
@_opt_seed
@_opt_verbose
def reproduce(
    figure : str,
    out    : Optional[str],
    fmt    : str = harness.ResultFormat.CSV.value,
    trials : Optional[int] = None,
    full   : bool = False,
    workers: int = parameters.DEFAULT_WORKERS,
    seed   : Optional[int] = None,
    verbose: int = 0,
) -> None:
    """Data for one of the reference figures.

    Defaults: K=100, M=100, tau=5, beta=24, average degree 2.5, Clarke
    channels with 20 scatterers, 1.8 GHz carrier, 3 km/h, noise power 0.1.
    """
    _configure_logging(verbose)
    preset = PRESETS[figure]
    config = parameters.init_config(
        K=parameters.DEFAULT_K,
        M=100,
        channel_backend=parameters.ChannelBackend.CLARKE,
        seed=parameters.DEFAULT_SEED if seed is None else seed,
    )

    if trials is not None:
        n_trials = trials
    elif full:
        n_trials = FULL_TRIALS
    else:
        n_trials = preset.trials

    out_path = out or f"{figure}.{fmt}"
    family   = list(preset.family)
    logger.info(f"reproduce {figure}: {preset.axis}={list(preset.values)} K={family} trials={n_trials}")
    _run_sweep(
        config, preset.axis, preset.values, n_trials, workers, preset.aloha_at_optimum, out_path, fmt, family
    )


def _require(formula: str, **kwargs: Any) -> None:
    for name, val in kwargs.items():
        if val is None:
            flag = "--" + name.replace("_", "-")
            raise click.UsageError(f"Formula {formula} requires {flag}")


def _eval_degree_pmf(K: int, tau: int, pa: float, d: int) -> float:
    return analysis.degree_pmf(analysis.init_degree_params(K, pa, tau), d)


def _eval_aloha_throughput(K: int, tau: int, pa: float, beta: Optional[int]) -> float:
    beta = parameters.default_beta(K, tau) if beta is None else beta
    return analysis.aloha_unique_throughput(K, pa, tau, beta)


FormulaFn = Callable[..., float]

# formula name -> (function, required arguments)
FORMULAS: Dict[str, Tuple[FormulaFn, Tuple[str, ...]]] = {
    'degree_pmf'      : (_eval_degree_pmf                 , ("K", "tau", "pa", "d")),
    'aloha_pa'        : (analysis.aloha_optimal_pa        , ("K", "tau")),
    'pa_from_dbar'    : (analysis.pa_from_avg_degree      , ("d_bar", "K", "tau")),
    'avg_degree'      : (analysis.avg_degree              , ("pa", "K", "tau")),
    'p_star'          : (analysis.collision_free_prob     , ("K", "pa", "tau")),
    'delay_pmf'       : (analysis.delay_pmf               , ("p_star", "delta")),
    'expected_delay'  : (analysis.expected_delay          , ("p_star",)),
    'aloha_throughput': (_eval_aloha_throughput           , ("K", "tau", "pa")),
}


@cli.command()
@click.argument('formula', type=click.Choice(list(FORMULAS)))
@click.option('--K'     , 'K'     , type=int  , default=parameters.DEFAULT_K  , show_default=True, help="Users")
@click.option('--tau'   , 'tau'   , type=int  , default=parameters.DEFAULT_TAU, show_default=True, help="Pilots")
@click.option('--pa'    , 'pa'    , type=float, default=None, help="Activation probability p_a")
@click.option('--d-bar' , 'd_bar' , type=float, default=None, help="Average degree")
@click.option('--d'     , 'd'     , type=int  , default=None, help="Block degree")
@click.option('--p-star', 'p_star', type=float, default=None, help="Collision free probability p_a*")
@click.option('--delta' , 'delta' , type=int  , default=None, help="Delay in slots")
@click.option('--beta'  , 'beta'  , type=int  , default=None, help="Slots per frame  [default: derived]")
@click.option(
    '-f',
    '--format',
    'fmt',
    type=click.Choice(["text", "json"]),
    default="text",
    show_default=True,
)
@_opt_verbose
def analyze(
    formula: str,
    K      : int,
    tau    : int,
    pa     : Optional[float],
    d_bar  : Optional[float],
    d      : Optional[int],
    p_star : Optional[float],
    delta  : Optional[int],
    beta   : Optional[int],
    fmt    : str = "text",
    verbose: int = 0,
) -> None:
    """Evaluate a closed form expression of random pilot access.

    \b
    degree_pmf        Pr(block degree = d)       --K --tau --pa --d
    aloha_pa          optimal p_a for ALOHA      --K --tau
    pa_from_dbar      p_a for average degree     --d-bar --K --tau
    avg_degree        average degree of p_a      --pa --K --tau
    p_star            active and collision free  --K --tau --pa
    delay_pmf         Pr(delay = delta)          --p-star --delta
    expected_delay    E[delay]                   --p-star
    aloha_throughput  ALOHA unique throughput    --K --tau --pa [--beta]
    """
    _configure_logging(verbose)
    all_args: Dict[str, Any] = {
        'K'     : K,
        'tau'   : tau,
        'pa'    : pa,
        'd_bar' : d_bar,
        'd'     : d,
        'p_star': p_star,
        'delta' : delta,
    }

    formula_fn, arg_names = FORMULAS[formula]
    args = {name: all_args[name] for name in arg_names}
    _require(formula, **args)
    if formula == 'aloha_throughput':
        args['beta'] = beta

    try:
        value = float(formula_fn(*args.values()))
    except ValueError as err:
        raise click.UsageError(str(err))

    if fmt == "json":
        echo(json.dumps({'formula': formula, 'args': args, 'value': value}))
    else:
        echo(repr(value))


def main(args: Optional[List[str]] = None) -> None:
    cli.main(args=args, prog_name="pilotsic")


if __name__ == '__main__':
    main()
