# This file is part of the pilotsic project
# https://github.com/pilotsic/pilotsic
#
# Copyright (c) 2023-2026 pilotsic contributors - MIT License
# SPDX-License-Identifier: MIT

"""Monte Carlo trials, aggregation and parameter sweeps.

A trial simulates one frame and runs both decoders on the same filtered
signals. Trial seeds are derived from the master seed and the trial
index, results are reduced in index order, so an experiment does not
depend on the number of workers.
"""

import csv
import enum
import json
import math
import logging
import pathlib as pl
import concurrent.futures as cf
from typing import Any
from typing import Dict
from typing import List
from typing import Tuple
from typing import Union
from typing import Optional
from typing import Sequence
from typing import NamedTuple

import numpy as np

from . import phy
from . import model
from . import channel
from . import decoder
from . import analysis
from . import parameters
from . import sim_random
from . import common_types as ct

logger = logging.getLogger(__name__)

CI95_Z = 1.96

METRIC_NAMES = ("throughput", "goodput", "bler")

SWEEP_AXES = ("avg_degree", "K", "M")

RESULT_COLUMNS = (
    "axis_name",
    "axis_value",
    "scheme",
    "K",
    "M",
    "tau",
    "beta",
    "p_a",
    "trials",
    "throughput_mean",
    "throughput_ci95",
    "goodput_mean",
    "goodput_ci95",
    "bler_mean",
    "bler_ci95",
)

NO_AXIS = "none"


class Scheme(enum.Enum):

    SIC   = "sic"
    ALOHA = "aloha"


class ResultFormat(enum.Enum):

    CSV  = "csv"
    JSON = "json"


class ResultWriteError(OSError):
    def __init__(self, path: pl.Path, reason: str) -> None:
        self.path = path
        super().__init__(f"Error writing {path}: {reason}")


class TrialResult(NamedTuple):

    fingerprint: str
    seed       : ct.Seed
    scheme     : Scheme
    throughput : float
    goodput    : float
    bler       : float
    decoded    : int
    correct    : int


class MetricSummary(NamedTuple):

    mean: float
    ci95: float


class SchemeAggregate(NamedTuple):

    scheme    : Scheme
    throughput: MetricSummary
    goodput   : MetricSummary
    bler      : MetricSummary


class AggregateResult(NamedTuple):

    config : parameters.SystemConfig
    trials : int
    schemes: Tuple[SchemeAggregate, ...]

    def scheme(self, scheme: Scheme) -> SchemeAggregate:
        for agg in self.schemes:
            if agg.scheme == scheme:
                return agg
        raise KeyError(scheme)


class SweepRow(NamedTuple):

    axis_name : str
    axis_value: Optional[float]
    result    : AggregateResult


ResultTable = List[SweepRow]


def config_fingerprint(config: parameters.SystemConfig) -> str:
    """Short stable digest of the scenario (the master seed excluded)."""
    data = parameters.config_to_dict(config)
    del data['seed']
    canonical = json.dumps(data, sort_keys=True).encode("utf-8")
    return sim_random.sha256digest(canonical).hex()[:16]


class SimulatedFrame(NamedTuple):

    schedule: model.ActivitySchedule
    messages: List[model.UserMessage]
    pilots  : ct.ComplexMatrix
    filtered: phy.FilteredFrame


def simulate_frame(config: parameters.SystemConfig, seed: ct.Seed) -> SimulatedFrame:
    """activity -> messages -> channels -> signals -> filtered observations"""
    streams  = sim_random.init_trial_streams(seed)
    schedule = model.draw_activity(config, streams.activity)
    messages = model.draw_messages(config, streams.messages)
    channels = channel.generate_frame_channels(config, streams.channels)
    pilots   = model.make_pilot_matrix(config.tau)
    filtered = phy.filter_frame(channels, schedule, pilots, messages, config.sigma_n2, streams.noise)
    return SimulatedFrame(schedule, messages, pilots, filtered)


def _trial_result(
    fingerprint: str, seed: ct.Seed, scheme: Scheme, report: decoder.DecodingReport
) -> TrialResult:
    return TrialResult(
        fingerprint=fingerprint,
        seed=seed,
        scheme=scheme,
        throughput=report.throughput,
        goodput=report.goodput,
        bler=report.bler,
        decoded=report.decoded,
        correct=report.correct,
    )


def aloha_optimum_config(config: parameters.SystemConfig) -> parameters.SystemConfig:
    return config._replace(p_a=analysis.aloha_optimal_pa(config.K, config.tau))


def run_trial(
    config          : parameters.SystemConfig,
    seed            : ct.Seed,
    aloha_at_optimum: bool = False,
) -> Tuple[TrialResult, TrialResult]:
    """Paired SIC and ALOHA results for one frame.

    With aloha_at_optimum, ALOHA is evaluated on a separate frame drawn
    with p_a = tau / K instead of the SIC frame.
    """
    fingerprint = config_fingerprint(config)
    frame       = simulate_frame(config, seed)
    sic_report  = decoder.sic_decode(frame.filtered, frame.schedule, frame.pilots, config, frame.messages)

    if aloha_at_optimum:
        aloha_config = aloha_optimum_config(config)
        aloha_frame  = simulate_frame(aloha_config, sim_random.derive_seed(seed, 1))
        aloha_report = decoder.aloha_decode(
            aloha_frame.filtered, aloha_frame.schedule, aloha_frame.pilots, aloha_config, aloha_frame.messages
        )
    else:
        aloha_report = decoder.aloha_decode(
            frame.filtered, frame.schedule, frame.pilots, config, frame.messages
        )
        # SIC starts from the same singletons and only adds
        assert sic_report.decoded_users >= aloha_report.decoded_users

    logger.debug(f"trial seed={seed}: sic decoded={sic_report.decoded} aloha decoded={aloha_report.decoded}")
    return (
        _trial_result(fingerprint, seed, Scheme.SIC  , sic_report),
        _trial_result(fingerprint, seed, Scheme.ALOHA, aloha_report),
    )


def summarize(values: Sequence[float]) -> MetricSummary:
    """Mean and normal approximation 95% confidence half width.

    >>> summarize([0.5])
    MetricSummary(mean=0.5, ci95=0.0)
    """
    if len(values) == 0:
        raise ValueError("Cannot summarize an empty sequence")
    arr  = np.asarray(values, dtype=np.float64)
    mean = float(arr.mean())
    if len(arr) < 2:
        return MetricSummary(mean, 0.0)
    ci95 = CI95_Z * float(arr.std(ddof=1)) / math.sqrt(len(arr))
    return MetricSummary(mean, ci95)


def aggregate(
    config: parameters.SystemConfig,
    trials: Sequence[Tuple[TrialResult, TrialResult]],
) -> AggregateResult:
    schemes = []
    for idx, scheme in enumerate(Scheme):
        results = [pair[idx] for pair in trials]
        assert all(res.scheme == scheme for res in results)
        summaries = [summarize([getattr(res, name) for res in results]) for name in METRIC_NAMES]
        schemes.append(SchemeAggregate(scheme, *summaries))
    return AggregateResult(config, len(trials), tuple(schemes))


def _run_trial_args(args: Tuple[parameters.SystemConfig, ct.Seed, bool]) -> Tuple[TrialResult, TrialResult]:
    return run_trial(*args)


def run_experiment(
    config          : parameters.SystemConfig,
    n_trials        : int,
    workers         : int  = parameters.DEFAULT_WORKERS,
    aloha_at_optimum: bool = False,
) -> AggregateResult:
    if n_trials < 1:
        raise ValueError(f"Invalid n_trials={n_trials}, must be >= 1")
    if workers < 1:
        raise ValueError(f"Invalid workers={workers}, must be >= 1")

    seeds    = [sim_random.derive_seed(config.seed, idx) for idx in range(n_trials)]
    job_args = [(config, seed, aloha_at_optimum) for seed in seeds]

    logger.info(
        f"experiment K={config.K} M={config.M} beta={config.beta} p_a={config.p_a:.4g}: "
        f"{n_trials} trials, {workers} worker(s)"
    )
    if workers == 1:
        trials = [_run_trial_args(args) for args in job_args]
    else:
        chunksize = max(1, n_trials // (workers * 4))
        with cf.ProcessPoolExecutor(max_workers=workers) as executor:
            # map yields in submission order, independent of completion order
            trials = list(executor.map(_run_trial_args, job_args, chunksize=chunksize))

    result = aggregate(config, trials)
    sic    = result.scheme(Scheme.SIC)
    logger.info(f"experiment done: sic goodput={sic.goodput.mean:.4f} bler={sic.bler.mean:.4f}")
    return result


def sweep_config(base: parameters.SystemConfig, axis: str, value: float) -> parameters.SystemConfig:
    """The config of a single sweep point."""
    if axis == "avg_degree":
        p_a = analysis.pa_from_avg_degree(value, base.K, base.tau)
        return parameters.validate_config(base._replace(p_a=p_a))
    elif axis == "K":
        K = int(value)
        if K != value or K < 1:
            raise ValueError(f"Invalid value for axis K: {value}")
        beta = parameters.default_beta(K, base.tau)
        p_a  = analysis.pa_from_avg_degree(parameters.DEFAULT_AVG_DEGREE, K, base.tau)
        return parameters.validate_config(base._replace(K=K, beta=beta, p_a=p_a))
    elif axis == "M":
        M = int(value)
        if M != value or M < 1:
            raise ValueError(f"Invalid value for axis M: {value}")
        return parameters.validate_config(base._replace(M=M))
    else:
        errmsg = f"Invalid sweep axis {axis!r}, must be one of {', '.join(SWEEP_AXES)}"
        raise ValueError(errmsg)


def sweep(
    base            : parameters.SystemConfig,
    axis            : str,
    values          : Sequence[float],
    n_trials        : int,
    workers         : int  = parameters.DEFAULT_WORKERS,
    aloha_at_optimum: bool = False,
) -> ResultTable:
    if axis not in SWEEP_AXES:
        errmsg = f"Invalid sweep axis {axis!r}, must be one of {', '.join(SWEEP_AXES)}"
        raise ValueError(errmsg)

    # validate every point before the first (possibly long) experiment
    configs = [sweep_config(base, axis, value) for value in values]

    table: ResultTable = []
    for value, config in zip(values, configs):
        logger.info(f"sweep {axis}={value}")
        result = run_experiment(config, n_trials, workers, aloha_at_optimum)
        table.append(SweepRow(axis, value, result))
    return table


def sweep_family(
    base            : parameters.SystemConfig,
    axis            : str,
    values          : Sequence[float],
    family          : Sequence[int],
    n_trials        : int,
    workers         : int  = parameters.DEFAULT_WORKERS,
    aloha_at_optimum: bool = False,
) -> ResultTable:
    """One sweep per number of users, concatenated in family order.

    Each member gets beta and p_a as for a point of the K axis; the
    rows of one member are told apart by their K column.
    """
    if axis == "K":
        raise ValueError("Invalid sweep axis K for a family over K")

    members = [sweep_config(base, "K", K) for K in family]
    for member in members:
        for value in values:
            sweep_config(member, axis, value)

    table: ResultTable = []
    for member in members:
        logger.info(f"sweep family K={member.K}")
        table.extend(sweep(member, axis, values, n_trials, workers, aloha_at_optimum))
    return table


def result_records(table: ResultTable) -> List[Dict[str, Any]]:
    records = []
    for row in table:
        config = row.result.config
        for agg in row.result.schemes:
            records.append(
                {
                    'axis_name'      : row.axis_name,
                    'axis_value'     : row.axis_value,
                    'scheme'         : agg.scheme.value,
                    'K'              : config.K,
                    'M'              : config.M,
                    'tau'            : config.tau,
                    'beta'           : config.beta,
                    'p_a'            : config.p_a,
                    'trials'         : row.result.trials,
                    'throughput_mean': agg.throughput.mean,
                    'throughput_ci95': agg.throughput.ci95,
                    'goodput_mean'   : agg.goodput.mean,
                    'goodput_ci95'   : agg.goodput.ci95,
                    'bler_mean'      : agg.bler.mean,
                    'bler_ci95'      : agg.bler.ci95,
                }
            )
    return records


def _format_cell(value: Any) -> str:
    if value is None:
        return ""
    elif isinstance(value, float):
        return repr(value)
    else:
        return str(value)


def manifest_path(path: pl.Path) -> pl.Path:
    return path.with_name(path.name + ".manifest.json")


def _manifest(table: ResultTable, version: str) -> Dict[str, Any]:
    if table:
        base_config: Optional[Dict[str, Any]] = parameters.config_to_dict(table[0].result.config)
        master_seed: Optional[int] = table[0].result.config.seed
        trials     : Optional[int] = table[0].result.trials
    else:
        base_config = None
        master_seed = None
        trials      = None

    return {
        'version'    : version,
        'master_seed': master_seed,
        'trials'     : trials,
        'axis_name'  : table[0].axis_name if table else NO_AXIS,
        'axis_values': [row.axis_value for row in table],
        'config'     : base_config,
        'columns'    : list(RESULT_COLUMNS),
    }


def write_results(
    table  : ResultTable,
    path   : Union[str, pl.Path],
    fmt    : ResultFormat = ResultFormat.CSV,
    version: str = "",
) -> pl.Path:
    """Write the result table and a run manifest next to it."""
    path    = pl.Path(path)
    records = result_records(table)
    try:
        if fmt == ResultFormat.CSV:
            with path.open(mode="w", encoding="utf-8", newline="") as fobj:
                writer = csv.writer(fobj, lineterminator="\n")
                writer.writerow(RESULT_COLUMNS)
                for record in records:
                    writer.writerow([_format_cell(record[col]) for col in RESULT_COLUMNS])
        else:
            with path.open(mode="w", encoding="utf-8") as fobj:
                json.dump(records, fobj, indent=2)
                fobj.write("\n")

        with manifest_path(path).open(mode="w", encoding="utf-8") as fobj:
            json.dump(_manifest(table, version), fobj, indent=2, sort_keys=True)
            fobj.write("\n")
    except OSError as err:
        raise ResultWriteError(path, err.strerror or str(err)) from err

    logger.info(f"wrote {len(records)} rows to {path}")
    return path


def read_results_json(path: Union[str, pl.Path]) -> List[Dict[str, Any]]:
    path = pl.Path(path)
    with path.open(mode="r", encoding="utf-8") as fobj:
        records = json.load(fobj)

    for record in records:
        missing = set(RESULT_COLUMNS) - set(record)
        if missing:
            raise ValueError(f"Invalid result file {path}, missing columns: {', '.join(sorted(missing))}")
    return records
