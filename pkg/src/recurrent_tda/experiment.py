"""RMSE-vs-SNR sweep harness: generate, corrupt, denoise, score, persist.

A JSON config picks signal parameters, SNR levels, seeds and filters; the
harness runs every (snr, seed, filter) cell, scores each channel against
the clean signal and writes ``results.csv`` plus one persistence-diagram
CSV per topological run.  Cells are independent, so they may run in
parallel (capped by ``RECURRENT_TDA_THREADS``); rows are always written in
canonical sorted order, making reruns byte-identical.
"""

from __future__ import annotations

import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from recurrent_tda.denoise import MODES, DenoiseParams, apply_filter
from recurrent_tda.persistence import NoRecurrentLoopError, diagram_to_text
from recurrent_tda.synth import NoiseSpec, SignalSpec, add_noise, generate_signal, rmse

logger = logging.getLogger("recurrent_tda.experiment")

THREADS_ENV_VAR = "RECURRENT_TDA_THREADS"

DEFAULT_SNR_DB_LIST = (0.0, 10.0, 20.0, 30.0)
DEFAULT_SEEDS = (0,)
DEFAULT_OUTPUT_DIR = "experiment_out"


class ConfigError(ValueError):
    """A config file failed validation; the message names the field."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated sweep description."""

    signal: SignalSpec
    snr_db_list: tuple
    seeds: tuple
    filters: tuple
    output_dir: str

    def __post_init__(self):
        if not self.snr_db_list:
            raise ConfigError("snr_db_list: must not be empty")
        if not self.seeds:
            raise ConfigError("seeds: must not be empty")
        if not self.filters:
            raise ConfigError("filters: must not be empty")
        labels = [f.effective_label for f in self.filters]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"filters: labels must be distinct, got {labels}")


@dataclass(frozen=True)
class ResultRow:
    snr_db: float
    seed: int
    filter_label: str
    channel: int
    rmse: float


@dataclass(frozen=True)
class ExperimentReport:
    """Rows written to results.csv plus failure tallies."""

    rows: tuple
    declared_failures: int
    internal_errors: int
    results_path: str


def default_filters() -> tuple:
    return tuple(DenoiseParams(mode=mode) for mode in MODES)


def _expect_number(value, path, allow_inf=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if isinstance(value, float) and math.isnan(value):
        raise ConfigError(f"{path}: must not be NaN")
    if not allow_inf and isinstance(value, float) and math.isinf(value):
        raise ConfigError(f"{path}: must be finite")
    return float(value)


def _expect_int(value, path, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{path}: must be >= {minimum}, got {value}")
    return int(value)


def _check_keys(mapping, allowed, path):
    for key in mapping:
        if key not in allowed:
            raise ConfigError(f"unknown key '{path}{key}'")


_SIGNAL_KEYS = (
    "f_start",
    "f_end",
    "t_max",
    "n",
    "squeeze_depth",
    "squeeze_width",
    "amplitudes",
)
_FILTER_KEYS = (
    "mode",
    "rho",
    "k",
    "window",
    "segment",
    "gradient_window",
    "axis_equalization",
    "label",
)


def _parse_signal(raw) -> SignalSpec:
    if not isinstance(raw, dict):
        raise ConfigError(f"signal: expected an object, got {raw!r}")
    _check_keys(raw, _SIGNAL_KEYS, "signal.")
    kwargs = {}
    for key in ("f_start", "f_end", "t_max", "squeeze_depth", "squeeze_width"):
        if key in raw:
            kwargs[key] = _expect_number(raw[key], f"signal.{key}")
    if "n" in raw:
        kwargs["n"] = _expect_int(raw["n"], "signal.n", minimum=2)
    if "amplitudes" in raw:
        amps = raw["amplitudes"]
        if not isinstance(amps, list) or len(amps) != 2:
            raise ConfigError("signal.amplitudes: expected a list of two numbers")
        kwargs["amplitudes"] = tuple(
            _expect_number(a, f"signal.amplitudes[{i}]") for i, a in enumerate(amps)
        )
    try:
        return SignalSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"signal: {exc}") from None


def _parse_filter(raw, index: int) -> DenoiseParams:
    path = f"filters[{index}]"
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected an object, got {raw!r}")
    _check_keys(raw, _FILTER_KEYS, f"{path}.")
    if "mode" not in raw:
        raise ConfigError(f"{path}.mode: required")
    mode = raw["mode"]
    if mode not in MODES:
        raise ConfigError(f"{path}.mode: must be one of {list(MODES)}, got {mode!r}")
    kwargs = {"mode": mode}
    if "rho" in raw:
        rho = _expect_number(raw["rho"], f"{path}.rho")
        if rho < 1.0:
            raise ConfigError(f"{path}.rho: must be >= 1, got {rho}")
        kwargs["rho"] = rho
    if "axis_equalization" in raw:
        eq = _expect_number(raw["axis_equalization"], f"{path}.axis_equalization")
        if not 0.0 <= eq <= 1.0:
            raise ConfigError(f"{path}.axis_equalization: must lie in [0, 1], got {eq}")
        kwargs["axis_equalization"] = eq
    for key, minimum in (("k", 1), ("window", 1), ("segment", 4), ("gradient_window", 1)):
        if key in raw:
            kwargs[key] = _expect_int(raw[key], f"{path}.{key}", minimum=minimum)
    if "label" in raw:
        if not isinstance(raw["label"], str) or not raw["label"]:
            raise ConfigError(f"{path}.label: expected a non-empty string")
        kwargs["label"] = raw["label"]
    return DenoiseParams(**kwargs)


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Build a validated config from parsed JSON, applying defaults."""
    if not isinstance(raw, dict):
        raise ConfigError(f"config root: expected an object, got {raw!r}")
    _check_keys(raw, ("signal", "snr_db_list", "seeds", "filters", "output_dir"), "")
    signal = _parse_signal(raw.get("signal", {}))
    snr_raw = raw.get("snr_db_list", list(DEFAULT_SNR_DB_LIST))
    if not isinstance(snr_raw, list):
        raise ConfigError("snr_db_list: expected a list of numbers")
    snr_db_list = tuple(
        _expect_number(v, f"snr_db_list[{i}]", allow_inf=True) for i, v in enumerate(snr_raw)
    )
    for i, snr in enumerate(snr_db_list):
        if snr == -math.inf:
            raise ConfigError(f"snr_db_list[{i}]: must be finite or +inf")
    seeds_raw = raw.get("seeds", list(DEFAULT_SEEDS))
    if not isinstance(seeds_raw, list):
        raise ConfigError("seeds: expected a list of integers")
    seeds = tuple(_expect_int(v, f"seeds[{i}]", minimum=0) for i, v in enumerate(seeds_raw))
    filters_raw = raw.get("filters")
    if filters_raw is None:
        filters = default_filters()
    else:
        if not isinstance(filters_raw, list):
            raise ConfigError("filters: expected a list of objects")
        filters = tuple(_parse_filter(f, i) for i, f in enumerate(filters_raw))
    output_dir = raw.get("output_dir", DEFAULT_OUTPUT_DIR)
    if not isinstance(output_dir, str) or not output_dir:
        raise ConfigError("output_dir: expected a non-empty string")
    return ExperimentConfig(
        signal=signal,
        snr_db_list=snr_db_list,
        seeds=seeds,
        filters=filters,
        output_dir=output_dir,
    )


def parse_config(path) -> ExperimentConfig:
    """Load and validate a JSON config file."""
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from None
    return config_from_dict(raw)


def _format_number(value: float) -> str:
    if math.isinf(value):
        return "inf"
    return repr(float(value))


def _snr_token(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:g}"


def _run_cell(signal: SignalSpec, snr_db: float, seed: int, params: DenoiseParams):
    """One (snr, seed, filter) cell; returns (status, payload, diagram_text)."""
    clean = generate_signal(signal)
    noisy = add_noise(clean, NoiseSpec(snr_db=snr_db, seed=seed))
    try:
        denoised, topo = apply_filter(noisy, params)
    except NoRecurrentLoopError as exc:
        return "declared", str(exc), None
    except Exception as exc:  # internal error: scored as nan, non-zero exit
        return "internal", repr(exc), None
    scores = tuple(rmse(denoised, clean, c) for c in range(clean.n_channels))
    diagram_text = diagram_to_text(topo.diagram) if topo is not None else None
    return "ok", scores, diagram_text


def _max_workers(n_cells: int) -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "0")
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}") from None
    if cap < 0:
        raise ValueError(f"{THREADS_ENV_VAR} must be >= 0, got {cap}")
    if cap == 0:
        cap = os.cpu_count() or 1
    return max(1, min(cap, n_cells))


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Run the sweep and write ``results.csv`` plus per-run diagram CSVs.

    Declared filter failures (no recurrent loop) become ``nan`` rows and a
    warning; unexpected exceptions become ``nan`` rows and count as
    internal errors.
    """
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cells = [
        (snr, seed, params)
        for snr in cfg.snr_db_list
        for seed in cfg.seeds
        for params in cfg.filters
    ]
    workers = _max_workers(len(cells))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(
                pool.map(
                    _run_cell,
                    *zip(*[(cfg.signal, snr, seed, params) for snr, seed, params in cells]),
                    chunksize=1,
                )
            )
    else:
        outcomes = [_run_cell(cfg.signal, snr, seed, params) for snr, seed, params in cells]

    n_channels = 2  # generator emits two channels
    rows = []
    declared = 0
    internal = 0
    for (snr, seed, params), (status, payload, diagram_text) in zip(cells, outcomes):
        label = params.effective_label
        if status == "ok":
            scores = payload
        else:
            scores = (math.nan,) * n_channels
            if status == "declared":
                declared += 1
                logger.warning(
                    "filter %s failed at snr=%s seed=%d: %s", label, snr, seed, payload
                )
            else:
                internal += 1
                logger.error(
                    "filter %s crashed at snr=%s seed=%d: %s", label, snr, seed, payload
                )
        for channel, score in enumerate(scores):
            rows.append(ResultRow(snr, seed, label, channel, float(score)))
        if diagram_text is not None:
            name = f"diagram_snr{_snr_token(snr)}_seed{seed}_{label}.csv"
            (out_dir / name).write_text(diagram_text)

    rows.sort(key=lambda r: (r.snr_db, r.seed, r.filter_label, r.channel))
    results_path = out_dir / "results.csv"
    lines = ["snr_db,seed,filter,channel,rmse"]
    for r in rows:
        lines.append(
            f"{_format_number(r.snr_db)},{r.seed},{r.filter_label},{r.channel},"
            f"{'nan' if math.isnan(r.rmse) else repr(r.rmse)}"
        )
    results_path.write_text("\n".join(lines) + "\n")
    return ExperimentReport(
        rows=tuple(rows),
        declared_failures=declared,
        internal_errors=internal,
        results_path=str(results_path),
    )
