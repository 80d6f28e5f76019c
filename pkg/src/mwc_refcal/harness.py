"""Experiment configuration, the (N, q) threshold sweep and file outputs.

Defaults reproduce the reference experiment: 30 channels, fp = 10 GHz/195
(about 51.3 MHz), E = 10, B = 50 MHz, tau = 0.4 us, carriers at 25*i*fp,
N in {1, 2, 3}, q in {1, 3, ..., 19}, 5000 trials per cell at p0 = 0.99.
Every sweep cell reseeds deterministically from (master seed, N, q), so
cells can run in any order, in parallel, or be recomputed individually.
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import MwcConfig, RecordWindow
from .numerics import InvalidInput
from .refvolt import RefVoltEstimate, mc_refvolt
from .signal_model import BandComponent, MultibandSpec, validate_spec

SEED_ENV_VAR = "MWC_REFCAL_SEED"
DEFAULT_SEED = 12345

SWEEP_CSV_HEADER = "N,q,trials,y_th,y_th_over_sqrt_q,prediction,sigma,env_max,seed"

# --fast profile: fewer trials on a shorter record; documented to widen
# statistical tolerances by x1.5.
FAST_TRIALS = 500
FAST_DURATION = 2e-6
FAST_TOLERANCE_FACTOR = 1.5


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of a sweep run (signal, converter, trial budget)."""

    energy: float = 10.0
    width: float = 50e6
    delay: float = 0.4e-6
    carrier_step: int = 25
    n_values: tuple[int, ...] = (1, 2, 3)
    n_chips: int = 195
    f_nyq: float = 10e9
    oversample: int = 2
    n_channels: int = 30
    q_values: tuple[int, ...] = (1, 3, 5, 7, 9, 11, 13, 15, 17, 19)
    trials: int = 5000
    p0: float = 0.99
    seed: int = DEFAULT_SEED
    record_start: float = 0.0
    record_duration: float = 4e-6

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "q_values", tuple(int(q) for q in self.q_values))
        if not self.n_values or min(self.n_values) < 1:
            raise InvalidInput("n_values must be positive integers")
        if not self.q_values:
            raise InvalidInput("q_values must not be empty")
        if self.trials < 1:
            raise InvalidInput("trials must be >= 1")
        if not 0.0 <= self.p0 < 1.0:
            raise InvalidInput("p0 must lie in [0, 1)")

    @property
    def fp(self) -> float:
        return self.f_nyq / self.n_chips

    @property
    def record(self) -> RecordWindow:
        return RecordWindow(self.record_start, self.record_duration)

    def mwc_config(self, q: int) -> MwcConfig:
        return MwcConfig(
            fp=self.fp,
            q=q,
            n_chips=self.n_chips,
            f_nyq=self.f_nyq,
            oversample=self.oversample,
            n_channels=self.n_channels,
        )

    def build_spec(self, n_bands: int) -> MultibandSpec:
        """N band pairs with carriers carrier_step*i*fp, shared E, B, tau."""
        comps = tuple(
            BandComponent(
                energy=self.energy,
                width=self.width,
                delay=self.delay,
                carrier=self.carrier_step * i * self.fp,
            )
            for i in range(1, n_bands + 1)
        )
        return MultibandSpec(comps, self.f_nyq)

    def fast(self) -> "ExperimentConfig":
        return dataclasses.replace(
            self, trials=FAST_TRIALS, record_duration=FAST_DURATION
        )


_CONFIG_SCHEMA = {
    "signal": {
        "energy": float,
        "width_hz": float,
        "delay_s": float,
        "carrier_step": int,
        "n_values": "int_list",
    },
    "mwc": {
        "chips_per_period": int,
        "f_nyq_hz": float,
        "oversample": int,
        "channels": int,
    },
    "sweep": {
        "q_values": "int_list",
        "trials": int,
        "p0": float,
        "seed": int,
    },
    "record": {
        "start_s": float,
        "duration_s": float,
    },
}

_KEY_TO_FIELD = {
    ("signal", "energy"): "energy",
    ("signal", "width_hz"): "width",
    ("signal", "delay_s"): "delay",
    ("signal", "carrier_step"): "carrier_step",
    ("signal", "n_values"): "n_values",
    ("mwc", "chips_per_period"): "n_chips",
    ("mwc", "f_nyq_hz"): "f_nyq",
    ("mwc", "oversample"): "oversample",
    ("mwc", "channels"): "n_channels",
    ("sweep", "q_values"): "q_values",
    ("sweep", "trials"): "trials",
    ("sweep", "p0"): "p0",
    ("sweep", "seed"): "seed",
    ("record", "start_s"): "record_start",
    ("record", "duration_s"): "record_duration",
}


def _parse_int_list(raw: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in raw.replace(",", " ").split())


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    """Read a key = value config file; missing keys keep their defaults.

    The MWC_REFCAL_SEED environment variable, when set, overrides the
    master seed from the file.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(os.fspath(path))
    if not read:
        raise InvalidInput(f"config file not found: {path}")
    overrides = {}
    for section in parser.sections():
        if section not in _CONFIG_SCHEMA:
            raise InvalidInput(f"unknown config section [{section}]")
        for key, raw in parser[section].items():
            if key not in _CONFIG_SCHEMA[section]:
                raise InvalidInput(f"unknown config key {key!r} in [{section}]")
            kind = _CONFIG_SCHEMA[section][key]
            try:
                if kind == "int_list":
                    value = _parse_int_list(raw)
                elif kind is int:
                    value = int(raw)
                else:
                    value = float(raw)
            except ValueError as exc:
                raise InvalidInput(
                    f"bad value for {key!r} in [{section}]: {raw!r}"
                ) from exc
            overrides[_KEY_TO_FIELD[(section, key)]] = value
    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed is not None:
        try:
            overrides["seed"] = int(env_seed)
        except ValueError as exc:
            raise InvalidInput(f"bad {SEED_ENV_VAR} value: {env_seed!r}") from exc
    try:
        return ExperimentConfig(**overrides)
    except TypeError as exc:
        raise InvalidInput(str(exc)) from exc


def cell_seed(master_seed: int, n_bands: int, q: int) -> int:
    """Stable per-cell seed: first 8 bytes of SHA-256 over 'seed|N|q'."""
    digest = hashlib.sha256(
        f"mwc-refcal|{master_seed}|{n_bands}|{q}".encode()
    ).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class SweepRow:
    """One (N, q) cell of the sweep."""

    n_bands: int
    q: int
    trials: int
    y_th: float
    y_th_over_sqrt_q: float
    prediction: float
    sigma: float
    env_max: float
    seed: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    violations: tuple[str, ...]


def _row_from_estimate(est: RefVoltEstimate, n_bands: int) -> SweepRow:
    return SweepRow(
        n_bands=n_bands,
        q=est.q,
        trials=est.trials,
        y_th=est.y_th,
        y_th_over_sqrt_q=est.y_th / math.sqrt(est.q),
        prediction=est.prediction,
        sigma=est.sigma,
        env_max=est.env_max,
        seed=est.seed,
    )


def run_cell(config: ExperimentConfig, n_bands: int, q: int) -> SweepRow:
    """Compute one sweep cell from its deterministic per-cell seed."""
    est = mc_refvolt(
        spec=config.build_spec(n_bands),
        cfg=config.mwc_config(q),
        trials=config.trials,
        p0=config.p0,
        seed=cell_seed(config.seed, n_bands, q),
        record=config.record,
    )
    return _row_from_estimate(est, n_bands)


def _run_cell_star(args) -> SweepRow:
    return run_cell(*args)


def run_sweep(config: ExperimentConfig, workers: int = 1) -> SweepResult:
    """All (N, q) cells, ordered by (N, q); invalid cells become violations.

    Cells are independent, so any worker count produces identical rows.
    """
    cells = []
    violations = []
    for n_bands in config.n_values:
        spec = config.build_spec(n_bands)
        for q in sorted(config.q_values):
            problems = validate_spec(spec, config.fp, q)
            if problems:
                violations.append(f"N={n_bands}, q={q}: " + "; ".join(problems))
            else:
                cells.append((config, n_bands, q))
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_cell_star, cells))
    else:
        rows = [run_cell(*cell) for cell in cells]
    rows.sort(key=lambda r: (r.n_bands, r.q))
    return SweepResult(rows=tuple(rows), violations=tuple(violations))


def mean_ratio(rows, include_q1: bool = False) -> dict[int, float]:
    """Mean y_th/sqrt(q) per N, normalized by the N = 1 mean.

    q = 1 cells are excluded unless include_q1 is set (the Gaussian
    collapse only starts at q >= 3); every N needs at least two q cells
    and N = 1 must be present.
    """
    groups: dict[int, list[float]] = {}
    for row in rows:
        if row.q == 1 and not include_q1:
            continue
        groups.setdefault(row.n_bands, []).append(row.y_th_over_sqrt_q)
    if 1 not in groups:
        raise InvalidInput("mean_ratio needs N = 1 rows as the reference")
    if any(len(vals) < 2 for vals in groups.values()) and len(rows) > 1:
        raise InvalidInput("mean_ratio needs at least two q cells per N")
    base = float(np.mean(groups[1]))
    if base == 0.0:
        raise InvalidInput("degenerate sweep: N = 1 mean threshold is zero")
    return {n: float(np.mean(vals)) / base for n, vals in sorted(groups.items())}


def _flatness(rows, n_bands: int, q_min: int, q_max: int) -> dict:
    vals = [
        r.y_th_over_sqrt_q
        for r in rows
        if r.n_bands == n_bands and q_min <= r.q <= q_max
    ]
    if len(vals) < 2:
        return {"count": len(vals), "cov": None}
    mean = float(np.mean(vals))
    if mean == 0.0:
        return {"count": len(vals), "cov": None}
    return {
        "count": len(vals),
        "cov": float(np.std(vals, ddof=1)) / mean,
    }


def sweep_summary(config: ExperimentConfig, result: SweepResult) -> dict:
    """JSON-ready summary: config echo, ratios, flatness under both q readings."""
    rows = result.rows
    try:
        ratios = mean_ratio(rows)
    except InvalidInput:
        ratios = {}
    max_q = max(config.q_values)
    flatness = {
        str(n): {
            # collapse read as holding from q = 3 up (the working reading)
            "q_ge_3": _flatness(rows, n, 3, max_q),
            # the alternative low-q reading, reported for comparison
            "q_le_3": _flatness(rows, n, 1, 3),
        }
        for n in config.n_values
    }
    return {
        "config": dataclasses.asdict(config),
        "rows": len(rows),
        "ratios": {str(n): r for n, r in ratios.items()},
        "sqrt_law_ratios": {str(n): math.sqrt(n) for n in config.n_values},
        "flatness": flatness,
        "violations": list(result.violations),
    }


def format_float(value: float) -> str:
    """12 significant digits; deterministic across runs."""
    return format(value, ".12g")


def write_sweep_csv(rows, path: str | os.PathLike) -> None:
    """Write sweep rows with the fixed header; byte-stable for a given sweep."""
    lines = [SWEEP_CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                [
                    str(r.n_bands),
                    str(r.q),
                    str(r.trials),
                    format_float(r.y_th),
                    format_float(r.y_th_over_sqrt_q),
                    format_float(r.prediction),
                    format_float(r.sigma),
                    format_float(r.env_max),
                    str(r.seed),
                ]
            )
        )
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_sweep_json(
    config: ExperimentConfig, result: SweepResult, path: str | os.PathLike
) -> None:
    with open(path, "w") as fh:
        json.dump(sweep_summary(config, result), fh, indent=2, sort_keys=True)
        fh.write("\n")
