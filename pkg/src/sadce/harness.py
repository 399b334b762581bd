"""Monte Carlo experiment harness: scene sampling, per-trial runs, sweeps, CSV.

Determinism contract: every random draw comes from a counter-derived stream,
so results are byte-identical across runs and across worker counts.  Source
draws (position and gain) are keyed by ``(seed, trial)`` and noise draws by
``(seed, sweep point, trial)``: the same user population is evaluated at every
SNR / pilot-length point, with fresh noise per point.  Per-trial records are
materialized and then reduced, so aggregation never depends on completion
order.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baselines import GridSpec, SEARCH_SIZE_LIMIT, music3d_search
from .distance import estimate_gain
from .errors import ConfigError, EstimationError
from .geometry import ArrayGeometry, SourceTruth, fresnel_floor, steering_fresnel, synthesize_channel
from .pipeline import estimate_channel
from .signals import (
    PILOT_KINDS,
    generate_pilots,
    ls_channel_estimate,
    noise_power_from_snr_db,
    transmit,
)
from .util import nmse

METHODS = ("sadce", "ls", "music3d")
GAIN_MODELS = ("cn", "unit_modulus")
SYNTHESIS_MODELS = ("fresnel", "exact")

CSV_COLUMNS = (
    "method",
    "snr_db",
    "pilot_len",
    "trials",
    "failures",
    "rmse_u",
    "rmse_v",
    "rmse_r_m",
    "nmse_db",
    "mean_runtime_ms",
)

# Sub-stream domains for counter-derived RNG streams.
_SOURCE_DOMAIN = 0
_NOISE_DOMAIN = 1

_MAX_SAMPLE_RETRIES = 100


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one Monte Carlo experiment.

    The user box is an axis-aligned cuboid given by two corners in the same
    world frame as ``bs_position``; zero-extent axes are allowed.  The sweep
    runs over ``snr_grid_db`` unless ``pilot_length_grid`` is set, in which
    case it runs over pilot lengths at the single configured SNR.
    """

    geometry: ArrayGeometry
    bs_position: tuple[float, float, float]
    user_box_corner_a: tuple[float, float, float]
    user_box_corner_b: tuple[float, float, float]
    snr_grid_db: tuple[float, ...]
    pilot_length: int = 1
    pilot_length_grid: tuple[int, ...] | None = None
    pilot_kind: str = "all_ones"
    pilot_power: float = 1.0
    trials: int = 1
    rng_seed: int = 0
    synthesis_model: str = "fresnel"
    methods: tuple[str, ...] = ("sadce",)
    rotation_grid_gy: int = 64
    rotation_grid_gz: int = 64
    fresnel_floor_factor: float = 10.0
    gain_model: str = "cn"
    music_grid: GridSpec = field(default_factory=GridSpec)

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if len(self.snr_grid_db) == 0:
            raise ConfigError("snr_grid_db must not be empty")
        if self.pilot_length < 1:
            raise ConfigError("pilot_length must be at least 1")
        if self.pilot_length_grid is not None:
            if len(self.pilot_length_grid) == 0 or any(l < 1 for l in self.pilot_length_grid):
                raise ConfigError("pilot_length_grid entries must be at least 1")
            if len(self.snr_grid_db) != 1:
                raise ConfigError("a pilot-length sweep needs exactly one SNR point")
        if self.pilot_kind not in PILOT_KINDS:
            raise ConfigError(f"pilot_kind must be one of {PILOT_KINDS}")
        if self.pilot_power <= 0.0:
            raise ConfigError("pilot_power must be positive")
        if self.synthesis_model not in SYNTHESIS_MODELS:
            raise ConfigError(f"synthesis_model must be one of {SYNTHESIS_MODELS}")
        if self.gain_model not in GAIN_MODELS:
            raise ConfigError(f"gain_model must be one of {GAIN_MODELS}")
        unknown = set(self.methods) - set(METHODS)
        if not self.methods or unknown:
            raise ConfigError(f"methods must be a non-empty subset of {METHODS}, got {self.methods}")
        if "music3d" in self.methods and self.geometry.element_count > SEARCH_SIZE_LIMIT:
            raise ConfigError(
                f"music3d is desk-scale only (M <= {SEARCH_SIZE_LIMIT}), "
                f"got M = {self.geometry.element_count}"
            )
        if self.rotation_grid_gy < 2 or self.rotation_grid_gz < 2:
            raise ConfigError("rotation grids need at least 2 points per axis")
        floor = max(
            fresnel_floor(self.geometry, self.fresnel_floor_factor),
            _wrap_floor(self.geometry),
        )
        if _box_min_distance(self.bs_position, self.user_box_corner_a, self.user_box_corner_b) < floor:
            raise ConfigError(
                f"user box comes within {floor:.3g} m of the array; the wavefront "
                "model and the unwrapped range fit are not valid there"
            )

    @property
    def sweep_points(self) -> tuple[tuple[float, int], ...]:
        """(snr_db, pilot_len) pairs in sweep order."""
        if self.pilot_length_grid is not None:
            snr = self.snr_grid_db[0]
            return tuple((snr, int(l)) for l in self.pilot_length_grid)
        return tuple((float(s), self.pilot_length) for s in self.snr_grid_db)


def _wrap_floor(geom: ArrayGeometry) -> float:
    """Smallest range keeping every curvature phase |f_m|/r below pi."""
    d = geom.spacing
    return d * d * (geom.half_y**2 + geom.half_z**2) / geom.wavelength


def _box_min_distance(point, corner_a, corner_b) -> float:
    p = np.asarray(point, dtype=float)
    lo = np.minimum(corner_a, corner_b)
    hi = np.maximum(corner_a, corner_b)
    return float(np.linalg.norm(p - np.clip(p, lo, hi)))


def scene_basis(config: ExperimentConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Array-frame axes in world coordinates: boresight x, transverse y (for v), z (for u).

    The boresight points from the array position to the user-box centroid;
    the transverse axes complete a right-handed frame with the world vertical
    as the up reference (or the world y axis if the boresight is vertical).
    """
    bs = np.asarray(config.bs_position, dtype=float)
    centroid = 0.5 * (
        np.asarray(config.user_box_corner_a, dtype=float)
        + np.asarray(config.user_box_corner_b, dtype=float)
    )
    bore = centroid - bs
    norm = np.linalg.norm(bore)
    if norm == 0.0:
        raise ConfigError("user box centroid coincides with the array position")
    x_axis = bore / norm
    up = np.array([0.0, 0.0, 1.0])
    if abs(float(x_axis @ up)) > 1.0 - 1e-9:
        up = np.array([0.0, 1.0, 0.0])
    y_axis = np.cross(up, x_axis)
    y_axis = y_axis / np.linalg.norm(y_axis)
    z_axis = np.cross(x_axis, y_axis)
    return x_axis, y_axis, z_axis


def position_to_source(config: ExperimentConfig, position, gain: complex) -> SourceTruth:
    """Convert a world position to (u, v, r) in the array frame."""
    x_axis, y_axis, z_axis = scene_basis(config)
    delta = np.asarray(position, dtype=float) - np.asarray(config.bs_position, dtype=float)
    r = float(np.linalg.norm(delta))
    if r == 0.0:
        raise ConfigError("source position coincides with the array position")
    direction = delta / r
    return SourceTruth(
        u=float(direction @ z_axis), v=float(direction @ y_axis), r=r, gain=gain
    )


def sample_source(config: ExperimentConfig, rng: np.random.Generator) -> SourceTruth:
    """Draw a user uniformly in the box and its complex gain, resampling below the floor."""
    lo = np.minimum(config.user_box_corner_a, config.user_box_corner_b).astype(float)
    hi = np.maximum(config.user_box_corner_a, config.user_box_corner_b).astype(float)
    floor = max(
        fresnel_floor(config.geometry, config.fresnel_floor_factor),
        _wrap_floor(config.geometry),
    )
    bs = np.asarray(config.bs_position, dtype=float)
    for _ in range(_MAX_SAMPLE_RETRIES):
        position = rng.uniform(lo, hi)
        if np.linalg.norm(position - bs) >= floor:
            break
    else:
        raise ConfigError("could not sample a user position above the validity floor")
    if config.gain_model == "cn":
        gain = (rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2.0)
    else:
        gain = np.exp(2j * np.pi * rng.uniform())
    return position_to_source(config, position, complex(gain))


@dataclass(frozen=True)
class MethodResult:
    """One method's estimates on one trial; NaN marks quantities a method does not produce."""

    u_hat: float
    v_hat: float
    r_hat: float
    nmse: float
    runtime_ms: float
    failed: bool = False
    detail: str = ""
    diagnostics: dict | None = None


@dataclass(frozen=True)
class TrialRecord:
    """Ground truth and per-method outcomes for one Monte Carlo trial."""

    snr_db: float
    pilot_len: int
    trial_index: int
    truth_u: float
    truth_v: float
    truth_r: float
    truth_gain: complex
    results: dict[str, MethodResult]


def source_stream(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(_SOURCE_DOMAIN, trial)))


def noise_stream(seed: int, point: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(_NOISE_DOMAIN, point, trial))
    )


def _run_method(method: str, config: ExperimentConfig, block, src: SourceTruth, h_true) -> MethodResult:
    geom = config.geometry
    diagnostics = None
    start = time.perf_counter()
    try:
        if method == "sadce":
            est = estimate_channel(
                block, geom, g_y=config.rotation_grid_gy, g_z=config.rotation_grid_gz
            )
            u_hat, v_hat, r_hat, h_hat = est.u_hat, est.v_hat, est.r_hat, est.h_hat
            diagnostics = {
                "peak_iy": est.peak_iy,
                "peak_iz": est.peak_iz,
                "delta_u": est.delta_u,
                "delta_v": est.delta_v,
                "sigma_r": est.sigma_r,
            }
        elif method == "ls":
            u_hat = v_hat = r_hat = float("nan")
            h_hat = ls_channel_estimate(block)
        elif method == "music3d":
            u_hat, v_hat, r_hat = music3d_search(
                ls_channel_estimate(block), config.music_grid, geom
            )
            beta = estimate_gain(block, u_hat, v_hat, r_hat, geom)
            h_hat = beta * steering_fresnel(geom, u_hat, v_hat, r_hat)
        else:
            raise ValueError(f"unknown method {method!r}")
    except EstimationError as exc:
        runtime_ms = (time.perf_counter() - start) * 1e3
        return MethodResult(
            u_hat=float("nan"),
            v_hat=float("nan"),
            r_hat=float("nan"),
            nmse=float("nan"),
            runtime_ms=runtime_ms,
            failed=True,
            detail=f"{type(exc).__name__}: {exc}",
        )
    runtime_ms = (time.perf_counter() - start) * 1e3
    return MethodResult(
        u_hat=float(u_hat),
        v_hat=float(v_hat),
        r_hat=float(r_hat),
        nmse=nmse(h_hat, h_true),
        runtime_ms=runtime_ms,
        diagnostics=diagnostics,
    )


def run_trial(
    config: ExperimentConfig,
    snr_db: float,
    pilot_len: int,
    source_rng: np.random.Generator,
    noise_rng: np.random.Generator,
    trial_index: int = 0,
) -> TrialRecord:
    """One synthesize -> transmit -> estimate round for every configured method.

    Method failures are recorded on the trial, never raised.
    """
    src = sample_source(config, source_rng)
    h_true = synthesize_channel(config.geometry, src, config.synthesis_model)
    pilots = generate_pilots(pilot_len, config.pilot_power, config.pilot_kind, rng=noise_rng)
    sigma_sq = noise_power_from_snr_db(snr_db, config.pilot_power)
    block = transmit(h_true, pilots, sigma_sq, rng=noise_rng)
    results = {
        method: _run_method(method, config, block, src, h_true) for method in config.methods
    }
    return TrialRecord(
        snr_db=float(snr_db),
        pilot_len=int(pilot_len),
        trial_index=int(trial_index),
        truth_u=src.u,
        truth_v=src.v,
        truth_r=src.r,
        truth_gain=src.gain,
        results=results,
    )


def _run_jobs(config: ExperimentConfig, jobs: list[tuple[int, int]]) -> list[tuple[int, int, TrialRecord]]:
    points = config.sweep_points
    out = []
    for point_idx, trial_idx in jobs:
        snr_db, pilot_len = points[point_idx]
        record = run_trial(
            config,
            snr_db,
            pilot_len,
            source_stream(config.rng_seed, trial_idx),
            noise_stream(config.rng_seed, point_idx, trial_idx),
            trial_index=trial_idx,
        )
        out.append((point_idx, trial_idx, record))
    return out


@dataclass(frozen=True)
class SweepResult:
    """Aggregated sweep rows plus the per-trial records they were reduced from."""

    points: tuple[tuple[float, int], ...]
    methods: tuple[str, ...]
    records: list[list[TrialRecord]]  # records[point_idx][trial_idx]
    rows: list[dict]

    def point_records(self, point_idx: int) -> list[TrialRecord]:
        return self.records[point_idx]


def sweep(config: ExperimentConfig, threads: int = 1) -> SweepResult:
    """Run trials for every sweep point, in parallel when threads > 1.

    Results are keyed by (point, trial) indices, so the output is independent
    of scheduling; a given (config, seed) reproduces byte-identical CSV.
    """
    if threads < 1:
        raise ValueError("threads must be at least 1")
    points = config.sweep_points
    jobs = [(p, t) for p in range(len(points)) for t in range(config.trials)]
    if threads == 1:
        gathered = _run_jobs(config, jobs)
    else:
        chunks = [jobs[i::threads] for i in range(threads)]
        gathered = []
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(_run_jobs, [config] * len(chunks), chunks):
                gathered.extend(part)
    by_index: dict[tuple[int, int], TrialRecord] = {(p, t): rec for p, t, rec in gathered}
    records = [
        [by_index[(p, t)] for t in range(config.trials)] for p in range(len(points))
    ]
    rows = _aggregate(config, points, records)
    return SweepResult(points=points, methods=config.methods, records=records, rows=rows)


def _aggregate(config, points, records) -> list[dict]:
    rows = []
    for point_idx, (snr_db, pilot_len) in enumerate(points):
        point_records = records[point_idx]
        for method in config.methods:
            outcomes = [rec.results[method] for rec in point_records]
            ok = [
                (rec, res)
                for rec, res in zip(point_records, outcomes)
                if not res.failed
            ]
            failures = len(outcomes) - len(ok)
            if ok:
                u_err = np.array([res.u_hat - rec.truth_u for rec, res in ok])
                v_err = np.array([res.v_hat - rec.truth_v for rec, res in ok])
                r_err = np.array([res.r_hat - rec.truth_r for rec, res in ok])
                nmse_vals = np.array([res.nmse for _, res in ok])
                rmse_u = float(np.sqrt(np.mean(u_err**2)))
                rmse_v = float(np.sqrt(np.mean(v_err**2)))
                rmse_r = float(np.sqrt(np.mean(r_err**2)))
                nmse_db = float(10.0 * np.log10(np.mean(nmse_vals)))
            else:
                rmse_u = rmse_v = rmse_r = nmse_db = float("nan")
            runtime = float(np.mean([res.runtime_ms for res in outcomes]))
            rows.append(
                {
                    "method": method,
                    "snr_db": float(snr_db),
                    "pilot_len": int(pilot_len),
                    "trials": len(outcomes),
                    "failures": failures,
                    "rmse_u": rmse_u,
                    "rmse_v": rmse_v,
                    "rmse_r_m": rmse_r,
                    "nmse_db": nmse_db,
                    "mean_runtime_ms": runtime,
                }
            )
    return rows


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.9g}"


def write_csv(result: SweepResult, path, timing: bool = False) -> None:
    """Write sweep rows with the fixed column order and 9-significant-digit floats.

    Wall-clock timings are inherently non-reproducible, so mean_runtime_ms is
    written as 0 unless ``timing`` is requested; with the default the file is
    byte-identical across runs and worker counts for a given (config, seed).
    """
    lines = [",".join(CSV_COLUMNS)]
    for row in result.rows:
        out = dict(row)
        if not timing:
            out["mean_runtime_ms"] = 0.0
        lines.append(",".join(_fmt(out[col]) for col in CSV_COLUMNS))
    with open(path, "w", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def method_errors(result: SweepResult, method: str, point_idx: int) -> dict[str, np.ndarray]:
    """Per-trial absolute errors and NMSE for one method at one sweep point (non-failed trials)."""
    pairs = [
        (rec, rec.results[method])
        for rec in result.point_records(point_idx)
        if not rec.results[method].failed
    ]
    return {
        "u": np.array([abs(res.u_hat - rec.truth_u) for rec, res in pairs]),
        "v": np.array([abs(res.v_hat - rec.truth_v) for rec, res in pairs]),
        "r": np.array([abs(res.r_hat - rec.truth_r) for rec, res in pairs]),
        "nmse": np.array([res.nmse for _, res in pairs]),
    }
