"""
Hydrogen Simulator Module

This module runs classical hydrogen trajectories in the stochastic zero-point
field and pools them into ensembles:
    - A per-window loop tied to the osculating orbital period: elements,
      moving cutoff, field cache, Runge-Kutta steps, recording, detectors
    - Collapse / ionization verdicts and stiffness failures reported as data
    - Checkpoint and resume that continue bitwise-identically
    - Seeded ensembles across worker processes with a seed-ordered merge
    - The radiation-only collapse benchmark against the closed-form decay law

Typical usage flow:
    1. Build a ``SimConfig`` with ``sed_utils.load_config(path, overrides)``
    2. Call ``run_trajectory(config)`` (or drive a ``TrajectoryRun`` window by
       window, with ``checkpoint``/``resume`` in between)
    3. Write artifacts with ``RunOutput.write(out_dir)``; for many seeds use
       ``run_ensemble(config, n_runs)`` and ``EnsembleSummary.write(out_dir)``
"""

import json
import logging
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np
from jinja2 import Environment, FileSystemLoader
from tqdm import tqdm

from .evaluate import (
    CollapseMonitor,
    CriticalLMonitor,
    DetectorVerdict,
    IonizationMonitor,
    Trace,
    VerdictKind,
    WeightedHistogram,
    ks_distance,
    trace_histograms,
    weighted_percentiles,
)
from .sed_utils.dynamics import adaptive_step, make_accel_fn, rk4_step
from .sed_utils.errors import OutputError, SEDError, SingularityError, SnapshotError, StiffnessError, ValidationError
from .sed_utils.field import (
    ModeSet,
    apply_moving_cutoff,
    cache_eval,
    circular_drive_modes,
    eval_field,
    harmonic_drive_modes,
    make_cache,
    sample_modes,
)
from .sed_utils.models import (
    INITIAL_CONDITION_STREAM,
    UINT64_MAX,
    CutoffKind,
    FieldModel,
    ForceTerm,
    InitialCondition,
    IntegratorKind,
    SimConfig,
    State,
)
from .sed_utils.orbits import elements_from_state
from .sed_utils.parser import dump_config, load_config_text
from .sed_utils.quantum import radial_cdf
from .sed_utils.snapshot import modes_from_arrays, modes_to_arrays, pack, unpack
from .sed_utils.units import ALPHA, to_si
from .sed_utils.validator import validate_config

logger = logging.getLogger(__name__)

TEMPLATES_DIR = Path(__file__).parent / "templates"


class StopReason(str, Enum):
    T_MAX = "t_max"
    COLLAPSE = "collapse"
    IONIZATION = "ionization"
    STIFFNESS = "stiffness"


# ============================================================================
# Initial conditions and field setup
# ============================================================================

def initial_state(config: SimConfig) -> State:
    """Electron state at t = 0 described by ``config.initial_state``.

    ``random_circular(r0)`` draws its phase from the reserved
    initial-condition stream, so it never shares variates with a field mode.
    """
    ic = config.initial_state
    if ic.kind == "circular":
        return State.circular(ic.r0, config.Z)
    if ic.kind == "random_circular":
        generator = config.rng.stream(INITIAL_CONDITION_STREAM).generator()
        return State.circular(ic.r0, config.Z, phase=float(generator.uniform(0.0, 2.0 * math.pi)))
    return State(t=0.0, r=ic.r, v=ic.v)


def _orbital_frequency(state: State, Z: int, singular_radius: float = 0.0) -> float:
    """Osculating Kepler frequency; the circular frequency at the current radius when unbound."""
    elements = elements_from_state(state, Z, singular_radius)
    if elements.bound:
        return elements.orbital_omega
    return math.sqrt(Z / state.radius**3)


def build_modes(config: SimConfig, state: State) -> Optional[ModeSet]:
    """Initial ModeSet of a run, or None without a field."""
    if config.field_model == FieldModel.NONE:
        return None
    if config.field_model == FieldModel.CIRCULAR_DRIVE:
        return circular_drive_modes(config, state)
    if config.field_model == FieldModel.HARMONIC_DRIVE:
        return harmonic_drive_modes(config, state)
    modes = sample_modes(config, config.cutoff.grid_span)
    if config.cutoff.kind == CutoffKind.MOVING:
        omega = _orbital_frequency(state, config.Z, config.singular_radius)
        modes = apply_moving_cutoff(modes, omega, config.cutoff)
    return modes


# ============================================================================
# Run output
# ============================================================================

@dataclass
class RunOutput:
    """Everything one trajectory produces.

    Attributes:
        config: Configuration of the run (the echo reproduces it)
        trace: Recorded rows, atomic units
        histograms: Scaled-unit histograms keyed "r", "L", "E", "ecc"
        verdicts: Collapse, ionization and critical-L verdicts
        stop_reason: Why the run ended (None if it was stopped early by the caller)
        metrics: Step, window and refresh counters
        final_state: Last electron state
        wall_time: Seconds spent integrating; logged, never written
    """

    config: SimConfig
    trace: Trace
    histograms: dict[str, WeightedHistogram]
    verdicts: list[DetectorVerdict]
    stop_reason: Optional[StopReason]
    metrics: dict
    final_state: State
    wall_time: float = 0.0

    @property
    def ionization_time(self) -> Optional[float]:
        return next((v.t_event for v in self.verdicts if v.kind == VerdictKind.IONIZATION), None)

    def verdicts_dict(self) -> dict:
        return {
            "seed": self.config.seed,
            "stop_reason": None if self.stop_reason is None else self.stop_reason.value,
            "t_final": self.final_state.t,
            "verdicts": [v.to_dict() for v in self.verdicts],
        }

    def write(self, out_dir: Path) -> None:
        """Write trace.csv, hist_*.csv, verdicts.json, config.yaml and metrics.json."""
        out_dir = Path(out_dir)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            self.trace.to_frame().to_csv(out_dir / "trace.csv", index=False)
            for name, histogram in self.histograms.items():
                histogram.to_frame().to_csv(out_dir / f"hist_{name}.csv", index=False)
            (out_dir / "verdicts.json").write_text(json.dumps(self.verdicts_dict(), indent=2) + "\n")
            (out_dir / "config.yaml").write_text(dump_config(self.config))
            (out_dir / "metrics.json").write_text(json.dumps(self.metrics, indent=2, sort_keys=True) + "\n")
        except OSError as e:
            raise OutputError(f"Cannot write run output to {out_dir}: {e}") from e


# ============================================================================
# Trajectory
# ============================================================================

class TrajectoryRun:
    """
    One trajectory advanced window by window.

    Each window spans one osculating period (the circular period at the
    current radius when the orbit is unbound). At the window start the moving
    cutoff is re-applied and a field cache with ``field_updates_per_orbit``
    knot intervals (plus one spare knot) is built for the dipole models; the
    axial model is summed directly at the electron position. Steps are then
    taken with fixed RK4 (period/steps_per_orbit) or adaptive RK4 clipped at
    the window end.

    Attributes:
        config: Validated configuration
        state: Current electron state
        modes: Current ModeSet (None without a field)
        trace: Recorded rows
        stop_reason: Set once the run has ended
        steps, windows, cutoff_refreshes: Counters
        dt_next: Next adaptive step proposal (a.u.)
    """

    def __init__(self, config: SimConfig, _restoring: bool = False):
        errors = validate_config(config)
        if errors:
            raise ValidationError(f"Invalid configuration ({len(errors)} errors)", errors)
        self.config = config
        diagnostics = config.diagnostics
        self.t_end = config.t_max * config.t0
        self.dt_min = config.dt_min * config.t0
        self.dt_next = config.dt_init * config.t0
        self.trace = Trace(stride=diagnostics.trace_stride)
        self.collapse = CollapseMonitor(r_min=diagnostics.collapse_radius, Z=config.Z)
        self.ionization = IonizationMonitor(
            threshold=diagnostics.ionization_threshold, dwell=diagnostics.ionization_dwell, Z=config.Z
        )
        self.critical_L = CriticalLMonitor(
            L_crit=diagnostics.critical_L, energy_band=diagnostics.critical_L_energy_band, Z=config.Z
        )
        self.stop_reason: Optional[StopReason] = None
        self.steps = 0
        self.windows = 0
        self.cutoff_refreshes = 0
        self.wall_time = 0.0
        if _restoring:
            return
        self.state = initial_state(config)
        self.modes = build_modes(config, self.state)

    @property
    def finished(self) -> bool:
        return self.stop_reason is not None

    # ------------------------------------------------------------------
    # Window loop
    # ------------------------------------------------------------------

    def _field_provider(self, t_start: float, period: float):
        config = self.config
        if self.modes is None:
            return None
        if not (config.has(ForceTerm.FIELD_ELECTRIC) or config.has(ForceTerm.FIELD_MAGNETIC)):
            return None
        modes = self.modes
        if modes.model == FieldModel.AXIAL_PLANE_WAVE:
            return lambda t, r: eval_field(modes, t, r)
        updates = config.field_updates_per_orbit
        cache = make_cache(modes, t_start, t_start + period * (updates + 1) / updates, updates + 2)
        return lambda t, r: cache_eval(cache, t)

    def _stop(self, reason: StopReason) -> None:
        self.stop_reason = reason
        logger.info("Run (seed %d) stopped: %s at t=%.6e a.u.", self.config.seed, reason.value, self.state.t)

    def _accept(self, new_state: State) -> bool:
        """Record ``new_state`` and run the detectors; False when the run must stop."""
        dt = new_state.t - self.state.t
        self.state = new_state
        self.steps += 1
        elements = elements_from_state(new_state, self.config.Z, self.config.singular_radius)
        self.trace.record(new_state, elements, dt)

        t = new_state.t
        self.critical_L.update(t, elements.energy, elements.L_norm, dt)
        if self.collapse.update(t, new_state.radius):
            self._stop(StopReason.COLLAPSE)
            return False
        if self.ionization.update(t, elements.energy):
            self._stop(StopReason.IONIZATION)
            return False
        return True

    def _fixed_window(self, window_end: float, period: float, accel_fn) -> None:
        length = window_end - self.state.t
        nominal = period / self.config.steps_per_orbit
        n_steps = max(1, math.ceil(length / nominal - 1e-9))
        dt = length / n_steps
        for k in range(n_steps):
            new_state = rk4_step(self.state, dt, accel_fn)
            if k == n_steps - 1:
                new_state = State(t=window_end, r=new_state.r, v=new_state.v)
            if not self._accept(new_state):
                return

    def _adaptive_window(self, window_end: float, accel_fn) -> None:
        tolerance = self.config.tolerance
        while self.state.t < window_end:
            remaining = window_end - self.state.t
            new_state, dt_used, dt_next = adaptive_step(
                self.state,
                tolerance,
                accel_fn,
                self.dt_next,
                dt_min=min(self.dt_min, 0.5 * remaining),
                dt_max=remaining,
            )
            if dt_used == remaining:
                # landed on the window end; keep the unclipped proposal
                new_state = State(t=window_end, r=new_state.r, v=new_state.v)
            else:
                self.dt_next = dt_next
            if not self._accept(new_state):
                return

    def advance_window(self) -> bool:
        """Integrate one window.

        Returns:
            True while the run can continue.
        """
        if self.finished:
            return False
        config = self.config
        if self.state.t >= self.t_end:
            self._stop(StopReason.T_MAX)
            return False

        started = time.perf_counter()
        try:
            omega = _orbital_frequency(self.state, config.Z, config.singular_radius)
            period = 2.0 * math.pi / omega
            if (
                self.modes is not None
                and config.cutoff.kind == CutoffKind.MOVING
                and config.field_model in (FieldModel.DIPOLE_1D, FieldModel.AXIAL_PLANE_WAVE)
            ):
                refreshed = apply_moving_cutoff(self.modes, omega, config.cutoff)
                if refreshed is not self.modes:
                    self.cutoff_refreshes += 1
                self.modes = refreshed

            window_end = min(self.state.t + period, self.t_end)
            accel_fn = make_accel_fn(config, self._field_provider(self.state.t, period))
            if config.integrator == IntegratorKind.FIXED_RK4:
                self._fixed_window(window_end, period, accel_fn)
            else:
                self._adaptive_window(window_end, accel_fn)
        except SingularityError as e:
            if self.collapse.t_event is None:
                self.collapse.t_event = e.state.t if e.state is not None else self.state.t
            self._stop(StopReason.COLLAPSE)
        except StiffnessError as e:
            logger.warning("Stiffness stop: %s", e)
            self._stop(StopReason.STIFFNESS)
        finally:
            self.wall_time += time.perf_counter() - started

        self.windows += 1
        if not self.finished and self.state.t >= self.t_end:
            self._stop(StopReason.T_MAX)
        return not self.finished

    def run(self, max_windows: Optional[int] = None) -> "TrajectoryRun":
        """Advance until the run stops, or for at most ``max_windows`` windows."""
        count = 0
        while max_windows is None or count < max_windows:
            if not self.advance_window():
                break
            count += 1
        return self

    # ------------------------------------------------------------------
    # Output
    # ------------------------------------------------------------------

    def metrics(self) -> dict:
        return {
            "steps": self.steps,
            "windows": self.windows,
            "cutoff_refreshes": self.cutoff_refreshes,
            "trace_rows": len(self.trace) + (1 if self.trace.pending_count else 0),
            "active_modes": 0 if self.modes is None else len(self.modes),
        }

    def finish(self) -> RunOutput:
        """Build the RunOutput of the current progress; the run itself is left untouched."""
        trace = Trace.restore(*self.trace.snapshot_arrays()).flush()
        diagnostics = self.config.diagnostics
        until = None
        if diagnostics.exclude_ionization and self.ionization.t_event is not None:
            until = self.ionization.t_event
        logger.info(
            "Run (seed %d): %d steps in %d windows, %.2f s",
            self.config.seed,
            self.steps,
            self.windows,
            self.wall_time,
        )
        return RunOutput(
            config=self.config,
            trace=trace,
            histograms=trace_histograms(trace, self.config.Z, diagnostics, until=until),
            verdicts=[self.collapse.verdict(), self.ionization.verdict(), self.critical_L.verdict()],
            stop_reason=self.stop_reason,
            metrics=self.metrics(),
            final_state=self.state,
            wall_time=self.wall_time,
        )


def run_trajectory(config: SimConfig) -> RunOutput:
    """Run one trajectory to its end and return its output."""
    return TrajectoryRun(config).run().finish()


# ============================================================================
# Checkpoint / resume
# ============================================================================

def checkpoint(run: TrajectoryRun) -> bytes:
    """Snapshot a run between windows.

    The snapshot holds the config echo, state, mode arrays, trace (including a
    partial decimation group), detector state, counters and step proposal.
    """
    trace_meta, arrays = run.trace.snapshot_arrays()
    header = {
        "config": dump_config(run.config),
        "t": run.state.t,
        "dt_next": run.dt_next,
        "stop_reason": None if run.stop_reason is None else run.stop_reason.value,
        "counters": {"steps": run.steps, "windows": run.windows, "cutoff_refreshes": run.cutoff_refreshes},
        "monitors": {
            "collapse": run.collapse.state_dict(),
            "ionization": run.ionization.state_dict(),
            "critical_L": run.critical_L.state_dict(),
        },
        "trace": trace_meta,
        "modes": None,
    }
    arrays["state.r"] = np.array(run.state.r)
    arrays["state.v"] = np.array(run.state.v)
    if run.modes is not None:
        header["modes"], mode_arrays = modes_to_arrays(run.modes)
        arrays.update(mode_arrays)
    return pack(header, arrays, kind="trajectory")


def resume(blob: bytes) -> TrajectoryRun:
    """Rebuild a TrajectoryRun from :func:`checkpoint` bytes.

    Raises:
        SnapshotError: If the snapshot is corrupt, truncated or of another version
    """
    header, arrays = unpack(blob, kind="trajectory")
    try:
        config = load_config_text(header["config"])
        run = TrajectoryRun(config, _restoring=True)
        run.state = State(t=header["t"], r=arrays["state.r"], v=arrays["state.v"])
        run.modes = None if header["modes"] is None else modes_from_arrays(header["modes"], arrays)
        run.trace = Trace.restore(header["trace"], arrays)
        run.dt_next = header["dt_next"]
        run.stop_reason = None if header["stop_reason"] is None else StopReason(header["stop_reason"])
        counters = header["counters"]
        run.steps, run.windows, run.cutoff_refreshes = counters["steps"], counters["windows"], counters["cutoff_refreshes"]
        run.collapse.load_state(header["monitors"]["collapse"])
        run.ionization.load_state(header["monitors"]["ionization"])
        run.critical_L.load_state(header["monitors"]["critical_L"])
    except SnapshotError:
        raise
    except (KeyError, TypeError, ValueError, SEDError) as e:
        raise SnapshotError(f"Snapshot content is incomplete or inconsistent: {e}") from e
    return run


# ============================================================================
# Ensembles
# ============================================================================

@dataclass
class EnsembleSummary:
    """Pooled result of several seeded trajectories.

    Attributes:
        config: Base configuration (seed replaced per run)
        seeds: Seed of every run, in merge order
        outputs: RunOutput per seed, None where the run raised
        errors: Error message per failed seed
        histograms: Pooled scaled-unit histograms
        ks_distance: Distance of the pooled radius histogram to the quantum radial CDF
        percentiles: Time-weighted percentiles of scaled E, eccentricity and scaled r
    """

    config: SimConfig
    seeds: list[int]
    outputs: list[Optional[RunOutput]]
    errors: dict[int, str] = field(default_factory=dict)
    histograms: dict[str, WeightedHistogram] = field(default_factory=dict)
    ks_distance: Optional[float] = None
    percentiles: dict[str, dict[str, float]] = field(default_factory=dict)

    @property
    def stop_reasons(self) -> dict[str, int]:
        counts = Counter(
            "error" if out is None else (out.stop_reason.value if out.stop_reason else "incomplete")
            for out in self.outputs
        )
        return dict(sorted(counts.items()))

    def to_dict(self) -> dict:
        runs = []
        for seed, output in zip(self.seeds, self.outputs):
            entry = {"seed": seed, "error": self.errors.get(seed)}
            if output is not None:
                entry.update(output.verdicts_dict())
            runs.append(entry)
        return {
            "n_runs": len(self.seeds),
            "seed_base": self.seeds[0],
            "stop_reasons": self.stop_reasons,
            "ks_distance_r": self.ks_distance,
            "pooled_weight": None if "r" not in self.histograms else self.histograms["r"].total_weight,
            "percentiles": self.percentiles,
            "runs": runs,
        }

    def render_markdown(self) -> str:
        env = Environment(loader=FileSystemLoader(str(TEMPLATES_DIR)), keep_trailing_newline=True)
        template = env.get_template("ensemble_summary.md.jinja")
        return template.render(summary=self.to_dict(), config=self.config)

    def write(self, out_dir: Path) -> None:
        """Write run_XXX/ directories, pooled histograms, config.yaml, summary.json and summary.md.

        The top-level config.yaml carries the first seed, so rerunning it with the
        same --runs reproduces the ensemble.
        """
        out_dir = Path(out_dir)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            for index, (seed, output) in enumerate(zip(self.seeds, self.outputs)):
                run_dir = out_dir / f"run_{index:03d}"
                if output is not None:
                    output.write(run_dir)
                else:
                    run_dir.mkdir(parents=True, exist_ok=True)
                    (run_dir / "error.json").write_text(
                        json.dumps({"seed": seed, "error": self.errors.get(seed)}, indent=2) + "\n"
                    )
            for name, histogram in self.histograms.items():
                histogram.to_frame().to_csv(out_dir / f"hist_{name}.csv", index=False)
            first_seed = self.seeds[0] if self.seeds else self.config.seed
            (out_dir / "config.yaml").write_text(dump_config(replace(self.config, seed=first_seed)))
            (out_dir / "summary.json").write_text(json.dumps(self.to_dict(), indent=2) + "\n")
            (out_dir / "summary.md").write_text(self.render_markdown())
        except OSError as e:
            raise OutputError(f"Cannot write ensemble output to {out_dir}: {e}") from e


def _run_member(config: SimConfig) -> tuple[Optional[RunOutput], Optional[str]]:
    """Worker entry point; failures come back as messages so the ensemble completes."""
    try:
        return run_trajectory(config), None
    except Exception as e:  # noqa: BLE001
        logger.exception("Run with seed %d failed", config.seed)
        return None, f"{type(e).__name__}: {e}"


def pool_outputs(config: SimConfig, seeds: list[int], results) -> EnsembleSummary:
    """Merge per-seed results in seed order."""
    summary = EnsembleSummary(config=config, seeds=list(seeds), outputs=[])
    samples = {"E": [], "ecc": [], "r": []}
    weights = []
    Z = config.Z
    for seed, (output, error) in zip(seeds, results):
        summary.outputs.append(output)
        if output is None:
            summary.errors[seed] = error
            continue
        for name, histogram in output.histograms.items():
            pooled = summary.histograms.get(name)
            summary.histograms[name] = histogram if pooled is None else pooled.merge(histogram)
        data = output.trace.array
        until = output.ionization_time if config.diagnostics.exclude_ionization else None
        if until is not None:
            data = data[data[:, 0] < until]
        samples["E"].append(data[:, 2] / Z**2)
        samples["ecc"].append(data[:, 4])
        samples["r"].append(data[:, 1] * Z)
        weights.append(data[:, 5])

    if "r" in summary.histograms and summary.histograms["r"].total_weight > 0.0:
        summary.ks_distance = ks_distance(summary.histograms["r"], lambda r: radial_cdf(r, Z=1))
    if weights and sum(w.size for w in weights) > 0:
        pooled_weights = np.concatenate(weights)
        summary.percentiles = {
            name: weighted_percentiles(np.concatenate(values), pooled_weights) for name, values in samples.items()
        }
    return summary


def run_ensemble(
    config: SimConfig,
    n_runs: int,
    seed_base: Optional[int] = None,
    workers: int = 1,
    progress: bool = True,
) -> EnsembleSummary:
    """Run ``n_runs`` trajectories with seeds ``seed_base + i`` and pool them.

    Results are merged in seed order whatever the worker count, so the
    summary does not depend on ``workers``.

    Args:
        config: Base configuration
        n_runs: Number of trajectories (>= 1)
        seed_base: First seed; defaults to ``config.seed``
        workers: Worker processes; 1 runs in-process
        progress: Show a tqdm progress bar

    Returns:
        EnsembleSummary with per-run outputs and pooled statistics.
    """
    if n_runs < 1:
        raise ValidationError(f"An ensemble needs at least one run, got {n_runs}")
    seed_base = config.seed if seed_base is None else seed_base
    if seed_base < 0 or seed_base + n_runs - 1 > UINT64_MAX:
        raise ValidationError(f"Seeds {seed_base}..{seed_base + n_runs - 1} leave the unsigned 64-bit range")
    seeds = [seed_base + i for i in range(n_runs)]
    configs = [replace(config, seed=seed) for seed in seeds]

    bar = dict(total=n_runs, desc="Trajectories", unit="run", disable=not progress)
    if workers <= 1:
        results = [_run_member(c) for c in tqdm(configs, **bar)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(tqdm(executor.map(_run_member, configs), **bar))
    return pool_outputs(config, seeds, results)


# ============================================================================
# Radiation-only collapse benchmark
# ============================================================================

def predicted_collapse_time(r0: float, Z: int = 1, r_end: float = 0.0) -> float:
    """Time (a.u.) for radiation reaction to shrink a circular orbit from r0 to r_end.

    From dr/dt = -(4 alpha^3 Z / 3) / r^2: t = (r0^3 - r_end^3) / (4 alpha^3 Z).
    """
    return (r0**3 - r_end**3) / (4.0 * ALPHA**3 * Z)


def collapse_config(base: SimConfig, r0: float, Z: int = 1, steps_per_orbit: Optional[int] = None) -> SimConfig:
    """Radiation-only variant of ``base`` starting on circular(r0), long enough to collapse."""
    r_end = base.diagnostics.collapse_radius / Z
    horizon = 1.5 * predicted_collapse_time(r0, Z, r_end) * Z**2
    steps = base.steps_per_orbit if steps_per_orbit is None else steps_per_orbit
    return replace(
        base,
        Z=Z,
        force_flags=frozenset({ForceTerm.COULOMB, ForceTerm.RADIATION_REACTION}),
        field_model=FieldModel.NONE,
        integrator=IntegratorKind.FIXED_RK4,
        initial_state=InitialCondition(kind="circular", r0=r0),
        t_max=horizon,
        steps_per_orbit=steps,
        field_updates_per_orbit=min(base.field_updates_per_orbit, steps // 2),
        # one trace row per orbit is plenty for a monotone decay
        diagnostics=replace(base.diagnostics, trace_stride=max(base.diagnostics.trace_stride, steps)),
    )


def collapse_benchmark(config: SimConfig) -> dict:
    """Run a radiation-only collapse and compare with the closed-form time."""
    r0 = config.initial_state.r0
    r_end = config.diagnostics.collapse_radius / config.Z
    predicted = predicted_collapse_time(r0, config.Z, r_end)
    output = run_trajectory(config)
    measured = output.verdicts[0].t_event
    result = {
        "r0": r0,
        "Z": config.Z,
        "seed": config.seed,
        "r_end": r_end,
        "predicted_au": predicted,
        "predicted_to_origin_au": predicted_collapse_time(r0, config.Z),
        "predicted_si": to_si(predicted, "time"),
        "measured_au": measured,
        "measured_si": None if measured is None else to_si(measured, "time"),
        "ratio": None if measured is None else measured / predicted,
        "stop_reason": None if output.stop_reason is None else output.stop_reason.value,
        "steps": output.metrics["steps"],
    }
    logger.info("Collapse benchmark: %s", result)
    return result
