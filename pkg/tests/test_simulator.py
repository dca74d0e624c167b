import json
import math
import os
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from SEDAtom.evaluate import VerdictKind
from SEDAtom.HydrogenSimulator import (
    StopReason,
    TrajectoryRun,
    build_modes,
    checkpoint,
    collapse_benchmark,
    collapse_config,
    initial_state,
    predicted_collapse_time,
    resume,
    run_ensemble,
    run_trajectory,
)
from SEDAtom.sed_utils import (
    DiagnosticsConfig,
    FieldModel,
    ForceTerm,
    InitialCondition,
    IntegratorKind,
    SimConfig,
    SnapshotError,
    ValidationError,
    elements_from_state,
    load_config,
    to_si,
)

CONFIGS_DIR = Path(__file__).resolve().parents[1] / "configs"


def _assert_same_output(a, b):
    np.testing.assert_array_equal(a.trace.array, b.trace.array)
    np.testing.assert_array_equal(a.final_state.r, b.final_state.r)
    np.testing.assert_array_equal(a.final_state.v, b.final_state.v)
    assert a.final_state.t == b.final_state.t
    assert a.verdicts == b.verdicts
    assert a.stop_reason == b.stop_reason
    assert a.metrics == b.metrics
    for name in a.histograms:
        np.testing.assert_array_equal(a.histograms[name].mass, b.histograms[name].mass)


# -------------------------------------------------------------------------
# Setup
# -------------------------------------------------------------------------

def test_random_circular_phase_is_seeded():
    config = SimConfig(Z=2, initial_state=InitialCondition(kind="random_circular", r0=0.5))
    first = initial_state(config)
    assert first.radius == pytest.approx(0.5)
    assert initial_state(config).r.tolist() == first.r.tolist()
    assert initial_state(replace(config, seed=1)).r.tolist() != first.r.tolist()


def test_build_modes_applies_moving_cutoff(field_config):
    modes = build_modes(field_config, initial_state(field_config))
    # orbital frequency 1 on circular(1.0), cutoff 2.5
    assert modes.band == pytest.approx((0.0, 2.5))
    assert build_modes(replace(field_config, field_model=FieldModel.NONE), initial_state(field_config)) is None


def test_invalid_config_is_rejected(kepler_config):
    with pytest.raises(ValidationError) as info:
        TrajectoryRun(replace(kepler_config, t_max=-1.0))
    assert any("run.t_max" in e for e in info.value.errors)


# -------------------------------------------------------------------------
# Trajectories
# -------------------------------------------------------------------------

def test_kepler_run_reaches_t_max(kepler_config):
    output = run_trajectory(kepler_config)
    assert output.stop_reason == StopReason.T_MAX
    assert output.final_state.t == pytest.approx(kepler_config.t_max)
    times = output.trace.column("t")
    assert np.all(np.diff(times) > 0.0)
    assert output.trace.total_time == pytest.approx(kepler_config.t_max, rel=1e-12)
    assert output.histograms["r"].total_weight == pytest.approx(kepler_config.t_max, rel=1e-12)
    assert [v.kind for v in output.verdicts] == [VerdictKind.NONE] * 3
    energy = elements_from_state(output.final_state, 1).energy
    assert energy == pytest.approx(-0.5, rel=1e-6)


def test_windows_follow_orbital_period(kepler_config):
    run = TrajectoryRun(kepler_config)
    run.advance_window()
    # circular(1.0) has period 2 pi
    assert run.state.t == pytest.approx(2.0 * math.pi)
    assert run.steps == kepler_config.steps_per_orbit
    assert run.windows == 1


def test_run_is_deterministic(field_config):
    _assert_same_output(run_trajectory(field_config), run_trajectory(field_config))


def test_seed_changes_the_trajectory(field_config):
    a = run_trajectory(field_config)
    b = run_trajectory(replace(field_config, seed=8))
    assert not np.array_equal(a.final_state.r, b.final_state.r)


def test_field_run_metrics(field_config):
    output = run_trajectory(field_config)
    assert output.stop_reason == StopReason.T_MAX
    assert output.metrics["windows"] >= 4
    assert output.metrics["active_modes"] > 0
    assert output.metrics["trace_rows"] == len(output.trace)


def test_z_scaling_of_the_time_limit(kepler_config):
    config = replace(kepler_config, Z=3, initial_state=InitialCondition(kind="circular", r0=1.0 / 3.0))
    output = run_trajectory(config)
    assert output.final_state.t == pytest.approx(kepler_config.t_max / 9.0)
    assert output.histograms["r"].centers[np.argmax(output.histograms["r"].mass)] == pytest.approx(1.0, abs=0.05)


def test_collapse_stop(kepler_config):
    config = replace(kepler_config, diagnostics=DiagnosticsConfig(collapse_radius=1.5))
    output = run_trajectory(config)
    assert output.stop_reason == StopReason.COLLAPSE
    assert output.verdicts[0].kind == VerdictKind.COLLAPSE
    assert output.verdicts[0].t_event == output.trace.column("t")[0]


def test_ionization_stop(kepler_config):
    config = replace(
        kepler_config,
        initial_state=InitialCondition(kind="explicit", r=(1.0, 0.0, 0.0), v=(0.0, 1.6, 0.0)),
        diagnostics=DiagnosticsConfig(ionization_dwell=1.0),
    )
    output = run_trajectory(config)
    assert output.stop_reason == StopReason.IONIZATION
    assert output.ionization_time == output.trace.column("t")[0]
    # the ionization episode is left out of the histograms
    assert output.histograms["r"].total_weight == 0.0


def test_stiffness_stop(kepler_config):
    config = replace(kepler_config, integrator=IntegratorKind.ADAPTIVE_RK4, dt_init=1.0, dt_min=0.5, tolerance=1e-14)
    output = run_trajectory(config)
    assert output.stop_reason == StopReason.STIFFNESS
    assert len(output.trace) == 0


def test_adaptive_kepler_run(kepler_config):
    config = replace(kepler_config, integrator=IntegratorKind.ADAPTIVE_RK4, tolerance=1e-11)
    output = run_trajectory(config)
    assert output.stop_reason == StopReason.T_MAX
    assert output.final_state.t == pytest.approx(kepler_config.t_max)
    assert elements_from_state(output.final_state, 1).energy == pytest.approx(-0.5, rel=1e-8)


def test_circular_drive_holds_the_orbit(kepler_config):
    rr_only = replace(
        kepler_config,
        force_flags=frozenset({ForceTerm.COULOMB, ForceTerm.RADIATION_REACTION}),
        steps_per_orbit=400,
        field_updates_per_orbit=100,
        t_max=20 * 2.0 * math.pi,
        diagnostics=DiagnosticsConfig(trace_stride=100),
    )
    driven = replace(
        rr_only,
        force_flags=frozenset({ForceTerm.COULOMB, ForceTerm.RADIATION_REACTION, ForceTerm.FIELD_ELECTRIC}),
        field_model=FieldModel.CIRCULAR_DRIVE,
    )
    decay = 1.0 - elements_from_state(run_trajectory(rr_only).final_state, 1).r_c
    drift = abs(1.0 - elements_from_state(run_trajectory(driven).final_state, 1).r_c)
    assert decay > 0.0
    assert drift < 0.05 * decay


def test_harmonic_drive_holds_an_ellipse(kepler_config, perihelion):
    start = perihelion(a=0.1, e=0.3)
    rr_only = replace(
        kepler_config,
        force_flags=frozenset({ForceTerm.COULOMB, ForceTerm.RADIATION_REACTION}),
        steps_per_orbit=800,
        field_updates_per_orbit=200,
        n_harmonics=24,
        t_max=20 * 2.0 * math.pi * 0.1**1.5,
        initial_state=InitialCondition(kind="explicit", r=tuple(start.r), v=tuple(start.v)),
        diagnostics=DiagnosticsConfig(trace_stride=100),
    )
    driven = replace(
        rr_only,
        force_flags=frozenset({ForceTerm.COULOMB, ForceTerm.RADIATION_REACTION, ForceTerm.FIELD_ELECTRIC}),
        field_model=FieldModel.HARMONIC_DRIVE,
    )
    decayed = elements_from_state(run_trajectory(rr_only).final_state, 1)
    held = elements_from_state(run_trajectory(driven).final_state, 1)

    decay = 1.0 - decayed.r_c / 0.1
    assert decay > 0.0
    assert abs(1.0 - held.r_c / 0.1) < 0.05 * decay
    circularized = 0.3 - decayed.eccentricity
    assert circularized > 0.0
    assert abs(held.eccentricity - 0.3) < 0.05 * circularized


def test_planar_dipole_run_stays_in_plane(field_config):
    planar = run_trajectory(replace(field_config, planar=True))
    assert abs(planar.final_state.r[2]) < 1e-12
    assert abs(planar.final_state.v[2]) < 1e-12
    assert abs(run_trajectory(field_config).final_state.v[2]) > 1e-12


def test_moving_cutoff_tracks_the_orbit(field_config):
    policy = field_config.cutoff
    run = TrajectoryRun(field_config)
    edges = []
    while not run.finished:
        omega = elements_from_state(run.state, field_config.Z).orbital_omega
        run.advance_window()
        low, high = run.modes.band
        assert low == policy.floor
        assert high == pytest.approx(min(max(policy.multiple * omega, policy.floor), policy.ceiling), rel=1e-12)
        assert run.modes.frequencies.max() < high
        edges.append(high)
    assert len(edges) >= 4
    assert len(set(edges)) > 1


# -------------------------------------------------------------------------
# Checkpoint / resume
# -------------------------------------------------------------------------

@pytest.mark.parametrize("integrator", [IntegratorKind.FIXED_RK4, IntegratorKind.ADAPTIVE_RK4])
def test_resume_continues_bitwise(field_config, integrator):
    config = replace(field_config, integrator=integrator, tolerance=1e-8)
    straight = run_trajectory(config)

    first = TrajectoryRun(config).run(max_windows=2)
    assert not first.finished
    resumed = resume(checkpoint(first)).run().finish()
    _assert_same_output(straight, resumed)


def test_checkpoint_keeps_partial_decimation_group(field_config):
    run = TrajectoryRun(replace(field_config, diagnostics=DiagnosticsConfig(trace_stride=7))).run(max_windows=1)
    restored = resume(checkpoint(run))
    assert restored.trace.pending_count == run.trace.pending_count
    assert restored.steps == run.steps
    assert restored.modes.band == run.modes.band


def test_resume_rejects_corrupt_bytes(field_config):
    blob = checkpoint(TrajectoryRun(field_config).run(max_windows=1))
    with pytest.raises(SnapshotError):
        resume(blob[: len(blob) // 3])
    with pytest.raises(SnapshotError):
        resume(b"\x00" * 64)


def test_finish_does_not_disturb_the_run(field_config):
    run = TrajectoryRun(replace(field_config, diagnostics=DiagnosticsConfig(trace_stride=7))).run(max_windows=1)
    before = run.trace.pending_count
    assert before == 100 % 7
    partial = run.finish()
    assert partial.stop_reason is None
    assert run.trace.pending_count == before


# -------------------------------------------------------------------------
# Output
# -------------------------------------------------------------------------

def test_run_output_write(tmp_path, field_config):
    output = run_trajectory(field_config)
    output.write(tmp_path)
    for name in ("trace.csv", "hist_r.csv", "hist_L.csv", "hist_E.csv", "hist_ecc.csv", "metrics.json"):
        assert (tmp_path / name).is_file()
    assert load_config(tmp_path / "config.yaml") == field_config
    verdicts = json.loads((tmp_path / "verdicts.json").read_text())
    assert verdicts["seed"] == field_config.seed
    assert verdicts["stop_reason"] == "t_max"
    assert [v["kind"] for v in verdicts["verdicts"]] == ["none", "none", "none"]


# -------------------------------------------------------------------------
# Ensembles
# -------------------------------------------------------------------------

@pytest.fixture
def short_field_config(field_config):
    return replace(field_config, t_max=2.0 * 2.0 * math.pi)


def test_ensemble_pools_in_seed_order(short_field_config):
    summary = run_ensemble(short_field_config, 3, seed_base=20, progress=False)
    assert summary.seeds == [20, 21, 22]
    assert [out.config.seed for out in summary.outputs] == [20, 21, 22]
    assert summary.stop_reasons == {"t_max": 3}
    total = sum(out.histograms["r"].total_weight for out in summary.outputs)
    assert summary.histograms["r"].total_weight == pytest.approx(total)
    assert 0.0 <= summary.ks_distance <= 1.0
    assert set(summary.percentiles) == {"E", "ecc", "r"}


def test_ensemble_independent_of_workers(short_field_config):
    serial = run_ensemble(short_field_config, 2, progress=False)
    parallel = run_ensemble(short_field_config, 2, workers=2, progress=False)
    assert serial.to_dict() == parallel.to_dict()
    for name in serial.histograms:
        np.testing.assert_array_equal(serial.histograms[name].mass, parallel.histograms[name].mass)


def test_ensemble_write(tmp_path, short_field_config):
    summary = run_ensemble(short_field_config, 2, progress=False)
    summary.write(tmp_path)
    assert (tmp_path / "run_000" / "trace.csv").is_file()
    assert (tmp_path / "run_001" / "verdicts.json").is_file()
    assert (tmp_path / "hist_r.csv").is_file()
    data = json.loads((tmp_path / "summary.json").read_text())
    assert data["n_runs"] == 2
    assert data["seed_base"] == short_field_config.seed
    markdown = (tmp_path / "summary.md").read_text()
    assert "t_max" in markdown


def test_ensemble_rejects_bad_sizes(short_field_config):
    with pytest.raises(ValidationError):
        run_ensemble(short_field_config, 0, progress=False)
    with pytest.raises(ValidationError):
        run_ensemble(short_field_config, 2, seed_base=2**64 - 1, progress=False)


# -------------------------------------------------------------------------
# Collapse benchmark
# -------------------------------------------------------------------------

def test_predicted_collapse_time():
    # about 1.56e-11 s from the Bohr radius
    assert to_si(predicted_collapse_time(1.0), "time") == pytest.approx(1.556e-11, rel=2e-3)
    assert predicted_collapse_time(0.5, Z=2) == pytest.approx(predicted_collapse_time(1.0) / 16.0)
    assert predicted_collapse_time(1.0, r_end=1.0) == 0.0


def test_collapse_config(kepler_config):
    config = collapse_config(kepler_config, r0=0.3, Z=2, steps_per_orbit=64)
    assert config.field_model == FieldModel.NONE
    assert config.force_flags == frozenset({ForceTerm.COULOMB, ForceTerm.RADIATION_REACTION})
    assert config.initial_state == InitialCondition(kind="circular", r0=0.3)
    assert config.steps_per_orbit == 64
    assert config.diagnostics.trace_stride == 64
    predicted = predicted_collapse_time(0.3, 2, config.diagnostics.collapse_radius / 2)
    assert config.t_max * config.t0 == pytest.approx(1.5 * predicted)


@pytest.mark.slow
def test_collapse_time_matches_decay_law(kepler_config):
    result = collapse_benchmark(collapse_config(kepler_config, r0=0.1, steps_per_orbit=128))
    assert result["stop_reason"] == "collapse"
    assert result["ratio"] == pytest.approx(1.0, abs=0.05)


@pytest.mark.slow
def test_full_scale_collapse_time(kepler_config):
    result = collapse_benchmark(collapse_config(kepler_config, r0=1.0018, steps_per_orbit=128))
    assert result["stop_reason"] == "collapse"
    assert result["predicted_si"] == pytest.approx(1.56e-11, rel=0.01)
    assert result["ratio"] == pytest.approx(1.0, abs=0.05)


@pytest.mark.slow
def test_desk_dipole_ensemble_is_stable():
    config = load_config(CONFIGS_DIR / "desk_dipole_z3.yaml")
    summary = run_ensemble(config, 10, workers=os.cpu_count() or 1, progress=False)
    escaped = {VerdictKind.COLLAPSE, VerdictKind.IONIZATION}
    stable = sum(
        1
        for out in summary.outputs
        if out is not None and not any(v.fired and v.kind in escaped for v in out.verdicts)
    )
    assert stable >= 7
    radius = summary.percentiles["r"]
    assert 0.1 <= radius["p5"] and radius["p95"] <= 8.0
