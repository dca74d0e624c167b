"""CLI for the SED hydrogen simulator."""

import json
import logging
import os
import sys
from pathlib import Path

import click
import numpy as np
import pandas as pd

from ..evaluate import Trace, ks_distance, radial_histogram, trace_histograms, trace_verdicts
from ..HydrogenSimulator import collapse_benchmark, collapse_config, run_ensemble, run_trajectory
from .errors import ConfigError, OutputError, SEDError, ValidationError
from .field import field_statistics
from .models import SimConfig
from .parser import config_help, dump_config, load_config
from .quantum import ground_state_radial_density, radial_cdf

VERBOSITY_ENV = "SEDATOM_VERBOSITY"

EXIT_RUNTIME = 1
EXIT_CONFIG = 2
EXIT_OUTPUT = 3


def _configure_logging() -> None:
    level = os.environ.get(VERBOSITY_ENV, "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _prepare_out_dir(out_dir: Path) -> Path:
    """Create ``out_dir`` or make sure it is an empty directory."""
    if out_dir.exists():
        if not out_dir.is_dir():
            raise OutputError(f"Output path {out_dir} exists and is not a directory")
        if any(out_dir.iterdir()):
            raise OutputError(f"Output directory {out_dir} is not empty")
    else:
        try:
            out_dir.mkdir(parents=True)
        except OSError as e:
            raise OutputError(f"Cannot create output directory {out_dir}: {e}") from e
    return out_dir


def _fail(e: Exception) -> None:
    """Report ``e`` and exit with its status."""
    if isinstance(e, (ConfigError, ValidationError)):
        click.echo(f"Configuration error: {e}", err=True)
        for message in getattr(e, "errors", []):
            click.echo(f"  - {message}", err=True)
        sys.exit(EXIT_CONFIG)
    if isinstance(e, (OutputError, OSError)):
        click.echo(f"Output error: {e}", err=True)
        sys.exit(EXIT_OUTPUT)
    click.echo(f"{type(e).__name__}: {e}", err=True)
    sys.exit(EXIT_RUNTIME)


def _read_trace(trace_path: Path):
    try:
        return Trace.from_frame(pd.read_csv(trace_path))
    except (OSError, ValidationError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise OutputError(f"Cannot read trace {trace_path}: {e}") from e


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n")


def _write_config(out_dir: Path, config: SimConfig) -> None:
    (out_dir / "config.yaml").write_text(dump_config(config))


config_option = click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="YAML configuration file (defaults apply to missing keys).",
)
set_option = click.option(
    "--set",
    "overrides",
    multiple=True,
    metavar="SECTION.KEY=VALUE",
    help="Override one config key; repeatable, applied after the file.",
)
out_option = click.option(
    "--out",
    "out_dir",
    required=True,
    type=click.Path(file_okay=False, path_type=Path),
    help="Output directory; must be new or empty.",
)


# \b keeps click from rewrapping the key list; it only holds up to the next blank line
@click.group(epilog="\b\n" + "\n".join(line for line in config_help().splitlines() if line))
@click.version_option()
def main():
    """Classical hydrogen in the stochastic zero-point field.

    Verbosity is read from the SEDATOM_VERBOSITY environment variable
    (DEBUG, INFO, WARNING or ERROR).
    """
    _configure_logging()


@main.command("simulate")
@config_option
@set_option
@out_option
def simulate_cmd(config_path, overrides, out_dir):
    """Run one trajectory and write its output directory.

    Collapse, ionization and stiffness stops are results, not failures.

    Exit codes:
        0: Success
        1: Simulation error
        2: Configuration error
        3: Output error
    """
    try:
        config = load_config(config_path, overrides)
        _prepare_out_dir(out_dir)
        output = run_trajectory(config)
        output.write(out_dir)
    except (SEDError, OSError) as e:
        _fail(e)
    stop = output.stop_reason.value if output.stop_reason else "incomplete"
    click.echo(f"✓ Trajectory (seed {config.seed}) finished: {stop}, {output.metrics['steps']} steps")
    click.echo(f"✓ Output written to {out_dir}")


@main.command("ensemble")
@config_option
@set_option
@out_option
@click.option("--runs", type=click.IntRange(min=1), default=10, show_default=True, help="Number of trajectories.")
@click.option("--seed-base", type=click.IntRange(min=0), default=None, help="First seed (default: run.seed).")
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True, help="Worker processes.")
def ensemble_cmd(config_path, overrides, out_dir, runs, seed_base, workers):
    """Run seeded trajectories and pool their histograms.

    Output does not depend on the worker count.

    Exit codes:
        0: Success
        1: Simulation error
        2: Configuration error
        3: Output error
    """
    try:
        config = load_config(config_path, overrides)
        _prepare_out_dir(out_dir)
        summary = run_ensemble(config, runs, seed_base=seed_base, workers=workers)
        summary.write(out_dir)
    except (SEDError, OSError) as e:
        _fail(e)
    reasons = ", ".join(f"{k}: {v}" for k, v in summary.stop_reasons.items())
    click.echo(f"✓ Ensemble of {runs} runs finished ({reasons})")
    if summary.ks_distance is not None:
        click.echo(f"✓ KS distance of pooled radius to ground state: {summary.ks_distance:.4f}")
    click.echo(f"✓ Output written to {out_dir}")


@main.command("collapse")
@config_option
@set_option
@out_option
@click.option("--r0", type=float, default=0.25, show_default=True, help="Initial circular radius (a.u.).")
@click.option("--Z", "Z", type=click.IntRange(min=1), default=1, show_default=True, help="Nuclear charge.")
@click.option("--full-scale", is_flag=True, help="Start at 0.53 Angstrom (r0 = 1.0018 a.u.).")
@click.option("--steps-per-orbit", type=click.IntRange(min=2), default=256, show_default=True)
def collapse_cmd(config_path, overrides, out_dir, r0, Z, full_scale, steps_per_orbit):
    """Radiation-only orbital decay against the closed-form collapse time.

    Exit codes:
        0: Success
        1: Simulation error
        2: Configuration error
        3: Output error
    """
    if full_scale:
        r0 = 1.0018
    try:
        config = collapse_config(load_config(config_path, overrides), r0, Z, steps_per_orbit)
        _prepare_out_dir(out_dir)
        result = collapse_benchmark(config)
        _write_json(out_dir / "collapse.json", result)
        _write_config(out_dir, config)
    except (SEDError, OSError) as e:
        _fail(e)
    click.echo(f"✓ Predicted collapse time: {result['predicted_au']:.6e} a.u. ({result['predicted_si']:.3e} s)")
    if result["ratio"] is None:
        click.echo(f"Run ended without collapse ({result['stop_reason']})", err=True)
    else:
        click.echo(f"✓ Measured/predicted: {result['ratio']:.4f}")


@main.command("field-stats")
@config_option
@set_option
@out_option
@click.option("--realizations", type=click.IntRange(min=2), default=100, show_default=True)
@click.option("--n-times", type=click.IntRange(min=1), default=128, show_default=True, help="Samples per realization.")
@click.option("--taus", default="0,1,2,5,10", show_default=True, help="Comma-separated lags in units of 1/omega_lo.")
def field_stats_cmd(config_path, overrides, out_dir, realizations, n_times, taus):
    """Empirical field variance and autocorrelation against the spectral oracles.

    Writes variance.csv and autocorrelation.csv.

    Exit codes:
        0: Success
        1: Simulation error
        2: Configuration error
        3: Output error
    """
    try:
        config = load_config(config_path, overrides)
        try:
            lags = [float(x) for x in taus.split(",") if x.strip()]
        except ValueError:
            raise ConfigError(f"--taus must be comma-separated numbers, got '{taus}'") from None
        lo, hi = config.cutoff.grid_span
        omega_lo = lo if lo > 0.0 else (hi - lo) / config.n_modes
        _prepare_out_dir(out_dir)
        variance, autocorrelation = field_statistics(
            config, realizations, np.array(lags) / omega_lo, n_times=n_times
        )
        variance.to_csv(out_dir / "variance.csv", index=False)
        autocorrelation.to_csv(out_dir / "autocorrelation.csv", index=False)
        _write_config(out_dir, config)
    except (SEDError, OSError) as e:
        _fail(e)
    worst = float(np.max(np.abs(variance["ratio"] - 1.0)))
    click.echo(f"✓ {realizations} realizations, worst variance deviation {worst:.2%}")
    click.echo(f"✓ Output written to {out_dir}")


@main.command("analyze")
@config_option
@set_option
@out_option
@click.option(
    "--trace", "trace_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path)
)
def analyze_cmd(config_path, overrides, out_dir, trace_path):
    """Histograms and detector verdicts of an existing trace.csv.

    Exit codes:
        0: Success
        1: Simulation error
        2: Configuration error
        3: Output error
    """
    try:
        config = load_config(config_path, overrides)
        trace = _read_trace(trace_path)
        _prepare_out_dir(out_dir)
        verdicts = trace_verdicts(trace, config.Z, config.diagnostics)
        until = verdicts[1].t_event if config.diagnostics.exclude_ionization else None
        for name, histogram in trace_histograms(trace, config.Z, config.diagnostics, until=until).items():
            histogram.to_frame().to_csv(out_dir / f"hist_{name}.csv", index=False)
        payload = {"seed": config.seed, "verdicts": [v.to_dict() for v in verdicts]}
        _write_json(out_dir / "verdicts.json", payload)
        _write_config(out_dir, config)
    except (SEDError, OSError) as e:
        _fail(e)
    fired = [v.kind.value for v in verdicts if v.fired]
    click.echo(f"✓ Analyzed {len(trace)} rows; verdicts: {', '.join(fired) or 'none'}")


@main.command("compare")
@config_option
@set_option
@out_option
@click.option(
    "--trace", "trace_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path)
)
def compare_cmd(config_path, overrides, out_dir, trace_path):
    """KS distance and density overlay of a trace's radius against the ground state.

    Writes overlay.csv (r, empirical_density, qm_density) and ks.json, both in
    scaled Bohr radii.

    Exit codes:
        0: Success
        1: Simulation error
        2: Configuration error
        3: Output error
    """
    try:
        config = load_config(config_path, overrides)
        trace = _read_trace(trace_path)
        _prepare_out_dir(out_dir)
        diagnostics = config.diagnostics
        edges = np.linspace(0.0, diagnostics.r_hist_max, diagnostics.r_bins + 1)
        histogram = radial_histogram(trace, edges, column="r", scale=float(config.Z))
        ks = ks_distance(histogram, lambda r: radial_cdf(r, Z=1))
        overlay = pd.DataFrame(
            {
                "r": histogram.centers,
                "empirical_density": histogram.density(),
                "qm_density": ground_state_radial_density(histogram.centers, Z=1),
            }
        )
        overlay.to_csv(out_dir / "overlay.csv", index=False)
        _write_json(
            out_dir / "ks.json",
            {"ks_distance": ks, "Z": config.Z, "seed": config.seed, "weight": histogram.total_weight},
        )
        _write_config(out_dir, config)
    except (SEDError, OSError) as e:
        _fail(e)
    click.echo(f"✓ KS distance to the ground-state radial distribution: {ks:.4f}")


if __name__ == "__main__":
    main()
