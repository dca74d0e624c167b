# =============================================================================
# Desk-Scale SED Stability Ensemble (Z = 3, 1-D dipole field, moving cutoff)
# =============================================================================
# This script runs ten seeded trajectories of the desk-scale configuration
# (configs/desk_dipole_z3.yaml: about 900 active modes, cutoff at 2.5x the
# orbital frequency, about 1000 orbits per run) and checks two things:
#   1. At least 7 of the 10 runs end with neither a collapse nor an
#      ionization verdict
#   2. The pooled, time-weighted radius stays inside [0.1, 8] scaled Bohr radii
# Per-run results are streamed to a timestamped JSONL file as they finish;
# the pooled summary directory is written at the end.
# =============================================================================

# --- Standard library and third-party imports ---
import json
import sys
import time
from dataclasses import replace
from datetime import datetime
from pathlib import Path

import pandas as pd
from tqdm import tqdm

# --- Add the project's src/ directory to sys.path so local packages can be imported ---
project_root = Path(__file__).resolve().parent.parent
src_path = project_root / "src"

if str(src_path) not in sys.path:
    sys.path.insert(0, str(src_path))
    print(f"✓ Added to sys.path: {src_path}")

from SEDAtom import sed_utils
from SEDAtom.HydrogenSimulator import pool_outputs, run_trajectory

# --- Run configuration ---
N_RUNS = 10
REQUIRED_STABLE = 7
RADIUS_BAND = (0.1, 8.0)
config = sed_utils.load_config(project_root / "configs" / "desk_dipole_z3.yaml")
seeds = [config.seed + i for i in range(N_RUNS)]
print(f"✓ Loaded config: Z={config.Z}, {config.n_modes} modes, t_max={config.t_max} t0")

# --- Configure output paths with a timestamp ---
output_dir = project_root / "assets" / "results"
output_dir.mkdir(parents=True, exist_ok=True)
timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
jsonl_path = output_dir / f"desk_stability_Z{config.Z}_{timestamp}.jsonl"
print(f"Results will be saved to: {jsonl_path}")


# =============================================================================
# Main loop — one trajectory per seed, results streamed to JSONL
# =============================================================================
outputs = []
for seed in tqdm(seeds, desc="Trajectories", unit="run"):
    start = time.time()
    output = run_trajectory(replace(config, seed=seed))
    outputs.append((output, None))

    record = output.verdicts_dict()
    record["steps"] = output.metrics["steps"]
    record["elapsed_s"] = time.time() - start
    with open(jsonl_path, "a") as f:
        f.write(json.dumps(record) + "\n")

# --- Pool in seed order and evaluate the acceptance checks ---
summary = pool_outputs(config, seeds, outputs)
summary.write(output_dir / f"desk_stability_Z{config.Z}_{timestamp}")

results_df = pd.read_json(jsonl_path, lines=True)
fired = results_df["verdicts"].apply(
    lambda verdicts: any(v["kind"] in ("collapse", "ionization") for v in verdicts)
)
stable = int((~fired).sum())
r_percentiles = summary.percentiles.get("r", {})

print("\n" + "=" * 70)
print(results_df[["seed", "stop_reason", "t_final", "steps", "elapsed_s"]].to_string(index=False))
print("=" * 70)
print(f"Stable runs: {stable}/{N_RUNS} (required {REQUIRED_STABLE})")
print(f"Pooled radius p5..p95: {r_percentiles.get('p5')} .. {r_percentiles.get('p95')}")
print(f"KS distance to ground state: {summary.ks_distance}")

inside = bool(r_percentiles) and RADIUS_BAND[0] <= r_percentiles["p5"] and r_percentiles["p95"] <= RADIUS_BAND[1]
if stable >= REQUIRED_STABLE and inside:
    print("✓ Desk-scale stability criterion met")
else:
    print("✗ Desk-scale stability criterion NOT met")
    sys.exit(1)
