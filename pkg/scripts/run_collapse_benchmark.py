# =============================================================================
# Radiation-Only Collapse Benchmark
# =============================================================================
# Integrates coulomb + radiation reaction from a circular orbit until the
# collapse detector fires, and compares the measured time with the closed
# form t = (r0^3 - r_end^3) / (4 alpha^3 Z):
#   - desk scale: r0 = 0.25 a.u., required within 5%
#   - full scale: r0 = 1.0018 a.u. (0.53 Angstrom), predicted ~1.55e-11 s,
#     required within 30% of the quoted "about 1.3e-11 s"
# Pass --desk-only to skip the long full-scale run.
# =============================================================================

import json
import sys
import time
from pathlib import Path

import pandas as pd

# --- Add the project's src/ directory to sys.path so local packages can be imported ---
project_root = Path(__file__).resolve().parent.parent
src_path = project_root / "src"

if str(src_path) not in sys.path:
    sys.path.insert(0, str(src_path))
    print(f"✓ Added to sys.path: {src_path}")

from SEDAtom import sed_utils
from SEDAtom.HydrogenSimulator import collapse_benchmark, collapse_config

QUOTED_FULL_SCALE_S = 1.3e-11

base = sed_utils.load_config(project_root / "configs" / "collapse.yaml")
cases = [("desk", 0.25, 0.05)]
if "--desk-only" not in sys.argv:
    cases.append(("full", 1.0018, 0.30))

rows = []
for name, r0, tolerance in cases:
    start = time.time()
    result = collapse_benchmark(collapse_config(base, r0, Z=1, steps_per_orbit=base.steps_per_orbit))
    result["case"] = name
    result["elapsed_s"] = time.time() - start
    if name == "desk":
        result["passed"] = result["ratio"] is not None and abs(result["ratio"] - 1.0) <= tolerance
    else:
        measured = result["measured_si"]
        result["passed"] = measured is not None and abs(measured / QUOTED_FULL_SCALE_S - 1.0) <= tolerance
    rows.append(result)
    print(f"✓ {name}: measured {result['measured_au']} a.u. vs predicted {result['predicted_au']:.6e} a.u.")

results_df = pd.DataFrame(rows)
print("\n" + results_df[["case", "r0", "predicted_au", "measured_au", "ratio", "measured_si", "passed", "elapsed_s"]].to_string(index=False))

output_path = project_root / "assets" / "results" / "collapse_benchmark.json"
output_path.parent.mkdir(parents=True, exist_ok=True)
output_path.write_text(json.dumps(rows, indent=2) + "\n")
print(f"Results saved to: {output_path}")

sys.exit(0 if all(results_df["passed"]) else 1)
