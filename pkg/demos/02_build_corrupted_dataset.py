"""Mirror a toy clean dataset into the full 95-subset corrupted tree.

Equivalent CLI:
    leafbench corrupt --in demo_output/clean --out demo_output/corrupted --seed 42
"""

import json
from pathlib import Path

from leafbench import build_corrupted_dataset, scan_dataset
from leafbench.synth import make_toy_dataset

CLEAN = Path("demo_output/clean")
CORRUPTED = Path("demo_output/corrupted")


def main():
    make_toy_dataset(CLEAN, classes=("healthy", "spotted"), per_class=3, size=64, seed=0)
    layout = scan_dataset(CLEAN)
    print(f"clean dataset: {len(layout.classes)} classes, {layout.file_count} images")

    manifest = build_corrupted_dataset(layout, CORRUPTED, global_seed=42, workers=4)
    print(f"built {len(manifest.subsets)} subsets "
          f"({len(manifest.kinds)} kinds x {len(manifest.severities)} severities)")
    print(f"severity table {manifest.severity_table_version} "
          f"hash {manifest.severity_table_hash[:12]}...")
    print(f"manifest: {CORRUPTED / 'manifest.json'}")

    doc = json.loads((CORRUPTED / "manifest.json").read_text())
    print("first subsets:", [f"{s['kind']}/{s['severity']}" for s in doc["subsets"][:4]])


if __name__ == "__main__":
    main()
