"""Score simulated prediction logs and render the full report bundle.

Three pretend classifiers with different robustness profiles predict an
8-class dataset under all 19 corruptions; the brittle one is used as the
normalization reference, so robust models land well under mCE 100.

Equivalent CLI:
    leafbench evaluate --logs demo_output/logs.csv --out demo_output/summary.json \
        --reference brittle_net
    leafbench report --summary demo_output/summary.json --out demo_output/report
"""

import csv
from pathlib import Path

import numpy as np

from leafbench.metrics import LOG_HEADER, build_surface, load_logs, summarize
from leafbench.reports import emit_all, model_columns
from leafbench.severity import CORRUPTION_KINDS

OUT = Path("demo_output")
CLASSES = [f"class_{i}" for i in range(8)]
N_IMAGES = 120

# per-severity error growth of each pretend model
PROFILES = {
    "brittle_net": 0.14,
    "midrange_net": 0.08,
    "sturdy_net": 0.03,
}


def simulate_log(path: Path) -> None:
    rng = np.random.Generator(np.random.Philox(key=7))
    truths = [CLASSES[i % len(CLASSES)] for i in range(N_IMAGES)]
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(LOG_HEADER)
        for model, slope in PROFILES.items():
            cells = [("clean", 0, 0.02)] + [
                (kind, severity, min(0.95, 0.05 + slope * severity))
                for kind in CORRUPTION_KINDS for severity in range(1, 6)
            ]
            for corruption, severity, p in cells:
                for i, truth in enumerate(truths):
                    if rng.random() < p:
                        predicted = CLASSES[(CLASSES.index(truth) + 1) % len(CLASSES)]
                    else:
                        predicted = truth
                    writer.writerow([model, "test", corruption, severity,
                                     f"img_{i:04d}.png", truth, predicted])


def main():
    OUT.mkdir(exist_ok=True)
    log_path = OUT / "logs.csv"
    simulate_log(log_path)
    print(f"simulated log: {log_path}")

    records = load_logs([log_path])
    summary = summarize(build_surface(records), reference_model="brittle_net")

    (OUT / "summary.json").write_text(summary.to_json() + "\n")
    print(f"\n{'model':<14} {'clean err %':>11} {'mCE':>7} {'rel mCE':>8}")
    for model in model_columns(summary):
        print(f"{model:<14} {100 * summary.clean_error[model]:>11.1f} "
              f"{summary.mce[model]:>7.1f} {summary.relative_mce[model]:>8.1f}")

    bundle = emit_all(summary, OUT / "report")
    print(f"\nwrote {len(bundle.files)} report files under {bundle.directory}/")
    print("open demo_output/report/curves_sturdy_net.svg to see the F1 curves")


if __name__ == "__main__":
    main()
