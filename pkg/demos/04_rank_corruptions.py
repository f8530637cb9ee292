"""Rank the 19 corruptions from least to most damaging for one model.

Run demos/03_score_logs_and_report.py first (or any `leafbench evaluate`)
to produce demo_output/summary.json.
"""

from pathlib import Path

from leafbench.metrics import RobustnessSummary, rank_corruptions
from leafbench.reports import DISPLAY_NAMES

SUMMARY = Path("demo_output/summary.json")


def main():
    if not SUMMARY.is_file():
        raise SystemExit("run demos/03_score_logs_and_report.py first")
    summary = RobustnessSummary.from_json(SUMMARY.read_text())
    model = [m for m in summary.models if m != summary.reference_model][-1]
    print(f"corruption ranking for {model} (rank 1 = least damaging)\n")
    for rank, corruption, score in rank_corruptions(summary, model):
        print(f"  {rank:>2}. {DISPLAY_NAMES[corruption]:<15} mean macro-F1 {score:.4f}")


if __name__ == "__main__":
    main()
