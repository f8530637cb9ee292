"""Render a RobustnessSummary into tables, curve data, and SVG charts.

Pure formatting: every emitted cell is a summary field after the stated
rounding (integer per-corruption CE, one decimal for Error/mCE, four
decimals for F1).  Identical summary + options produce byte-identical
files, so reports can be diffed across runs.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .metrics import RobustnessSummary, rank_corruptions

TABLE_GROUPS = (
    ("noise", ("gaussian_noise", "shot_noise", "impulse_noise", "speckle_noise")),
    ("blur", ("defocus_blur", "glass_blur", "motion_blur", "zoom_blur", "gaussian_blur")),
    ("weather", ("snow", "frost", "fog", "brightness", "spatter")),
    ("digital", ("contrast", "elastic", "jpeg", "pixelate", "saturate")),
)

DISPLAY_NAMES = {
    "gaussian_noise": "Gaussian Noise", "shot_noise": "Shot Noise",
    "impulse_noise": "Impulse Noise", "speckle_noise": "Speckle Noise",
    "defocus_blur": "Defocus Blur", "glass_blur": "Glass Blur",
    "motion_blur": "Motion Blur", "zoom_blur": "Zoom Blur",
    "gaussian_blur": "Gaussian Blur", "snow": "Snow", "frost": "Frost",
    "fog": "Fog", "brightness": "Brightness", "spatter": "Spatter",
    "contrast": "Contrast", "elastic": "Elastic", "jpeg": "JPEG",
    "pixelate": "Pixelate", "saturate": "Saturate",
}

_PALETTE_HUES = [int(round(i * 360 / 19)) % 360 for i in range(19)]


@dataclass(frozen=True)
class ReportBundle:
    """Paths of everything a full report run wrote."""

    directory: Path
    files: tuple[Path, ...]
    format_version: str = "leafbench-report-v1"


def round_int(x: float) -> int:
    """Round half away from zero (display rule for per-corruption CE)."""
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


def fmt1(x: float, comma: bool = False) -> str:
    s = f"{x:.1f}"
    return s.replace(".", ",") if comma else s


def fmt4(x: float, comma: bool = False) -> str:
    s = f"{x:.4f}"
    return s.replace(".", ",") if comma else s


def model_columns(summary: RobustnessSummary) -> list[str]:
    """Reference first, then the rest by clean error descending (name-tied)."""
    rest = [m for m in summary.models if m != summary.reference_model]
    rest.sort(key=lambda m: (-summary.clean_error[m], m))
    return [summary.reference_model] + rest


def _grouped_rows(summary: RobustnessSummary) -> list[tuple[str, str]]:
    rows = []
    for group, kinds in TABLE_GROUPS:
        for kind in kinds:
            if kind in summary.corruptions:
                rows.append((group, kind))
    return rows


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _emit_ce_like_table(summary: RobustnessSummary, out_dir: Path, stem: str,
                        per_corruption: dict[str, dict[str, float]],
                        mean_label: str, means: dict[str, float],
                        comma_decimals: bool, annotate_anomalies: bool) -> list[Path]:
    models = model_columns(summary)
    rows = _grouped_rows(summary)
    flagged = {a["corruption"] for a in summary.anomalies} if annotate_anomalies else set()

    csv_path = out_dir / f"{stem}.csv"
    with csv_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "group"] + models + ["flags"])
        writer.writerow(["Error", ""]
                        + [fmt1(100.0 * summary.clean_error[m], comma_decimals) for m in models]
                        + [""])
        writer.writerow([mean_label, ""]
                        + [fmt1(means[m], comma_decimals) for m in models] + [""])
        for group, kind in rows:
            writer.writerow(
                [DISPLAY_NAMES[kind], group]
                + [str(round_int(per_corruption[m][kind])) for m in models]
                + ["anomalous-reference" if kind in flagged else ""]
            )

    json_path = out_dir / f"{stem}.json"
    _write_json(json_path, {
        "format": "leafbench-report-v1",
        "models": models,
        "error": {m: fmt1(100.0 * summary.clean_error[m]) for m in models},
        mean_label.lower().replace(". ", "_"): {m: fmt1(means[m]) for m in models},
        "rows": [
            {
                "corruption": kind,
                "group": group,
                "values": {m: round_int(per_corruption[m][kind]) for m in models},
                "flags": ["anomalous-reference"] if kind in flagged else [],
            }
            for group, kind in rows
        ],
    })
    return [csv_path, json_path]


def emit_mce_table(summary: RobustnessSummary, out_dir: Path | str,
                   comma_decimals: bool = False) -> list[Path]:
    """Clean error, mCE, and per-corruption CE (models as columns)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return _emit_ce_like_table(summary, out_dir, "mce_table", summary.ce,
                               "mCE", summary.mce, comma_decimals, False)


def emit_relative_table(summary: RobustnessSummary, out_dir: Path | str,
                        comma_decimals: bool = False) -> list[Path]:
    """Relative variant of the mCE table; anomalous reference rows are flagged."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return _emit_ce_like_table(summary, out_dir, "relative_table", summary.relative_ce,
                               "Rel. mCE", summary.relative_mce, comma_decimals, True)


def emit_ranking(summary: RobustnessSummary, model: str, out_dir: Path | str,
                 comma_decimals: bool = False) -> Path:
    """Least-to-most damaging corruption ranking for one model."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"ranking_{model}.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rank", "corruption", "mean_macro_f1"])
        for rank, corruption, score in rank_corruptions(summary, model):
            writer.writerow([rank, DISPLAY_NAMES[corruption], fmt4(score, comma_decimals)])
    return path


# ---------------------------------------------------------------------------
# Curves and pareto (JSON + minimal static SVG)
# ---------------------------------------------------------------------------


def _svg_header(width: int, height: int, title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<title>{title}</title>',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]


def _f1_series(summary: RobustnessSummary, model: str, corruption: str) -> list[tuple[int, float]]:
    return [(s, summary.f1[(model, corruption, s)]) for s in summary.severities]


def _curves_svg(summary: RobustnessSummary, model: str) -> str:
    width, height = 760, 420
    left, right, top, bottom = 52, 180, 28, 40
    plot_w, plot_h = width - left - right, height - top - bottom
    sevs = summary.severities

    def sx(s: int) -> float:
        return left + plot_w * (s - sevs[0]) / max(1, sevs[-1] - sevs[0])

    def sy(v: float) -> float:
        return top + plot_h * (1.0 - v)

    parts = _svg_header(width, height, f"macro-F1 vs severity: {model}")
    parts.append(f'<text x="{left}" y="16" font-size="13">{model}: macro-F1 by corruption severity</text>')
    # axes and gridlines
    for i in range(6):
        v = i / 5.0
        y = sy(v)
        parts.append(f'<line x1="{left}" y1="{y:.2f}" x2="{left + plot_w}" y2="{y:.2f}" stroke="#ddd"/>')
        parts.append(f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end">{v:.1f}</text>')
    for s in sevs:
        x = sx(s)
        parts.append(f'<line x1="{x:.2f}" y1="{top}" x2="{x:.2f}" y2="{top + plot_h}" stroke="#eee"/>')
        parts.append(f'<text x="{x:.2f}" y="{top + plot_h + 16}" text-anchor="middle">{s}</text>')
    parts.append(f'<text x="{left + plot_w / 2:.2f}" y="{height - 8}" text-anchor="middle">severity</text>')
    for idx, corruption in enumerate(summary.corruptions):
        hue = _PALETTE_HUES[idx % len(_PALETTE_HUES)]
        color = f"hsl({hue},62%,42%)"
        pts = " ".join(f"{sx(s):.2f},{sy(v):.2f}" for s, v in _f1_series(summary, model, corruption))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.6"/>')
        ly = top + 14 * idx
        lx = left + plot_w + 12
        parts.append(f'<line x1="{lx}" y1="{ly + 4}" x2="{lx + 14}" y2="{ly + 4}" '
                     f'stroke="{color}" stroke-width="3"/>')
        parts.append(f'<text x="{lx + 18}" y="{ly + 8}">{DISPLAY_NAMES[corruption]}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_curves(summary: RobustnessSummary, out_dir: Path | str) -> list[Path]:
    """Per-(model, corruption) macro-F1 series plus one SVG chart per model."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    series = [
        {
            "model": model,
            "corruption": corruption,
            "points": [[s, summary.f1[(model, corruption, s)]] for s in summary.severities],
        }
        for model in model_columns(summary)
        for corruption in summary.corruptions
    ]
    paths = [out_dir / "curves.json"]
    _write_json(paths[0], {"format": "leafbench-report-v1", "series": series})
    for model in model_columns(summary):
        p = out_dir / f"curves_{model}.svg"
        p.write_text(_curves_svg(summary, model), encoding="utf-8")
        paths.append(p)
    return paths


def _pareto_svg(points: list[dict]) -> str:
    width, height = 640, 420
    left, right, top, bottom = 60, 24, 28, 44
    plot_w, plot_h = width - left - right, height - top - bottom
    ys = [p["mce"] for p in points] + [p["relative_mce"] for p in points]
    y_max = max(100.0, max(ys)) * 1.08

    def sx(acc: float) -> float:
        return left + plot_w * acc / 100.0

    def sy(v: float) -> float:
        return top + plot_h * (1.0 - v / y_max)

    parts = _svg_header(width, height, "clean accuracy vs corruption error")
    parts.append(f'<text x="{left}" y="16" font-size="13">clean accuracy vs mCE (blue) / relative mCE (orange)</text>')
    for i in range(6):
        acc = 100.0 * i / 5.0
        x = sx(acc)
        parts.append(f'<line x1="{x:.2f}" y1="{top}" x2="{x:.2f}" y2="{top + plot_h}" stroke="#eee"/>')
        parts.append(f'<text x="{x:.2f}" y="{top + plot_h + 16}" text-anchor="middle">{acc:.0f}</text>')
        v = y_max * i / 5.0
        y = sy(v)
        parts.append(f'<line x1="{left}" y1="{y:.2f}" x2="{left + plot_w}" y2="{y:.2f}" stroke="#ddd"/>')
        parts.append(f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end">{v:.0f}</text>')
    parts.append(f'<text x="{left + plot_w / 2:.2f}" y="{height - 8}" text-anchor="middle">clean accuracy (%)</text>')
    for p in points:
        x = sx(p["clean_accuracy"])
        parts.append(f'<circle cx="{x:.2f}" cy="{sy(p["mce"]):.2f}" r="5" fill="hsl(214,70%,45%)"/>')
        parts.append(f'<circle cx="{x:.2f}" cy="{sy(p["relative_mce"]):.2f}" r="5" fill="hsl(28,90%,50%)"/>')
        parts.append(f'<text x="{x + 7:.2f}" y="{sy(p["mce"]) - 7:.2f}">{p["model"]}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_pareto(summary: RobustnessSummary, out_dir: Path | str) -> list[Path]:
    """(clean accuracy %, mCE, relative mCE) per model, as JSON and a scatter."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    points = [
        {
            "model": model,
            "clean_accuracy": 100.0 * (1.0 - summary.clean_error[model]),
            "mce": summary.mce[model],
            "relative_mce": summary.relative_mce[model],
        }
        for model in model_columns(summary)
    ]
    json_path = out_dir / "pareto.json"
    _write_json(json_path, {"format": "leafbench-report-v1", "points": points})
    svg_path = out_dir / "pareto.svg"
    svg_path.write_text(_pareto_svg(points), encoding="utf-8")
    return [json_path, svg_path]


def emit_all(summary: RobustnessSummary, out_dir: Path | str,
             comma_decimals: bool = False) -> ReportBundle:
    """Write the full report bundle (tables, rankings, curves, pareto)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files: list[Path] = []
    files += emit_mce_table(summary, out_dir, comma_decimals)
    files += emit_relative_table(summary, out_dir, comma_decimals)
    for model in model_columns(summary):
        files.append(emit_ranking(summary, model, out_dir, comma_decimals))
    files += emit_curves(summary, out_dir)
    files += emit_pareto(summary, out_dir)
    return ReportBundle(directory=out_dir, files=tuple(files))
