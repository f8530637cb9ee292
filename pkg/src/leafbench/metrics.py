"""Robustness metrics over classifier prediction logs.

Ingests per-image prediction records and computes, per model: the clean
top-1 error, per-corruption Corruption Error (severity-summed error
normalized by a reference model, x100), relative Corruption Error
(severity-summed degradation over clean, normalized the same way), their
means over corruptions (mCE, relative mCE), and per-cell macro-F1.

The reference model's CE and relative CE are identically 100, so lower
values mean "more robust than the reference".
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .severity import CORRUPTION_KINDS, SEVERITIES

CLEAN = "clean"
SPLITS = ("train", "val", "test", "all")
LOG_HEADER = ("model", "split", "corruption", "severity",
              "image_id", "true_label", "predicted_label")


class LogValidationError(ValueError):
    """A prediction log row violates the schema (message names file:line)."""


class MissingCellError(Exception):
    """The error surface has holes; `cells` lists the absent triples."""

    def __init__(self, cells: list[tuple]):
        self.cells = cells
        shown = ", ".join(map(str, cells[:8]))
        more = "" if len(cells) <= 8 else f" (+{len(cells) - 8} more)"
        super().__init__(f"missing cells: {shown}{more}")


class DegenerateReferenceError(Exception):
    """The reference model's normalizer is zero for some corruption."""


@dataclass(frozen=True, slots=True)
class PredictionRecord:
    model: str
    split: str
    corruption: str
    severity: int
    image_id: str
    true_label: str
    predicted_label: str


def _canonical_corruption_order(present: Iterable[str]) -> tuple[str, ...]:
    present = set(present)
    return tuple(k for k in CORRUPTION_KINDS if k in present)


# ---------------------------------------------------------------------------
# Log loading
# ---------------------------------------------------------------------------


def load_logs(paths: Sequence[Path | str],
              class_set: Sequence[str] | None = None) -> list[PredictionRecord]:
    """Parse and validate prediction-log CSVs.

    When `class_set` is omitted it is inferred as the sorted set of true
    labels across all files; predicted labels must stay inside it either
    way.  Duplicate (model, corruption, severity, image_id) keys and any
    schema violation raise :class:`LogValidationError` naming file and line.
    """
    rows: list[tuple[str, int, list[str]]] = []
    for path in paths:
        path = Path(path)
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise LogValidationError(f"{path}: no records (empty file)")
            if tuple(h.strip() for h in header) != LOG_HEADER:
                raise LogValidationError(
                    f"{path}:1: bad header {header!r}, expected {','.join(LOG_HEADER)}"
                )
            for lineno, row in enumerate(reader, start=2):
                if not row or (len(row) == 1 and not row[0].strip()):
                    continue
                if len(row) != len(LOG_HEADER):
                    raise LogValidationError(
                        f"{path}:{lineno}: expected {len(LOG_HEADER)} fields, got {len(row)}"
                    )
                rows.append((str(path), lineno, [f.strip() for f in row]))
    if not rows:
        raise LogValidationError("no records found in any input file")

    if class_set is None:
        classes = sorted({r[2][5] for r in rows})
    else:
        classes = sorted(class_set)
    class_lookup = set(classes)

    records: list[PredictionRecord] = []
    seen: set[tuple[str, str, int, str]] = set()
    for fname, lineno, row in rows:
        model, split, corruption, severity_s, image_id, true_label, predicted = row
        where = f"{fname}:{lineno}"
        if not model:
            raise LogValidationError(f"{where}: empty model name")
        if split not in SPLITS:
            raise LogValidationError(f"{where}: unknown split {split!r}")
        if corruption != CLEAN and corruption not in CORRUPTION_KINDS:
            raise LogValidationError(f"{where}: unknown corruption {corruption!r}")
        try:
            severity = int(severity_s)
        except ValueError:
            raise LogValidationError(f"{where}: malformed severity {severity_s!r}") from None
        if corruption == CLEAN and severity != 0:
            raise LogValidationError(f"{where}: clean rows must have severity 0, got {severity}")
        if corruption != CLEAN and severity not in SEVERITIES:
            raise LogValidationError(
                f"{where}: severity must be 1..5 for corruption rows, got {severity}"
            )
        if true_label not in class_lookup:
            raise LogValidationError(f"{where}: unknown true_label {true_label!r}")
        if predicted not in class_lookup:
            raise LogValidationError(f"{where}: unknown predicted_label {predicted!r}")
        key = (model, corruption, severity, image_id)
        if key in seen:
            raise LogValidationError(f"{where}: duplicate key {key}")
        seen.add(key)
        records.append(PredictionRecord(model, split, corruption, severity,
                                        image_id, true_label, predicted))
    return records


def class_set_of(records: Iterable[PredictionRecord]) -> tuple[str, ...]:
    return tuple(sorted({r.true_label for r in records}))


# ---------------------------------------------------------------------------
# Cell metrics
# ---------------------------------------------------------------------------


def top1_error(records: Sequence[PredictionRecord]) -> float:
    """Fraction of records whose prediction differs from the truth."""
    if not records:
        raise MissingCellError([("<empty slice>",)])
    wrong = sum(1 for r in records if r.predicted_label != r.true_label)
    return wrong / len(records)


def macro_f1(records: Sequence[PredictionRecord], class_set: Sequence[str]) -> float:
    """Unweighted mean over `class_set` of per-class F1 = 2PR/(P+R).

    Classes with no predictions and no support contribute F1 = 0, which
    keeps the denominator fixed across cells.
    """
    if not records:
        raise MissingCellError([("<empty slice>",)])
    tp: dict[str, int] = {c: 0 for c in class_set}
    fp: dict[str, int] = {c: 0 for c in class_set}
    fn: dict[str, int] = {c: 0 for c in class_set}
    for r in records:
        if r.predicted_label == r.true_label:
            tp[r.true_label] += 1
        else:
            fp[r.predicted_label] += 1
            fn[r.true_label] += 1
    total = 0.0
    for c in class_set:
        p_den = tp[c] + fp[c]
        r_den = tp[c] + fn[c]
        precision = tp[c] / p_den if p_den else 0.0
        recall = tp[c] / r_den if r_den else 0.0
        total += 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return total / len(class_set)


def corruption_error(errors_f: Sequence[float], errors_ref: Sequence[float],
                     corruption: str = "") -> float:
    """100 x (severity-summed model error) / (severity-summed reference error)."""
    if len(errors_f) != len(errors_ref) or not errors_f:
        raise ValueError("errors_f and errors_ref must be equal-length and non-empty")
    denom = float(sum(errors_ref))
    if denom <= 0.0:
        raise DegenerateReferenceError(
            f"reference error sum is {denom} for corruption {corruption or '<unnamed>'}"
        )
    return 100.0 * float(sum(errors_f)) / denom


def relative_corruption_error(errors_f: Sequence[float], clean_f: float,
                              errors_ref: Sequence[float], clean_ref: float,
                              corruption: str = "") -> float:
    """100 x summed degradation over clean, normalized by the reference's.

    A negative reference degradation (the reference improving under the
    corruption) yields a flagged result: the value is still computed and a
    RuntimeWarning is emitted.
    """
    if len(errors_f) != len(errors_ref) or not errors_f:
        raise ValueError("errors_f and errors_ref must be equal-length and non-empty")
    denom = float(sum(e - clean_ref for e in errors_ref))
    if denom == 0.0:
        raise DegenerateReferenceError(
            f"reference degradation sum is zero for corruption {corruption or '<unnamed>'}"
        )
    if denom < 0.0:
        warnings.warn(
            f"reference degradation is negative for corruption {corruption or '<unnamed>'}; "
            "relative CE is anomalous", RuntimeWarning, stacklevel=2,
        )
    return 100.0 * float(sum(e - clean_f for e in errors_f)) / denom


# ---------------------------------------------------------------------------
# Error surface and summary
# ---------------------------------------------------------------------------


@dataclass
class ErrorSurface:
    """Top-1 error and macro-F1 per (model, corruption, severity) cell."""

    models: tuple[str, ...]
    corruptions: tuple[str, ...]
    severities: tuple[int, ...]
    class_set: tuple[str, ...]
    errors: dict[tuple[str, str, int], float]
    clean_errors: dict[str, float]
    f1: dict[tuple[str, str, int], float]
    clean_f1: dict[str, float]

    def missing_cells(self) -> list[tuple]:
        gaps: list[tuple] = []
        for m in self.models:
            if m not in self.clean_errors:
                gaps.append((m, CLEAN, 0))
            for c in self.corruptions:
                for s in self.severities:
                    if (m, c, s) not in self.errors:
                        gaps.append((m, c, s))
        return gaps


def build_surface(records: Sequence[PredictionRecord],
                  corruptions: Sequence[str] | None = None,
                  severities: Sequence[int] = SEVERITIES,
                  class_set: Sequence[str] | None = None,
                  split: str = "all") -> ErrorSurface:
    """Aggregate records into per-cell error rates and macro-F1.

    `split="all"` keeps every record; any other value filters on the
    record's split column.  The declared corruption grid defaults to the
    corruptions present, in canonical order.
    """
    if split != "all":
        records = [r for r in records if r.split == split]
    if not records:
        raise MissingCellError([("<no records after split filter>",)])
    classes = tuple(sorted(class_set)) if class_set else class_set_of(records)
    models = tuple(sorted({r.model for r in records}))
    if corruptions is None:
        present = {r.corruption for r in records if r.corruption != CLEAN}
        corruptions = _canonical_corruption_order(present)
    else:
        corruptions = tuple(corruptions)
    severities = tuple(int(s) for s in severities)

    cells: dict[tuple[str, str, int], list[PredictionRecord]] = {}
    for r in records:
        cells.setdefault((r.model, r.corruption, r.severity), []).append(r)

    errors: dict[tuple[str, str, int], float] = {}
    f1: dict[tuple[str, str, int], float] = {}
    clean_errors: dict[str, float] = {}
    clean_f1: dict[str, float] = {}
    for key, recs in cells.items():
        model, corruption, severity = key
        err = top1_error(recs)
        score = macro_f1(recs, classes)
        if corruption == CLEAN:
            clean_errors[model] = err
            clean_f1[model] = score
        else:
            errors[key] = err
            f1[key] = score
    return ErrorSurface(models=models, corruptions=corruptions, severities=severities,
                        class_set=classes, errors=errors, clean_errors=clean_errors,
                        f1=f1, clean_f1=clean_f1)


@dataclass
class RobustnessSummary:
    """Everything the report layer renders; all values unrounded."""

    reference_model: str
    models: tuple[str, ...]
    corruptions: tuple[str, ...]
    severities: tuple[int, ...]
    class_set: tuple[str, ...]
    clean_error: dict[str, float]
    ce: dict[str, dict[str, float]]
    relative_ce: dict[str, dict[str, float]]
    mce: dict[str, float]
    relative_mce: dict[str, float]
    f1: dict[tuple[str, str, int], float]
    clean_f1: dict[str, float]
    anomalies: list[dict] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        f1_nested: dict[str, dict[str, dict[str, float]]] = {}
        for (model, corruption, severity), value in sorted(self.f1.items()):
            f1_nested.setdefault(model, {}).setdefault(corruption, {})[str(severity)] = value
        return {
            "format": "leafbench-summary-v1",
            "reference_model": self.reference_model,
            "models": list(self.models),
            "corruptions": list(self.corruptions),
            "severities": list(self.severities),
            "class_set": list(self.class_set),
            "clean_error": dict(sorted(self.clean_error.items())),
            "ce": {m: dict(sorted(v.items())) for m, v in sorted(self.ce.items())},
            "relative_ce": {m: dict(sorted(v.items())) for m, v in sorted(self.relative_ce.items())},
            "mce": dict(sorted(self.mce.items())),
            "relative_mce": dict(sorted(self.relative_mce.items())),
            "macro_f1": f1_nested,
            "clean_macro_f1": dict(sorted(self.clean_f1.items())),
            "anomalies": self.anomalies,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json_dict(cls, doc: dict) -> "RobustnessSummary":
        f1: dict[tuple[str, str, int], float] = {}
        for model, per_corr in doc.get("macro_f1", {}).items():
            for corruption, per_sev in per_corr.items():
                for sev, value in per_sev.items():
                    f1[(model, corruption, int(sev))] = float(value)
        return cls(
            reference_model=doc["reference_model"],
            models=tuple(doc["models"]),
            corruptions=tuple(doc["corruptions"]),
            severities=tuple(int(s) for s in doc["severities"]),
            class_set=tuple(doc["class_set"]),
            clean_error={k: float(v) for k, v in doc["clean_error"].items()},
            ce={m: {c: float(v) for c, v in per.items()} for m, per in doc["ce"].items()},
            relative_ce={m: {c: float(v) for c, v in per.items()}
                         for m, per in doc["relative_ce"].items()},
            mce={k: float(v) for k, v in doc["mce"].items()},
            relative_mce={k: float(v) for k, v in doc["relative_mce"].items()},
            f1=f1,
            clean_f1={k: float(v) for k, v in doc["clean_macro_f1"].items()},
            anomalies=list(doc.get("anomalies", [])),
        )

    @classmethod
    def from_json(cls, text: str) -> "RobustnessSummary":
        return cls.from_json_dict(json.loads(text))


def summarize(surface: ErrorSurface, reference_model: str) -> RobustnessSummary:
    """Normalize every model's errors by the reference and average.

    The surface must be complete over the declared grid (clean included);
    holes raise :class:`MissingCellError` listing the absent triples.
    """
    if reference_model not in surface.models:
        raise ValueError(f"reference model {reference_model!r} not present in the logs")
    gaps = surface.missing_cells()
    if gaps:
        raise MissingCellError(gaps)

    anomalies: list[dict] = []
    ce: dict[str, dict[str, float]] = {m: {} for m in surface.models}
    rel: dict[str, dict[str, float]] = {m: {} for m in surface.models}
    for corruption in surface.corruptions:
        ref_errors = [surface.errors[(reference_model, corruption, s)]
                      for s in surface.severities]
        ref_clean = surface.clean_errors[reference_model]
        ref_degradation = sum(e - ref_clean for e in ref_errors)
        if ref_degradation < 0:
            anomalies.append({
                "corruption": corruption,
                "reason": "reference degradation is negative; relative CE is anomalous",
            })
        for model in surface.models:
            errs = [surface.errors[(model, corruption, s)] for s in surface.severities]
            ce[model][corruption] = corruption_error(errs, ref_errors, corruption)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                rel[model][corruption] = relative_corruption_error(
                    errs, surface.clean_errors[model], ref_errors, ref_clean, corruption
                )
    n = len(surface.corruptions)
    mce = {m: sum(ce[m].values()) / n for m in surface.models}
    relative_mce = {m: sum(rel[m].values()) / n for m in surface.models}
    return RobustnessSummary(
        reference_model=reference_model,
        models=surface.models,
        corruptions=surface.corruptions,
        severities=surface.severities,
        class_set=surface.class_set,
        clean_error=dict(surface.clean_errors),
        ce=ce,
        relative_ce=rel,
        mce=mce,
        relative_mce=relative_mce,
        f1=dict(surface.f1),
        clean_f1=dict(surface.clean_f1),
        anomalies=anomalies,
    )


def rank_corruptions(summary: RobustnessSummary, model: str) -> list[tuple[int, str, float]]:
    """Corruptions ordered least-damaging first by mean-over-severity F1.

    Ties break alphabetically on the canonical corruption name.
    """
    if model not in summary.models:
        raise ValueError(f"unknown model {model!r}")
    gaps = [
        (model, c, s)
        for c in summary.corruptions for s in summary.severities
        if (model, c, s) not in summary.f1
    ]
    if gaps:
        raise MissingCellError(gaps)
    means = {
        c: sum(summary.f1[(model, c, s)] for s in summary.severities) / len(summary.severities)
        for c in summary.corruptions
    }
    ordered = sorted(means.items(), key=lambda kv: (-kv[1], kv[0]))
    return [(rank, corruption, score) for rank, (corruption, score) in enumerate(ordered, 1)]
