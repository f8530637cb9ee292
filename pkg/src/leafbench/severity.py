"""Severity parameter table: the (kind, severity) -> parameters mapping.

The table ships as a versioned JSON file whose SHA-256 is recorded in
every dataset manifest, so a corrupted dataset is traceable to the exact
parameter set that produced it.  Each kind designates one "intensity"
parameter that must ramp monotonically with severity (sense +1 for
values that grow with intensity, -1 for values that shrink).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

CORRUPTION_KINDS = (
    "gaussian_noise", "shot_noise", "impulse_noise", "speckle_noise",
    "defocus_blur", "glass_blur", "motion_blur", "zoom_blur", "gaussian_blur",
    "snow", "frost", "fog", "brightness", "spatter",
    "contrast", "elastic", "jpeg", "pixelate", "saturate",
)

SEVERITIES = (1, 2, 3, 4, 5)


class SeverityTableError(ValueError):
    """The table file is malformed or violates its invariants."""


@dataclass(frozen=True)
class SeverityTable:
    version: str
    content_hash: str  # sha256 hex digest of the file bytes
    levels: Mapping[str, tuple[dict[str, Any], ...]]  # kind -> 5 param records

    def params(self, kind: str, severity: int) -> dict[str, Any]:
        if kind not in self.levels:
            raise KeyError(f"unknown corruption kind {kind!r}")
        if severity not in SEVERITIES:
            raise KeyError(f"severity must be in {SEVERITIES}, got {severity}")
        return dict(self.levels[kind][severity - 1])


def _validate(doc: dict[str, Any]) -> None:
    kinds = doc.get("kinds")
    if not isinstance(kinds, dict):
        raise SeverityTableError("table must have a 'kinds' mapping")
    missing = set(CORRUPTION_KINDS) - set(kinds)
    extra = set(kinds) - set(CORRUPTION_KINDS)
    if missing or extra:
        raise SeverityTableError(
            f"table must cover exactly the {len(CORRUPTION_KINDS)} canonical kinds; "
            f"missing={sorted(missing)} extra={sorted(extra)}"
        )
    for kind, entry in kinds.items():
        levels = entry.get("levels")
        if not isinstance(levels, list) or len(levels) != len(SEVERITIES):
            raise SeverityTableError(f"{kind}: needs exactly {len(SEVERITIES)} levels")
        key = entry.get("intensity_key")
        sense = entry.get("intensity_sense", 1)
        if sense not in (1, -1):
            raise SeverityTableError(f"{kind}: intensity_sense must be 1 or -1")
        try:
            ramp = [sense * float(level[key]) for level in levels]
        except (KeyError, TypeError) as exc:
            raise SeverityTableError(f"{kind}: bad intensity key {key!r}") from exc
        if any(b < a for a, b in zip(ramp, ramp[1:])):
            raise SeverityTableError(
                f"{kind}: intensity {key!r} is not monotone non-decreasing in severity"
            )


def load_severity_table(path: Path | str | None = None) -> SeverityTable:
    """Load and validate a table file; default is the bundled table."""
    if path is None:
        raw = resources.files("leafbench").joinpath("data/severity_table.json").read_bytes()
    else:
        raw = Path(path).read_bytes()
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SeverityTableError(f"severity table is not valid JSON: {exc}") from exc
    _validate(doc)
    levels = {
        kind: tuple(dict(lvl) for lvl in entry["levels"])
        for kind, entry in doc["kinds"].items()
    }
    return SeverityTable(
        version=str(doc.get("version", "unversioned")),
        content_hash=hashlib.sha256(raw).hexdigest(),
        levels=levels,
    )
