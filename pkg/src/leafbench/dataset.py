"""Corrupted-dataset construction: mirror a class-per-folder tree into
one subset per (corruption, severity).

Reproducibility contract: every output image depends only on (clean file
bytes, derived seed), and seeds are derived per (global seed, relative
path, kind, severity) with a fixed named hash.  Builds are therefore
byte-identical for any worker count and across platforms.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__, codecs
from .codecs import IMAGE_SUFFIXES
from .corruptions import CorruptionSpec, apply_corruption
from .image import make_rng
from .severity import CORRUPTION_KINDS, SEVERITIES, SeverityTable, load_severity_table

SEED_RULE = "blake2b64/v1"
MANIFEST_NAME = "manifest.json"


class DatasetError(Exception):
    """A clean dataset tree violates the class-per-folder contract."""


@dataclass(frozen=True)
class DatasetLayout:
    root: Path
    classes: tuple[str, ...]
    files: tuple[str, ...]  # relative paths "class/filename", sorted
    skipped: tuple[str, ...] = ()  # non-image files found under class dirs

    @property
    def file_count(self) -> int:
        return len(self.files)


@dataclass
class DatasetManifest:
    global_seed: int
    severity_table_version: str
    severity_table_hash: str
    kinds: list[str]
    severities: list[int]
    classes: list[str]
    clean_file_count: int
    subsets: list[dict]
    skipped: list[dict]
    tool_version: str = __version__
    seed_rule: str = SEED_RULE
    resolution_policy: str = "native"
    format: str = "leafbench-manifest-v1"
    started_utc: str = ""
    finished_utc: str = ""
    partial: bool = False
    note: str = ""

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DatasetManifest":
        return cls(**json.loads(text))


def scan_dataset(root: Path | str) -> DatasetLayout:
    """Enumerate a class-per-folder image tree, sorted for determinism.

    Non-image files under class directories are skipped (and reported);
    a root with no class subdirectories or no images at all is an error.
    """
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"dataset root {root} is not a directory")
    classes = sorted(p.name for p in root.iterdir() if p.is_dir())
    if not classes:
        raise DatasetError(f"no classes found under {root}")
    files: list[str] = []
    skipped: list[str] = []
    stems: set[tuple[str, str]] = set()
    for cls in classes:
        for p in sorted((root / cls).iterdir()):
            rel = f"{cls}/{p.name}"
            if not p.is_file() or p.suffix.lower() not in IMAGE_SUFFIXES:
                skipped.append(rel)
                continue
            key = (cls, p.stem)
            if key in stems:
                raise DatasetError(
                    f"duplicate image stem {p.stem!r} in class {cls!r}; "
                    "stems must be unique because outputs are re-encoded"
                )
            stems.add(key)
            files.append(rel)
    if not files:
        raise DatasetError(f"no image files found under {root}")
    return DatasetLayout(root=root, classes=tuple(classes),
                         files=tuple(files), skipped=tuple(skipped))


def derive_seed(global_seed: int, relative_path: str, kind: str, severity: int) -> int:
    """Stable 64-bit per-work-item seed (BLAKE2b-64 over the key fields)."""
    norm = relative_path.replace("\\", "/")
    payload = f"{global_seed}|{norm}|{kind}|{severity}".encode("utf-8")
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


def _output_name(filename: str, kind: str) -> str:
    stem = Path(filename).stem
    return f"{stem}.jpg" if kind == "jpeg" else f"{stem}.png"


def corrupt_file(clean_root: Path, out_root: Path, rel_path: str,
                 kinds: tuple[str, ...], severities: tuple[int, ...],
                 global_seed: int, table: SeverityTable) -> dict:
    """Worker unit: decode one clean image, emit all its corrupted variants."""
    src = clean_root / rel_path
    try:
        img = codecs.decode_image(src)
    except Exception as exc:  # undecodable input is recorded, not fatal
        return {"path": rel_path, "error": f"decode failed: {exc}", "written": 0}
    cls, filename = rel_path.split("/", 1)
    written = 0
    for kind in kinds:
        for severity in severities:
            spec = CorruptionSpec.from_table(table, kind, severity)
            rng = make_rng(derive_seed(global_seed, rel_path, kind, severity))
            out = apply_corruption(img, spec, rng)
            dest_dir = out_root / kind / str(severity) / cls
            dest_dir.mkdir(parents=True, exist_ok=True)
            dest = dest_dir / _output_name(filename, kind)
            if kind == "jpeg":
                # single encode: decoding this file reproduces the corruption
                codecs.save_jpeg(img, dest, int(spec.params["quality"]))
            else:
                codecs.save_png(out, dest)
            written += 1
    return {"path": rel_path, "error": None, "written": written}


def _utc_stamp() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def build_corrupted_dataset(
    layout: DatasetLayout,
    out_root: Path | str,
    kinds: tuple[str, ...] = CORRUPTION_KINDS,
    severities: tuple[int, ...] = SEVERITIES,
    global_seed: int = 0,
    workers: int = 1,
    table: SeverityTable | None = None,
) -> DatasetManifest:
    """Build out_root/<kind>/<severity>/<class>/<file> for every selection.

    Raises on unknown kinds/severities; per-image decode failures are
    recorded in the manifest and skipped.  On a write failure the build
    aborts but still writes a manifest flagged partial.
    """
    out_root = Path(out_root)
    bad_kinds = sorted(set(kinds) - set(CORRUPTION_KINDS))
    if bad_kinds or not kinds:
        raise ValueError(f"kinds must be a non-empty subset of the canonical set; bad: {bad_kinds}")
    bad_sevs = sorted(set(severities) - set(SEVERITIES))
    if bad_sevs or not severities:
        raise ValueError(f"severities must be a non-empty subset of 1..5; bad: {bad_sevs}")
    table = table or load_severity_table()
    kinds = tuple(kinds)
    severities = tuple(int(s) for s in severities)
    started = _utc_stamp()
    out_root.mkdir(parents=True, exist_ok=True)

    results: list[dict] = []
    partial = False
    note = ""
    try:
        if workers <= 1:
            for rel in layout.files:
                results.append(corrupt_file(layout.root, out_root, rel,
                                            kinds, severities, global_seed, table))
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [
                    pool.submit(corrupt_file, layout.root, out_root, rel,
                                kinds, severities, global_seed, table)
                    for rel in layout.files
                ]
                results = [f.result() for f in futures]
    except OSError as exc:
        partial = True
        note = f"aborted: {exc}"

    ok = [r for r in results if r["error"] is None]
    failed = [r for r in results if r["error"] is not None]
    per_subset = len(ok)
    subsets = [
        {"kind": kind, "severity": severity, "files": per_subset}
        for kind in kinds for severity in severities
    ]
    manifest = DatasetManifest(
        global_seed=int(global_seed),
        severity_table_version=table.version,
        severity_table_hash=table.content_hash,
        kinds=list(kinds),
        severities=list(severities),
        classes=list(layout.classes),
        clean_file_count=layout.file_count,
        subsets=subsets,
        skipped=[{"path": p, "reason": "not an image"} for p in layout.skipped]
                + [{"path": r["path"], "reason": r["error"]} for r in failed],
        started_utc=started,
        finished_utc=_utc_stamp(),
        partial=partial,
        note=note,
    )
    (out_root / MANIFEST_NAME).write_text(manifest.to_json() + "\n", encoding="utf-8")
    return manifest
