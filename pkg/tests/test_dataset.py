import json
from pathlib import Path

import numpy as np
import pytest

from leafbench import codecs
from leafbench.corruptions import CorruptionSpec, apply_corruption
from leafbench.dataset import (
    DatasetError,
    DatasetManifest,
    build_corrupted_dataset,
    derive_seed,
    scan_dataset,
)
from leafbench.image import make_rng, quantize
from leafbench.synth import make_toy_dataset


@pytest.fixture()
def toy_root(tmp_path):
    return make_toy_dataset(tmp_path / "clean", per_class=3, size=32, seed=7)


def tree_digest(root: Path) -> dict[str, bytes]:
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file() and p.name != "manifest.json"
    }


class TestScan:
    def test_toy_layout(self, toy_root):
        layout = scan_dataset(toy_root)
        assert layout.classes == ("healthy", "spotted")
        assert layout.file_count == 6
        assert all(f.endswith(".png") for f in layout.files)
        assert list(layout.files) == sorted(layout.files)

    def test_empty_root_errors(self, tmp_path):
        empty = tmp_path / "nothing"
        empty.mkdir()
        with pytest.raises(DatasetError, match="no classes found"):
            scan_dataset(empty)

    def test_non_image_files_skipped(self, toy_root):
        (toy_root / "healthy" / "notes.txt").write_text("hi")
        layout = scan_dataset(toy_root)
        assert layout.file_count == 6
        assert layout.skipped == ("healthy/notes.txt",)

    def test_duplicate_stem_rejected(self, toy_root):
        img = codecs.decode_image(toy_root / "healthy" / "healthy_000.png")
        codecs.save_jpeg(img, toy_root / "healthy" / "healthy_000.jpg", 90)
        with pytest.raises(DatasetError, match="duplicate image stem"):
            scan_dataset(toy_root)

    def test_missing_root(self, tmp_path):
        with pytest.raises(DatasetError, match="not a directory"):
            scan_dataset(tmp_path / "absent")


class TestDeriveSeed:
    def test_stable(self):
        a = derive_seed(42, "cls/img.png", "fog", 3)
        assert a == derive_seed(42, "cls/img.png", "fog", 3)
        assert 0 <= a < 2**64

    def test_severity_changes_seed(self):
        assert derive_seed(42, "a/b.png", "fog", 1) != derive_seed(42, "a/b.png", "fog", 2)

    def test_kind_and_path_and_seed_change_seed(self):
        base = derive_seed(42, "a/b.png", "fog", 1)
        assert derive_seed(42, "a/b.png", "snow", 1) != base
        assert derive_seed(42, "a/c.png", "fog", 1) != base
        assert derive_seed(43, "a/b.png", "fog", 1) != base

    def test_path_separator_normalized(self):
        assert derive_seed(1, "a\\b.png", "fog", 2) == derive_seed(1, "a/b.png", "fog", 2)

    def test_no_collisions_at_scale(self):
        # full-build-shaped spot check: 400 paths x 19 kinds x 5 severities
        kinds = ("fog", "snow", "jpeg", "glass_blur", "gaussian_noise", "contrast",
                 "frost", "spatter", "elastic", "pixelate", "saturate", "zoom_blur",
                 "motion_blur", "defocus_blur", "gaussian_blur", "shot_noise",
                 "impulse_noise", "speckle_noise", "brightness")
        seeds = {
            derive_seed(5, f"c{i % 8}/img_{i}.png", kind, sev)
            for i in range(400) for kind in kinds for sev in range(1, 6)
        }
        assert len(seeds) == 400 * 19 * 5


class TestBuild:
    def test_single_subset_counts(self, toy_root, tmp_path):
        layout = scan_dataset(toy_root)
        manifest = build_corrupted_dataset(layout, tmp_path / "c", kinds=("fog",),
                                           severities=(3,), global_seed=11)
        assert len(manifest.subsets) == 1
        assert manifest.subsets[0] == {"kind": "fog", "severity": 3, "files": 6}
        built = sorted((tmp_path / "c" / "fog" / "3").rglob("*.png"))
        assert len(built) == 6

    def test_structure_preserved(self, toy_root, tmp_path):
        layout = scan_dataset(toy_root)
        build_corrupted_dataset(layout, tmp_path / "c", kinds=("fog", "jpeg"),
                                severities=(1, 5), global_seed=11)
        clean_stems = {f"{Path(f).parent.name}/{Path(f).stem}" for f in layout.files}
        for kind in ("fog", "jpeg"):
            for sev in (1, 5):
                subset = tmp_path / "c" / kind / str(sev)
                stems = {f"{p.parent.name}/{p.stem}" for p in subset.rglob("*") if p.is_file()}
                assert stems == clean_stems

    def test_jpeg_subset_stored_as_jpeg_and_reproduces_corruption(
            self, toy_root, tmp_path, table):
        layout = scan_dataset(toy_root)
        build_corrupted_dataset(layout, tmp_path / "c", kinds=("jpeg",),
                                severities=(2,), global_seed=3, table=table)
        rel = layout.files[0]
        stem = Path(rel).stem
        stored = tmp_path / "c" / "jpeg" / "2" / rel.split("/")[0] / f"{stem}.jpg"
        assert stored.suffix == ".jpg"
        clean = codecs.decode_image(layout.root / rel)
        spec = CorruptionSpec.from_table(table, "jpeg", 2)
        expected = apply_corruption(clean, spec, make_rng(0))
        np.testing.assert_array_equal(quantize(codecs.decode_image(stored)),
                                      quantize(expected))

    def test_rerun_is_byte_identical(self, toy_root, tmp_path):
        layout = scan_dataset(toy_root)
        build_corrupted_dataset(layout, tmp_path / "a", kinds=("glass_blur", "snow"),
                                severities=(2,), global_seed=9)
        build_corrupted_dataset(layout, tmp_path / "b", kinds=("glass_blur", "snow"),
                                severities=(2,), global_seed=9)
        assert tree_digest(tmp_path / "a") == tree_digest(tmp_path / "b")

    def test_worker_count_does_not_change_bytes(self, toy_root, tmp_path):
        layout = scan_dataset(toy_root)
        build_corrupted_dataset(layout, tmp_path / "w1", kinds=("frost", "elastic"),
                                severities=(1, 4), global_seed=21, workers=1)
        build_corrupted_dataset(layout, tmp_path / "w3", kinds=("frost", "elastic"),
                                severities=(1, 4), global_seed=21, workers=3)
        assert tree_digest(tmp_path / "w1") == tree_digest(tmp_path / "w3")

    def test_manifest_round_trip_and_fields(self, toy_root, tmp_path, table):
        layout = scan_dataset(toy_root)
        manifest = build_corrupted_dataset(layout, tmp_path / "c", kinds=("fog",),
                                           severities=(1, 2), global_seed=2)
        loaded = DatasetManifest.from_json((tmp_path / "c" / "manifest.json").read_text())
        assert loaded.global_seed == 2
        assert loaded.severity_table_hash == table.content_hash
        assert loaded.seed_rule == "blake2b64/v1"
        assert loaded.clean_file_count == 6
        assert loaded.classes == ["healthy", "spotted"]
        assert not loaded.partial
        # timestamps differ across runs but everything else matches
        manifest.started_utc = loaded.started_utc = ""
        manifest.finished_utc = loaded.finished_utc = ""
        assert manifest.to_json() == loaded.to_json()

    def test_undecodable_image_recorded_and_skipped(self, toy_root, tmp_path):
        bad = toy_root / "healthy" / "broken.png"
        bad.write_bytes(b"this is not a png")
        layout = scan_dataset(toy_root)
        manifest = build_corrupted_dataset(layout, tmp_path / "c", kinds=("fog",),
                                           severities=(1,), global_seed=2)
        assert manifest.subsets[0]["files"] == 6
        reasons = {s["path"]: s["reason"] for s in manifest.skipped}
        assert "healthy/broken.png" in reasons
        assert "decode failed" in reasons["healthy/broken.png"]

    def test_bad_selection_rejected(self, toy_root, tmp_path):
        layout = scan_dataset(toy_root)
        with pytest.raises(ValueError):
            build_corrupted_dataset(layout, tmp_path / "c", kinds=("vignette",))
        with pytest.raises(ValueError):
            build_corrupted_dataset(layout, tmp_path / "c", severities=(0, 1))
        with pytest.raises(ValueError):
            build_corrupted_dataset(layout, tmp_path / "c", kinds=())


def test_manifest_subset_math(toy_root, tmp_path):
    layout = scan_dataset(toy_root)
    kinds = ("fog", "frost")
    severities = (1, 5)
    manifest = build_corrupted_dataset(layout, tmp_path / "c", kinds=kinds,
                                       severities=severities, global_seed=1)
    assert len(manifest.subsets) == len(kinds) * len(severities)
    doc = json.loads(manifest.to_json())
    assert doc["format"] == "leafbench-manifest-v1"
