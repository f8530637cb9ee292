"""Apply a handful of corruptions to one image at every severity.

Writes a grid of PNGs under demo_output/corruptions/ so you can eyeball
how each corruption ramps from severity 1 to 5.
"""

from pathlib import Path

from leafbench import CorruptionSpec, apply_corruption, load_severity_table, make_rng
from leafbench.codecs import save_png
from leafbench.dataset import derive_seed
from leafbench.synth import probe_image

OUT = Path("demo_output/corruptions")
KINDS = ["gaussian_noise", "defocus_blur", "motion_blur", "fog", "frost",
         "snow", "spatter", "elastic", "jpeg", "contrast"]


def main():
    table = load_severity_table()
    img = probe_image(seed=4, size=160)
    OUT.mkdir(parents=True, exist_ok=True)
    save_png(img, OUT / "clean.png")

    for kind in KINDS:
        for severity in range(1, 6):
            spec = CorruptionSpec.from_table(table, kind, severity)
            rng = make_rng(derive_seed(0, "demo/leaf.png", kind, severity))
            out = apply_corruption(img, spec, rng)
            save_png(out, OUT / f"{kind}_s{severity}.png")
        print(f"wrote {kind} severities 1..5")

    print(f"\ndone, images under {OUT}/")


if __name__ == "__main__":
    main()
