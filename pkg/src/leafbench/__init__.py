"""leafbench: corruption-robustness benchmarking for leaf-image classifiers.

Synthesizes 19 corruption types at 5 severities over a class-per-folder
image dataset, then scores classifier prediction logs with corruption
error (CE), relative CE, mCE, relative mCE, and macro-F1, emitting the
tables, rankings, and plot data a robustness study needs.
"""

__version__ = "0.1.0"

from .corruptions import (  # noqa: F401
    BLUR_KINDS,
    DETERMINISTIC_KINDS,
    DIGITAL_KINDS,
    NOISE_KINDS,
    PHOTOMETRIC_KINDS,
    WEATHER_KINDS,
    CorruptionSpec,
    apply_corruption,
)
from .dataset import (  # noqa: F401
    DatasetLayout,
    DatasetManifest,
    build_corrupted_dataset,
    derive_seed,
    scan_dataset,
)
from .image import make_rng  # noqa: F401
from .severity import CORRUPTION_KINDS, SEVERITIES, SeverityTable, load_severity_table  # noqa: F401
