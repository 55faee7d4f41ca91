"""Local binary pattern texture descriptors, histogram metrics, and
nearest-reference classification experiments.

The per-pixel kernels run on a compiled extension when it is available and
fall back to a pure numpy implementation otherwise; both produce
bit-identical label maps.
"""

from ._backend import backend_name, load_backend
from .classify import (
    ConfusionMatrix,
    ReferenceSet,
    accuracy_rate,
    confusion_matrix,
    make_reference_set,
    nearest_reference,
)
from .descriptors import (
    VARIANTS,
    LabelMap,
    VariantParams,
    compute_ci_map,
    compute_label_map,
    compute_maps,
    label_space,
    to_rotation_canonical,
)
from .errors import (
    ConfigError,
    DataError,
    DegenerateDataError,
    ImageFormatError,
    LbptexError,
    ManifestError,
)
from .harness import (
    classify_records,
    compute_feature,
    feature_vector,
    ingest_manifest,
    run_illumination_experiment,
    run_noise_experiment,
    run_radius_sweep,
    run_rotation_experiment,
)
from .histograms import (
    CIQuantizer,
    Histogram,
    build_histogram,
    concat_histogram,
    dominant_patterns,
    fit_ci_quantizer,
    joint_histogram,
)
from .imagecore import (
    GrayImage,
    NeighborhoodSpec,
    add_gaussian_noise,
    apply_monotone_map,
    neighbor_coordinates,
    read_image,
    read_pgm,
    rotate_image,
    sample_bilinear,
    write_pgm,
)
from .metrics import METRICS, kl_divergence, ordinal_distance

__version__ = "0.1.0"
