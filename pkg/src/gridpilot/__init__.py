"""Grid pilot watermark synchronization toolkit.

Embeds a grid-shaped ternary pilot signal into a color image, simulates
geometric attacks (anisotropic scaling, rotation, shear, composites,
cropping), and estimates the applied 2x2 transformation matrix from the
attacked image by Radon-transform analysis of the distorted grid.
"""

from .angles import AnglePair, VarianceProfile, classify_direction, find_peak_angles, variance_profile
from .attacks import (
    AttackSpec,
    AttackStep,
    CropSpec,
    apply_affine,
    apply_attack,
    crop,
    make_matrix,
    rectify,
    rotation,
    scaling,
    shear_x,
    shear_y,
)
from .errors import (
    ColorspaceError,
    ConfigError,
    DecodeError,
    DegenerateLatticeError,
    DetectionFailureError,
    DomainError,
    GridPilotError,
    ShapeError,
    UnsupportedFormatError,
)
from .imagery import (
    PlanarImage,
    decode_image,
    encode_image,
    load_image,
    psnr,
    rgb_to_yuv,
    save_image,
    yuv_to_rgb,
)
from .intervals import (
    ComponentField,
    IntervalEstimate,
    estimate_base_frequency,
    estimate_interval,
    split_fields,
)
from .matrices import (
    TransformEstimate,
    angles_to_directions,
    build_matrix,
    relative_error,
    select_best,
    twin_matrix,
)
from .metrics import TrialRecord, summarize
from .pilot import (
    PilotConfig,
    TernaryField,
    TernaryMask,
    build_mask,
    embed_pilot,
    extract_ternary_field,
)
from .pipeline import EstimatorSettings, estimate_transform, extract_synced, make_stego
from .qim import QimParams, embed_symbol, extract_symbol
from .radon import Sinogram, normalize_sinogram, radon_transform, threshold_denoise
from .watermark import WatermarkMessage, ber, embed_watermark, extract_watermark

__version__ = "0.1.0"
