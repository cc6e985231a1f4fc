"""Vessel segmentation, centerline extraction and anomaly grading for
peripheral angiograms.

The package is organized as a pipeline over immutable raster types:

    GrayscaleImage -> prompt points -> BinaryMask -> Skeleton ->
    SkeletonGraph -> ThicknessProfile -> AnomalyFinding

Hot kernels (distance transform, thinning, labeling) run through a
compiled extension when available and fall back to pure numpy otherwise;
see ``vesselkit._kernels.KERNEL_BACKEND`` for which one is active.
"""

from ._kernels import KERNEL_BACKEND
from .analysis import AnalysisResult, analyze_image, document_bytes, image_id_for
from .anomaly import (
    AnomalyFinding,
    ExtremumPoint,
    cluster_indices,
    detect,
    extract_extremums,
    flag_and_grade,
)
from .errors import (
    BackendFailure,
    NoCandidatesError,
    SegmentOutsideFieldError,
    SegmentTooShortError,
    VesselKitError,
)
from .evaluation import (
    DatasetRecord,
    EvalReport,
    format_report_table,
    iou,
    load_dataset,
    match_anomalies,
    run_benchmark,
)
from .metrics import DistanceField, ThicknessProfile, distance_transform, thickness_profile
from .points import CandidateSet, PromptPoint, build_candidates, pick_point
from .raster import (
    BinaryMask,
    BoundingBox,
    GrayscaleImage,
    PipelineConfig,
    ProbabilityMap,
    connected_components,
    to_probability_map,
    union_masks,
)
from .segment import (
    STRATEGIES,
    PrecomputedBackend,
    RefinementResult,
    RemoteBackend,
    SegmentationBackend,
    SegmentationRequest,
    ThresholdBackend,
    clamp_to_box,
    naive_point,
    run_point_refinement,
    segment_with_strategy,
)
from .skeleton import (
    Skeleton,
    SkeletonGraph,
    SkeletonNode,
    VesselSegment,
    decompose,
    prune,
    skeletonize,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "__version__",
    "AnalysisResult",
    "analyze_image",
    "document_bytes",
    "image_id_for",
    "AnomalyFinding",
    "ExtremumPoint",
    "cluster_indices",
    "detect",
    "extract_extremums",
    "flag_and_grade",
    "BackendFailure",
    "NoCandidatesError",
    "SegmentOutsideFieldError",
    "SegmentTooShortError",
    "VesselKitError",
    "DatasetRecord",
    "EvalReport",
    "format_report_table",
    "iou",
    "load_dataset",
    "match_anomalies",
    "run_benchmark",
    "DistanceField",
    "ThicknessProfile",
    "distance_transform",
    "thickness_profile",
    "CandidateSet",
    "PromptPoint",
    "build_candidates",
    "pick_point",
    "BinaryMask",
    "BoundingBox",
    "GrayscaleImage",
    "PipelineConfig",
    "ProbabilityMap",
    "connected_components",
    "to_probability_map",
    "union_masks",
    "STRATEGIES",
    "PrecomputedBackend",
    "RefinementResult",
    "RemoteBackend",
    "SegmentationBackend",
    "SegmentationRequest",
    "ThresholdBackend",
    "clamp_to_box",
    "naive_point",
    "run_point_refinement",
    "segment_with_strategy",
    "Skeleton",
    "SkeletonGraph",
    "SkeletonNode",
    "VesselSegment",
    "decompose",
    "prune",
    "skeletonize",
]
