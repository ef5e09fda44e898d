"""vghier: hierarchical perceptual grouping of vector graphic primitives.

Parse an SVG subset into atomic paths, score pairwise grouping affinities
(learned location encoder, heuristic, or ground-truth oracle), build grouping
hierarchies by recursive greedy merging (optionally containment-guided), and
evaluate them with constrained tree edit distance, Fowlkes-Mallows index, and
node overlap.
"""

from .affinity import (
    EMBED_DIM,
    AffinityModel,
    EmbeddingAffinityModel,
    EmbeddingTable,
    HeuristicAffinity,
    LocationModel,
    OracleAffinity,
    Triplet,
    cosine_affinity,
    embed,
    export_model,
    heuristic_affinity,
    import_embeddings,
    import_model,
    infonce_loss,
    oracle_affinity,
    sample_triplet,
    subset_key,
    triplet_batch_loss,
)
from .augment import (
    AugmentConfig,
    augment_sample,
    combine,
    jitter_hsv,
    jitter_stroke_opacity,
    make_augmenter,
    no_fill,
    rotate,
    shift_hsv,
)
from .corpus import CorpusEntry, CorpusIndex, load_dataset, write_entry
from .doc import (
    Color,
    NormBox,
    PathElement,
    VectorDocument,
    doc_from_json,
    doc_to_json,
    normalize_bbox,
)
from .errors import (
    EmptyDocument,
    EmptyGroup,
    EmptyScribble,
    EmptySubset,
    FormatError,
    InvalidSpec,
    LeafSetMismatch,
    MalformedInput,
    ModelFormatError,
    NonFiniteLoss,
    SamplingExhausted,
    SubsetNotNested,
    TreeParseError,
    TreeValidationError,
    UnknownNode,
    UnknownSubset,
    VghierError,
)
from .estimator import HierarchicalGrouper
from .infer import (
    ContainmentGraph,
    containment_graph,
    containment_guided_tree,
    greedy_tree,
    path_contains,
    points_in_polygon,
    polygon_area,
    scribble_suggest,
)
from .metrics import cted, depth_cut, fmi, iou, mean_node_overlap, node_overlap
from .parse import (
    ParseWarning,
    document_to_svg,
    flatten_curve,
    parse_color,
    parse_document,
    parse_path_data,
    parse_transform,
)
from .synth import MOTIF_NAMES, SynthResult, SynthSpec, synth_generate, synth_generate_full
from .train import Adam, TrainConfig, TrainResult, train
from .tree import GroupTree, random_tree, validate

__version__ = "0.1.0"

__all__ = [
    "EMBED_DIM",
    "MOTIF_NAMES",
    "Adam",
    "AffinityModel",
    "AugmentConfig",
    "Color",
    "ContainmentGraph",
    "CorpusEntry",
    "CorpusIndex",
    "EmbeddingAffinityModel",
    "EmbeddingTable",
    "EmptyDocument",
    "EmptyGroup",
    "EmptyScribble",
    "EmptySubset",
    "FormatError",
    "GroupTree",
    "HeuristicAffinity",
    "HierarchicalGrouper",
    "InvalidSpec",
    "LeafSetMismatch",
    "LocationModel",
    "MalformedInput",
    "ModelFormatError",
    "NonFiniteLoss",
    "NormBox",
    "OracleAffinity",
    "ParseWarning",
    "PathElement",
    "SamplingExhausted",
    "SubsetNotNested",
    "SynthResult",
    "SynthSpec",
    "TrainConfig",
    "TrainResult",
    "TreeParseError",
    "TreeValidationError",
    "Triplet",
    "UnknownNode",
    "UnknownSubset",
    "VectorDocument",
    "VghierError",
    "augment_sample",
    "combine",
    "containment_graph",
    "containment_guided_tree",
    "cosine_affinity",
    "cted",
    "depth_cut",
    "doc_from_json",
    "doc_to_json",
    "document_to_svg",
    "embed",
    "export_model",
    "flatten_curve",
    "fmi",
    "greedy_tree",
    "heuristic_affinity",
    "import_embeddings",
    "import_model",
    "infonce_loss",
    "iou",
    "jitter_hsv",
    "jitter_stroke_opacity",
    "load_dataset",
    "make_augmenter",
    "mean_node_overlap",
    "no_fill",
    "node_overlap",
    "normalize_bbox",
    "oracle_affinity",
    "parse_color",
    "parse_document",
    "parse_path_data",
    "parse_transform",
    "path_contains",
    "points_in_polygon",
    "polygon_area",
    "random_tree",
    "rotate",
    "sample_triplet",
    "scribble_suggest",
    "shift_hsv",
    "subset_key",
    "synth_generate",
    "synth_generate_full",
    "train",
    "triplet_batch_loss",
    "validate",
    "write_entry",
]
