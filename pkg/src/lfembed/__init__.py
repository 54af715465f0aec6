"""Bi-Lipschitz embeddings of locally finite metric spaces into a sup-sum of
finite-dimensional l-infinity blocks, with exact distortion certificates."""

from .analysis import (
    CaseLedger,
    DistortionReport,
    ModuliProfile,
    certify_cases,
    distortion,
    envelope_check,
    frechet_isometry_defect,
    map_distortion,
    moduli,
)
from .blocks import BlockOperator, BlockVector, make_operators, partial_sum, project
from .frechet import CoordVector, kuratowski, phi
from .generators import generate
from .glue import (
    Embedding,
    ShellAssignment,
    assign_shells,
    boundary_consistency_check,
    build_embedding,
    embed,
    evaluate,
    pairwise_image_distance,
)
from .metric import (
    AmalgamSpace,
    GeometryProfile,
    GrowableSpace,
    MetricSpace,
    amalgamate,
    ball,
    from_graph,
    geometry_profile,
    rescale_to_unit_gap,
    validate,
)

__version__ = "0.1.0"
