"""Finite-scale ideal cluster points and ideal cores of sequences in R^k."""

__version__ = "0.1.0"

from .cluster import ClusterSet, estimate_clusters, is_cluster_point
from .core import (
    BallCore,
    ConvexCombination,
    CoreReport,
    NotInHullError,
    ball_characterization,
    caratheodory_decompose,
    choquet_measure,
    core_by_balls,
    core_by_cluster_hull,
    core_by_support,
    core_membership_by_balls,
    direction_set,
    is_ideal_convergent,
)
from .ideal import (
    FiniteIdealModel,
    IdealSpecError,
    IndexSet,
    fubini_product,
    make_double_density,
    make_density_zero,
    make_e_ideal,
    make_fin,
    make_pringsheim,
    parse_ideal,
    transpose,
)
from .limits import (
    ScalarLimitReport,
    UnboundedSequenceError,
    ideal_liminf,
    ideal_limsup,
    is_scalar_ideal_convergent,
    scalar_limits,
)
from .sequence import (
    CSVFormatError,
    SequenceSpecError,
    SequenceWindow,
    export_csv,
    generate,
    ingest_csv,
    parse_sequence_spec,
)
from .transforms import double_convergence, euler_core, euler_matrix, euler_row, euler_transform

__all__ = [
    "BallCore",
    "CSVFormatError",
    "ClusterSet",
    "ConvexCombination",
    "CoreReport",
    "FiniteIdealModel",
    "IdealSpecError",
    "IndexSet",
    "NotInHullError",
    "ScalarLimitReport",
    "SequenceSpecError",
    "SequenceWindow",
    "UnboundedSequenceError",
    "ball_characterization",
    "caratheodory_decompose",
    "choquet_measure",
    "core_by_balls",
    "core_by_cluster_hull",
    "core_by_support",
    "core_membership_by_balls",
    "direction_set",
    "double_convergence",
    "estimate_clusters",
    "euler_core",
    "euler_matrix",
    "euler_row",
    "euler_transform",
    "export_csv",
    "fubini_product",
    "generate",
    "ideal_liminf",
    "ideal_limsup",
    "ingest_csv",
    "is_cluster_point",
    "is_ideal_convergent",
    "is_scalar_ideal_convergent",
    "make_density_zero",
    "make_double_density",
    "make_e_ideal",
    "make_fin",
    "make_pringsheim",
    "parse_ideal",
    "parse_sequence_spec",
    "scalar_limits",
    "transpose",
]
