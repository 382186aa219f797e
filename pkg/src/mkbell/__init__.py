"""Classify N-qubit entanglement with Mermin-Klyshko Bell inequalities."""
from .classify import (
    AccPoints,
    BoundTable,
    ClassificationReport,
    acc_points,
    class_bound,
    classify,
    witness_class,
)
from .errors import CapacityExceeded, DegenerateState, InconsistentValue, InvalidArgument, MKBellError
from .mk import (
    TermMap,
    build_mk,
    build_mk_split,
    dense_operator,
    evaluate,
    evaluate_product_fast,
    linear_bell_max,
    quadratic_bell,
)
from .optimize import OptimizerConfig, OptimizerResult, angles_to_settings, maximize, maximize_linear
from .partitions import Partition, PartitionStats, classes, enumerate_partitions, stats
from .states import (
    Direction,
    MixedState,
    PureState,
    Settings,
    bell_phi_plus,
    block_product,
    expectation,
    ghz,
    make_pure,
    mix,
    random_pure,
    tensor,
)

__version__ = "0.1.0"
