from entrograph.uniformity.base import (
    EntourageFamily,
    PointRef,
    SampledCompact,
    ball,
    check_family_axioms,
    is_small,
    separating_level,
)
from entrograph.uniformity.metric import MetricFamily, arc_distance, euclidean_distance, metric_family
from entrograph.uniformity.partition import PartitionFamily, dyadic_cuts, partition_family

__all__ = [
    "EntourageFamily",
    "MetricFamily",
    "PartitionFamily",
    "PointRef",
    "SampledCompact",
    "arc_distance",
    "ball",
    "check_family_axioms",
    "dyadic_cuts",
    "euclidean_distance",
    "is_small",
    "metric_family",
    "partition_family",
    "separating_level",
]
