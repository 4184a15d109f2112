from entrograph.systems.base import DynamicalSystem, ExactIntervalMap, PowerSystem
from entrograph.systems.catalog import (
    SYSTEMS,
    brouwer_sphere,
    circle_rotation,
    double_arrow_north_south,
    doubling_map,
    get_system,
    north_south_interval,
    parabolic_disk,
    system_names,
    translation_line_compactified,
)
from entrograph.systems.double_arrow import ArrowPoint, semiconjugacy_projection

__all__ = [
    "ArrowPoint",
    "DynamicalSystem",
    "ExactIntervalMap",
    "PowerSystem",
    "SYSTEMS",
    "brouwer_sphere",
    "circle_rotation",
    "double_arrow_north_south",
    "doubling_map",
    "get_system",
    "north_south_interval",
    "parabolic_disk",
    "semiconjugacy_projection",
    "system_names",
    "translation_line_compactified",
]
