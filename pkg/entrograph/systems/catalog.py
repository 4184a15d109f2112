import logging
from typing import Any, Dict, List, Type

from entrograph.core.errors import InvalidInputError, UnknownSystemError
from entrograph.systems.base import DynamicalSystem
from entrograph.systems.brouwer import BrouwerSphere
from entrograph.systems.circle import CircleRotation, DoublingMap
from entrograph.systems.disk import ParabolicDisk
from entrograph.systems.double_arrow import DoubleArrow, IntervalSquare
from entrograph.systems.interval import NorthSouthInterval
from entrograph.systems.line import HawaiianEarring, TranslationLine

logger = logging.getLogger(__name__)

SYSTEMS: Dict[str, Type[DynamicalSystem]] = {
    "north-south-interval": NorthSouthInterval,
    "rotation": CircleRotation,
    "doubling": DoublingMap,
    "brouwer-sphere": BrouwerSphere,
    "parabolic-disk": ParabolicDisk,
    "double-arrow": DoubleArrow,
    "translation-line": TranslationLine,
    "hawaiian-earring": HawaiianEarring,
    "interval-square": IntervalSquare,
}


def system_names() -> List[str]:
    return list(SYSTEMS)


def get_system(name: str, **params: Any) -> DynamicalSystem:
    """Instantiate a catalog system by its CLI name."""
    if name not in SYSTEMS:
        raise UnknownSystemError(f"unknown system '{name}' (known: {', '.join(SYSTEMS)})")
    try:
        system = SYSTEMS[name](**params)
    except TypeError as e:
        raise InvalidInputError(f"bad parameters for '{name}': {e}")
    logger.debug(f"built system {name} with {params or 'defaults'}")
    return system


def north_south_interval() -> NorthSouthInterval:
    return NorthSouthInterval()


def circle_rotation(alpha: Any) -> CircleRotation:
    return CircleRotation(alpha)


def doubling_map() -> DoublingMap:
    return DoublingMap()


def brouwer_sphere() -> BrouwerSphere:
    return BrouwerSphere()


def parabolic_disk() -> ParabolicDisk:
    return ParabolicDisk()


def double_arrow_north_south() -> DoubleArrow:
    return DoubleArrow()


def translation_line_compactified() -> TranslationLine:
    return TranslationLine()
