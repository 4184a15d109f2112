"""Partition entourages on the double arrow.

A cut c in (0, 1) splits the lexicographically ordered space between (c, 0)
and (c, 1). Level k's entourage is the union of cell x cell over the cells
cut out by `cuts(k)`; it is idempotent, so it is its own square root.
Features are cell indices at the finest level; coarser levels read them
through lookup tables.
"""
import bisect
import logging
from fractions import Fraction
from typing import Any, Callable, Iterable, List

import numpy as np

from entrograph.core.errors import InvalidInputError
from entrograph.uniformity.base import EntourageFamily

logger = logging.getLogger(__name__)

CutSets = Callable[[int], Iterable[Fraction]]

# Floating comparisons closer than this (relative) to a cut are reported.
AMBIGUITY_TOLERANCE = 1e-12


def dyadic_cuts(level: int) -> List[Fraction]:
    return [Fraction(m, 2**level) for m in range(1, 2**level)]


class PartitionFamily(EntourageFamily):
    def __init__(self, cuts_per_level: CutSets, k_min: int, k_max: int):
        super().__init__(k_min, k_max)
        self.cut_sets = {k: sorted(set(Fraction(c) for c in cuts_per_level(k))) for k in self.levels}
        for k in self.levels:
            cuts = self.cut_sets[k]
            if any(not 0 < c < 1 for c in cuts):
                raise InvalidInputError(f"cuts at level {k} must lie in (0, 1)")
            if k > k_min and not set(self.cut_sets[k - 1]) <= set(cuts):
                raise InvalidInputError(f"non-nested cut sets between levels {k - 1} and {k}")

        self.cuts = self.cut_sets[k_max]
        self.float_cuts = np.array([float(c) for c in self.cuts])
        self.float_complements = np.array([float(1 - c) for c in self.cuts])[::-1]
        self.ambiguous_comparisons = 0

        # lookup[k][i] = level-k cell of finest cell i
        self.lookup = {}
        for k in self.levels:
            coarse = set(self.cut_sets[k])
            is_coarse = np.array([c in coarse for c in self.cuts], dtype=np.int64)
            self.lookup[k] = np.concatenate([[0], np.cumsum(is_coarse)])

    @property
    def cell_count(self) -> int:
        return len(self.cuts) + 1

    def cell_index(self, x: Fraction, side: int) -> int:
        """Finest cell of (x, side) by exact comparison."""
        below = bisect.bisect_left(self.cuts, x)
        if below < len(self.cuts) and self.cuts[below] == x and side == 1:
            below += 1
        return below

    def cell_index_float(self, x: float, one_minus_x: float) -> int:
        """Finest cell of a point known not to be a cut, given x and 1 - x in floating point."""
        if x <= 0.5:
            below = int(np.searchsorted(self.float_cuts, x, side="left"))
            near = self.float_cuts[max(below - 1, 0) : below + 1]
            scale = x
            value = x
        else:
            above = int(np.searchsorted(self.float_complements, one_minus_x, side="right"))
            below = len(self.cuts) - above
            near = self.float_complements[max(above - 1, 0) : above + 1]
            scale = one_minus_x
            value = one_minus_x
        if near.size and np.any(np.abs(near - value) <= AMBIGUITY_TOLERANCE * max(scale, 1e-300)):
            self.ambiguous_comparisons += 1
            logger.warning(f"floating comparison within {AMBIGUITY_TOLERANCE:g} of a cut at x~{x:.17g}")
        return below

    def contains(self, k: int, fp: Any, fq: Any) -> np.ndarray:
        table = self.lookup[k]
        return table[np.asarray(fp, dtype=np.int64)] == table[np.asarray(fq, dtype=np.int64)]

    def square_root_level(self, k: int) -> int:
        return k

    def cell_width(self, k: int) -> Fraction:
        """Largest x-extent of a level-k cell."""
        edges = [Fraction(0)] + self.cut_sets[k] + [Fraction(1)]
        return max(b - a for a, b in zip(edges, edges[1:]))


def partition_family(cuts_per_level: CutSets, k_min: int = 1, k_max: int = 8) -> PartitionFamily:
    return PartitionFamily(cuts_per_level, k_min, k_max)
