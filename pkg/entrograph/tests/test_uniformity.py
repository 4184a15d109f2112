from fractions import Fraction

import numpy as np
import pytest

from entrograph.core.errors import InvalidInputError, LevelOutOfRangeError
from entrograph.systems.catalog import get_system
from entrograph.uniformity.base import ball, check_family_axioms, is_small, separating_level
from entrograph.uniformity.metric import arc_distance, euclidean_distance, metric_family
from entrograph.uniformity.partition import dyadic_cuts, partition_family


def test_arc_distance_wraps():
    """Test the circle metric measures the short way round."""
    d = arc_distance(np.array([[0.05]]), np.array([[0.95]]))
    assert d.tolist() == pytest.approx([0.1])


def test_metric_levels_halve():
    """Test metric entourages are strict balls of radius eps0 * 2^-k."""
    family = metric_family(euclidean_distance, eps0=1.0, k_min=0, k_max=4)
    assert family.epsilon(3) == 0.125
    assert not family.contains(3, np.array([0.0]), np.array([0.125]))
    assert family.contains(3, np.array([0.0]), np.array([0.12]))
    assert family.square_root_level(3) == 4
    assert family.level_for(0.3) == 2


def test_level_out_of_range():
    """Test levels outside the family are rejected."""
    family = metric_family(euclidean_distance, eps0=1.0, k_min=0, k_max=4)
    with pytest.raises(LevelOutOfRangeError):
        family.check_level(5)


@pytest.mark.parametrize("name,compact,k", [
    ("north-south-interval", "grid", 4),
    ("rotation", "coarse", 5),
    ("translation-line", "middle", 2),
])
def test_metric_family_axioms(name, compact, k):
    """Test symmetry, reflexivity, nesting and composition on sampled compacts."""
    system = get_system(name)
    universe = system.compact(compact, ladder_horizon=16)
    assert check_family_axioms(system.entourages, universe, k, max_points=400) is None


def test_ball_and_smallness():
    """Test balls contain their center and small sets lie in one entourage."""
    system = get_system("rotation")
    universe = system.compact("coarse")
    center = universe.point(0)
    members = ball(system.entourages, center, 4, universe)
    assert center in members
    assert is_small(system.entourages, members[:1], 4)
    assert separating_level(system.entourages, universe.point(0), universe.point(128)) == 0


def test_dyadic_cuts():
    """Test level-k dyadic cuts."""
    assert dyadic_cuts(2) == [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)]


def test_partition_cells_split_cuts():
    """Test the two points over a cut fall in different cells."""
    family = partition_family(dyadic_cuts, k_min=1, k_max=3)
    half = Fraction(1, 2)
    assert family.cell_index(half, 0) == 3
    assert family.cell_index(half, 1) == 4
    assert family.cell_count == 8
    assert not family.contains(1, family.cell_index(half, 0), family.cell_index(half, 1))
    assert family.contains(1, family.cell_index(Fraction(1, 8), 0), family.cell_index(Fraction(3, 8), 1))
    assert family.square_root_level(2) == 2


def test_partition_cell_width():
    """Test the widest level-k cell of dyadic cuts."""
    family = partition_family(dyadic_cuts, k_min=1, k_max=3)
    assert family.cell_width(2) == Fraction(1, 4)


def test_partition_rejects_non_nested_cuts():
    """Test cut sets must grow with the level."""
    cuts = {1: [Fraction(1, 2)], 2: [Fraction(1, 3)]}
    with pytest.raises(InvalidInputError):
        partition_family(lambda k: cuts[k], k_min=1, k_max=2)


def test_partition_float_cells_match_exact():
    """Test floating cell lookup agrees with the exact one away from cuts."""
    family = partition_family(dyadic_cuts, k_min=1, k_max=4)
    for x in (Fraction(1, 3), Fraction(5, 7), Fraction(99, 100)):
        assert family.cell_index_float(float(x), float(1 - x)) == family.cell_index(x, 0)
    assert family.ambiguous_comparisons == 0


def test_double_arrow_axioms():
    """Test partition entourages on the double arrow grid."""
    system = get_system("double-arrow")
    universe = system.compact("grid")
    assert check_family_axioms(system.entourages, universe, 3) is None


def test_double_arrow_ladder_stays_off_cuts():
    """Test the finest double-arrow cuts are dyadic and the ladder orbits never land near one."""
    system = get_system("double-arrow")
    family = system.entourages
    assert family.cuts == dyadic_cuts(system.grid_level)
    states = system.compact("ladder", 64).states
    top_cell = family.cell_count - 1
    cells = system.features(states)
    near_one = np.array([p.x is not None and 1 - p.x < Fraction(1, 2**system.grid_level) for p in states])
    assert (cells[near_one] == top_cell).all()
    for _ in range(64):
        states = system.step(states)
        system.features(states)
    assert family.ambiguous_comparisons == 0
