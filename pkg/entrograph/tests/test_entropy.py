import numpy as np
import pytest

from entrograph.core.errors import InvalidInputError, LevelOutOfRangeError, NonInvertibleError
from entrograph.schemas.growth import GrowthClass, GrowthLabel
from entrograph.schemas.profile import ProfileStatus
from entrograph.services.entropy_service import (
    DynamicalBallSpec,
    EntropyService,
    greedy_cover_size,
    greedy_separated,
    subsample_indices,
)
from entrograph.systems.catalog import get_system
from entrograph.uniformity.metric import euclidean_distance, metric_family

HORIZON = 16


@pytest.fixture
def rotation():
    return get_system("rotation", alpha="1/4")


@pytest.fixture
def coarse(rotation):
    return rotation.compact("coarse")


def test_greedy_separated_grows_when_orbits_split():
    """Test a sample hidden in a ball at n = 1 is admitted once orbits separate."""
    family = metric_family(euclidean_distance, eps0=0.3, k_min=0, k_max=4)
    features = np.array([[[0.0], [0.1], [0.2]], [[0.0], [1.0], [2.0]]])
    series, admitted, covered = greedy_separated(features, family, 1, 2)
    assert series.tolist() == [2, 3]
    assert admitted.all()
    assert covered


def test_greedy_cover_of_a_path():
    """Test the middle vertex of a three-vertex path covers it."""
    assert greedy_cover_size(3, np.array([0, 1]), np.array([1, 2])) == 1
    assert greedy_cover_size(3, np.array([], dtype=np.int64), np.array([], dtype=np.int64)) == 3


def test_subsample_indices():
    """Test deterministic subsampling keeps the ends."""
    picked = subsample_indices(1000, 10)
    assert len(picked) == 10
    assert picked[0] == 0 and picked[-1] == 999
    assert subsample_indices(5, 10).tolist() == [0, 1, 2, 3, 4]


def test_rotation_counts_are_constant(rotation, coarse):
    """Test an isometry has the same separated count at every n."""
    series = EntropyService.separated_count(rotation, coarse, 4, HORIZON)
    assert series.values == [32.0] * HORIZON


def test_separated_count_rejects_bad_input(rotation, coarse):
    """Test horizons below 1 and levels outside the family."""
    with pytest.raises(InvalidInputError):
        EntropyService.separated_count(rotation, coarse, 4, 0)
    with pytest.raises(LevelOutOfRangeError):
        EntropyService.separated_count(rotation, coarse, 17, HORIZON)


def test_doubling_counts_grow():
    """Test separated counts of the doubling map grow with n."""
    system = get_system("doubling")
    compact = system.grid("test", 1000, 9)
    series = EntropyService.separated_count(system, compact, 2, 6)
    assert series.values[5] > 4 * series.values[0]


@pytest.mark.parametrize("k", [3, 4, 5])
def test_sandwich_on_rotation(rotation, coarse, k):
    """Test s(k) <= g(k_f) <= s(k_f) on an isometry."""
    result = EntropyService.sandwich_check(rotation, coarse, k, HORIZON)
    assert result.ok
    assert result.k_fine == k + 1


def test_sandwich_on_north_south():
    """Test the sandwich on an expanding piece of the interval."""
    system = get_system("north-south-interval")
    result = EntropyService.sandwich_check(system, system.compact("ladder", ladder_horizon=HORIZON), 5, HORIZON)
    assert result.ok
    assert result.violation_n is None


def test_sandwich_needs_fine_level(rotation, coarse):
    """Test the finest level has no square root level."""
    with pytest.raises(LevelOutOfRangeError):
        EntropyService.sandwich_check(rotation, coarse, 16, HORIZON)


def test_generator_count_bounded_by_separated(rotation, coarse):
    """Test cover sizes never exceed the separated count at the same level."""
    g = EntropyService.generator_count(rotation, coarse, 4, HORIZON).array()
    s = EntropyService.separated_count(rotation, coarse, 4, HORIZON).array()
    assert np.all(g <= s)


def test_dynamical_ball(rotation, coarse):
    """Test the dynamical ball of an isometry is its ordinary ball."""
    spec = DynamicalBallSpec(coarse.point(0), n=3, k=4)
    members = EntropyService.dynamical_ball(rotation, spec, coarse)
    assert coarse.point(0) in members
    assert len(members) == 15


def test_dynamical_ball_needs_length():
    """Test balls of length zero are rejected."""
    system = get_system("rotation")
    with pytest.raises(InvalidInputError):
        DynamicalBallSpec(system.compact("coarse").point(0), n=0, k=4)


@pytest.mark.parametrize("labels,expected", [
    ([], (None, ProfileStatus.UNSTABLE)),
    ([GrowthLabel.LINEAR], (GrowthLabel.LINEAR, ProfileStatus.STABLE)),
    ([GrowthLabel.BOUNDED, GrowthLabel.LINEAR, GrowthLabel.LINEAR], (GrowthLabel.LINEAR, ProfileStatus.STABLE)),
    ([GrowthLabel.LINEAR, GrowthLabel.POLYNOMIAL], (None, ProfileStatus.UNSTABLE)),
])
def test_aggregate_rule(labels, expected):
    """Test the aggregate is declared only when the two finest levels agree."""
    aggregate, status = EntropyService.aggregate([GrowthClass(label=label) for label in labels])
    assert (aggregate.label if aggregate else None, status) == expected


def test_rotation_profile(rotation, coarse):
    """Test the profile of a rotation is bounded and stable."""
    profile = EntropyService.entropy_profile(rotation, coarse, [4, 3], HORIZON)
    assert [r.k for r in profile.levels] == [3, 4]
    assert profile.status == ProfileStatus.STABLE
    assert profile.aggregate.label == GrowthLabel.BOUNDED
    assert all(r.sandwich_ok for r in profile.levels)
    assert profile.metadata["grid_size"] == 256
    assert "wall_time" in profile.metadata


def test_profile_needs_levels(rotation, coarse):
    """Test an empty level list is rejected."""
    with pytest.raises(InvalidInputError):
        EntropyService.entropy_profile(rotation, coarse, [], HORIZON)


def test_union_bound_on_north_south():
    """Test the union bounds on the core and ladder pieces."""
    system = get_system("north-south-interval")
    compact = system.compact("core+ladder", ladder_horizon=HORIZON)
    result = EntropyService.union_bound_check(system, compact, 4, HORIZON)
    assert result.passed
    assert result.details["pieces"] == ["core", "ladder"]


def test_restricted_profile_reports_pieces():
    """Test '+' selectors add per-piece series and their sup."""
    system = get_system("north-south-interval")
    profile = EntropyService.restricted_profile(system, "core+ladder", [4, 5], HORIZON)
    assert set(profile.pieces) == {"core", "ladder"}
    assert len(profile.piece_sup) == 2
    assert profile.metadata["union_bound_ok"] == {4: True, 5: True}


def test_rotation_is_lyapunov_stable(rotation, coarse):
    """Test an isometry keeps close pairs close."""
    result = EntropyService.lyapunov_probe(rotation, coarse, 4, HORIZON)
    assert result.stable
    assert result.witness_level == 4


def test_lyapunov_inverse_needs_inverse():
    """Test backward probes on a non-invertible map."""
    system = get_system("doubling")
    with pytest.raises(NonInvertibleError):
        EntropyService.lyapunov_probe(system, system.compact(), 2, HORIZON, inverse=True)


def test_rotation_points_are_regular(rotation, coarse):
    """Test the two-sided witness of an isometry does not move with the horizon."""
    result = EntropyService.regularity_probe(rotation, coarse.point(0), 4, HORIZON, universe=coarse)
    assert result.regular
    assert result.witness_level == result.half_horizon_witness_level == 4


def test_power_monotonicity_on_rotation(rotation):
    """Test class(f) <= class(f^2) for a rotation."""
    result = EntropyService.power_monotonicity_check(rotation, 4, HORIZON, 2, "coarse")
    assert result.passed


def test_power_monotonicity_needs_power(rotation):
    """Test powers below 2 are rejected."""
    with pytest.raises(InvalidInputError):
        EntropyService.power_monotonicity_check(rotation, 4, HORIZON, 1, "coarse")


def test_alpha_limit_orbit_leaves():
    """Test a backward orbit in the interval leaves the ball around its start."""
    system = get_system("north-south-interval")
    x = system.point([0.5])
    result = EntropyService.alpha_limit_probe(system, x, 2, HORIZON)
    assert result.details["exits"] is True
    assert result.details["exit_time"] == 1


def test_semiconjugacy_inequality():
    """Test counts of x -> x^2 stay below those of its double-arrow lift."""
    system = get_system("double-arrow")
    result = EntropyService.semiconjugacy_inequality_check(system, HORIZON, system.compact("grid"))
    assert result.passed
    assert result.details["levels"]


def test_greedy_variance(rotation, coarse):
    """Test random-order reruns agree with the fixed order on an isometry grid."""
    result = EntropyService.greedy_variance(rotation, coarse, 4, HORIZON, passes=2, seed=7)
    assert len(result.details["series"]) == 3
