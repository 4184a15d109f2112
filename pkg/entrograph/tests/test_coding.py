import numpy as np
import pytest

from entrograph.core.errors import FamilyValidationError, InvalidInputError, NonInvertibleError
from entrograph.schemas.coding import CodingFamily, HittingData, Shape
from entrograph.services.coding_service import CodingService, best_schedule, count_codings, unit_pattern
from entrograph.services.verify_service import load_family
from entrograph.systems.catalog import get_system


def interval_family(*intervals):
    return CodingFamily(
        members=[{"label": f"y{i}", "shape": {"interval": list(bounds)}} for i, bounds in enumerate(intervals)]
    )


@pytest.fixture
def line():
    return get_system("translation-line")


@pytest.fixture
def north_south():
    return get_system("north-south-interval")


@pytest.mark.parametrize("document", [
    {"interval": ["1/4", "1/2"]},
    {"rect": [0, "1/4", "3/4", 1]},
    {"union": [{"interval": [0, 1]}, {"interval": [2, 3]}]},
])
def test_shape_documents(document):
    """Test the single-key shape documents."""
    shape = Shape.model_validate(document)
    assert shape.kinds()


@pytest.mark.parametrize("document", [
    {"interval": [1, 0]},
    {"interval": [0]},
    {"disk": [0, 1]},
    {"interval": ["a", 1]},
    {"arc": [0, 1]},
])
def test_bad_shapes(document):
    """Test empty, malformed and unknown shapes are rejected."""
    with pytest.raises(Exception):
        Shape.model_validate(document)


def test_shape_contains_endpoints_exactly():
    """Test closed intervals in floats and rationals."""
    shape = Shape.model_validate({"interval": ["1/4", "1/2"]})
    assert shape.contains(np.array([[0.25], [0.5], [0.6], [np.inf]])).tolist() == [True, True, False, False]
    assert shape.contains_exact(shape.rationals[1])
    assert not shape.contains_exact(None)


def test_arc_wraps():
    """Test arcs running through 0."""
    shape = Shape.model_validate({"arc": ["3/4", "1/4"]})
    assert shape.contains(np.array([[0.9], [0.1], [0.5]])).tolist() == [True, True, False]


def test_overlaps():
    """Test exact closed intersection of shapes."""
    a = Shape.model_validate({"interval": [0, "1/2"]})
    assert a.overlaps(Shape.model_validate({"interval": ["1/2", 1]}))
    assert not a.overlaps(Shape.model_validate({"interval": ["3/4", 1]}))


@pytest.mark.parametrize("document", [
    {"members": []},
    {"members": [{"label": "a", "shape": {"interval": [0, 1]}}, {"label": "a", "shape": {"interval": [2, 3]}}]},
    {"members": [{"label": "∞", "shape": {"interval": [0, 1]}}]},
    "not json",
])
def test_family_documents_rejected(document):
    """Test empty families, duplicate labels, the reserved label and bad JSON."""
    with pytest.raises(FamilyValidationError):
        CodingFamily.from_document(document)


def test_family_disjoint_and_union():
    """Test disjointness and the one-member union family."""
    family = interval_family(("0", "1/2"), ("2", "5/2"))
    assert family.disjoint
    assert not interval_family(("0", "1"), ("1", "2")).disjoint
    union = family.union()
    assert union.labels == ["y0+y1"]
    assert union.members[0].shape.kinds() == ["interval", "interval"]


@pytest.mark.parametrize("name", ["brouwer-corners", "north-south-pair", "translation-line-interval"])
def test_bundled_families_load(name):
    """Test the families shipped with the package."""
    assert load_family(name).members


def test_load_family_unknown(tmp_path):
    """Test a missing family file."""
    with pytest.raises(InvalidInputError):
        load_family(str(tmp_path / "nowhere.json"))


def test_unit_pattern_spans_unit_interval():
    """Test sample positions inside a shape."""
    pattern = unit_pattern()
    assert pattern[0] == 0.0 and pattern[-1] == 1.0
    assert np.all(np.diff(pattern) > 0)


def test_count_codings_deterministic():
    """Test word counts of single-letter orbits."""
    member = np.zeros((3, 3, 1), dtype=bool)
    member[0, 0, 0] = True
    member[1, 1, 0] = True
    series, overflow = count_codings(member)
    assert series.tolist() == [2, 3, 3]
    assert overflow == 0


def test_count_codings_overlapping_members():
    """Test overlapping members branch the words and the cap truncates them."""
    member = np.ones((1, 2, 2), dtype=bool)
    assert count_codings(member)[0].tolist() == [2, 4]
    series, overflow = count_codings(member, cap=3)
    assert series.tolist() == [2, 3]
    assert overflow == 1


@pytest.mark.parametrize("visits,gap,schedule", [
    ([np.array([0, 10]), np.array([3])], 7, [10, 3]),
    ([np.array([5])], 0, [5]),
    ([np.array([1]), np.array([])], -1, []),
])
def test_best_schedule(visits, gap, schedule):
    """Test the widest pairwise gap of one visit per member."""
    assert best_schedule(visits) == (gap, schedule)


def test_d_lower_bound_of_full_hits():
    """Test d(n) = n(n - 1) / 2 when every m hits."""
    hits = HittingData(source="a", target="b", bound=32, hits=list(range(1, 33)))
    d = CodingService.d_lower_bound(hits, 32)
    assert d.values == [n * (n - 1) / 2 for n in range(1, 33)]


def test_d_lower_bound_needs_bound():
    """Test hitting data shorter than the horizon."""
    with pytest.raises(InvalidInputError):
        CodingService.d_lower_bound(HittingData(source="a", target="b", bound=8, hits=[1]), 16)


def test_validate_family_shape_kind(line):
    """Test rectangle members on a one-dimensional system."""
    family = CodingFamily(members=[{"label": "r", "shape": {"rect": [0, 1, 0, 1]}}])
    with pytest.raises(FamilyValidationError) as info:
        CodingService.validate_family(line, family)
    assert info.value.exit_code == 5


def test_validate_family_non_wandering(north_south):
    """Test members touching a fixed point."""
    with pytest.raises(FamilyValidationError):
        CodingService.validate_family(north_south, interval_family(("0", "1/4")))


def test_validate_family_rotation():
    """Test every point of a rotation is non-wandering."""
    family = CodingFamily(members=[{"label": "a", "shape": {"arc": ["0", "1/8"]}}])
    with pytest.raises(FamilyValidationError):
        CodingService.validate_family(get_system("rotation"), family)


def test_translation_line_counts_are_exact(line):
    """Test one short interval on the line gives c(n) = n + 1."""
    counts = CodingService.codings_count(line, interval_family(("0", "1/2")), 32)
    assert counts.exact
    assert counts.series.values == [float(n + 1) for n in range(1, 33)]


def test_translation_line_sampled_counts_agree(line):
    """Test sampled orbits find every word of the exact path."""
    family = interval_family(("0", "1/2"))
    universe = CodingService.family_universe(line, family, 16)
    counts = CodingService.codings_count(line, family, 16, universe)
    assert not counts.exact
    assert counts.series.values == [float(n + 1) for n in range(1, 17)]


def test_codings_count_needs_horizon(line):
    """Test horizons below 1."""
    with pytest.raises(InvalidInputError):
        CodingService.codings_count(line, interval_family(("0", "1/2")), 0)


@pytest.mark.parametrize("bounds,wandering,first_return", [
    (("0", "1/2"), True, None),
    (("0", "1"), False, 1),
])
def test_wandering_on_the_line(line, bounds, wandering, first_return):
    """Test exact images of intervals under translation."""
    result = CodingService.wandering_check(line, interval_family(bounds).members[0], 16)
    assert result.exact
    assert result.wandering is wandering
    assert result.first_return == first_return


@pytest.mark.parametrize("bounds,wandering", [
    (("1/5", "1/4"), True),
    (("1/8", "1/2"), False),
])
def test_wandering_on_the_interval(north_south, bounds, wandering):
    """Test wandering intervals of the north-south map."""
    result = CodingService.wandering_check(north_south, interval_family(bounds).members[0], 16)
    assert result.wandering is wandering


def test_sampled_wandering(north_south):
    """Test the sampled path agrees on a wandering interval."""
    family = interval_family(("1/5", "1/4"))
    universe = CodingService.family_universe(north_south, family, 16)
    result = CodingService.wandering_check(north_south, family.members[0], 16, universe)
    assert not result.exact
    assert result.wandering


def test_max_visits(line):
    """Test a wandering interval is visited at most once per orbit."""
    result = CodingService.max_visits(line, interval_family(("0", "1/2")).members[0], 16)
    assert result.max_visits == 1
    longer = CodingService.max_visits(line, interval_family(("0", "2")).members[0], 16)
    assert longer.max_visits == 3


def test_max_visits_needs_inverse():
    """Test two-sided visits on a non-invertible map."""
    family = CodingFamily(members=[{"label": "a", "shape": {"arc": ["1/4", "1/2"]}}])
    with pytest.raises(NonInvertibleError):
        CodingService.max_visits(get_system("doubling"), family.members[0], 8)


def test_hitting_sets(line):
    """Test which translates of one interval meet the other."""
    family = interval_family(("0", "1/2"), ("2", "5/2"))
    hitting = {(h.source, h.target): h.hits for h in CodingService.hitting_sets(line, family, 5)}
    assert hitting == {("y0", "y1"): [2], ("y1", "y0"): []}


def test_hitting_sets_need_two_members(line):
    """Test single-member families have no hitting sets."""
    with pytest.raises(InvalidInputError):
        CodingService.hitting_sets(line, interval_family(("0", "1/2")), 5)


def test_north_south_pair_is_not_singular(north_south):
    """Test the two ends of the interval are visited at most four steps apart."""
    result = CodingService.mutually_singular_probe(north_south, load_family("north-south-pair"), 8, 32)
    assert not result.singular
    assert result.max_gap == 4
    assert result.certified_bound == pytest.approx(4.0)
    assert [w.n0 for w in result.witnesses] == [0, 1, 2, 3]


def test_singularity_needs_disjoint_members(line):
    """Test overlapping and single-member families."""
    with pytest.raises(FamilyValidationError):
        CodingService.mutually_singular_probe(line, interval_family(("0", "1"), ("1", "2")), 4, 8)
    with pytest.raises(InvalidInputError):
        CodingService.mutually_singular_probe(line, interval_family(("0", "1")), 4, 8)


def test_coding_additivity(line):
    """Test c over the union is equivalent to c over the family."""
    result = CodingService.additivity_check(line, interval_family(("0", "1/2"), ("2", "5/2")), 32)
    assert result.passed


def test_coding_monotonicity(line):
    """Test a smaller member has no more codings than a larger one."""
    smaller = interval_family(("0", "1/4"))
    larger = interval_family(("0", "1/2"))
    assert CodingService.monotonicity_check(line, smaller, larger, 16).passed
    with pytest.raises(InvalidInputError):
        CodingService.monotonicity_check(line, larger, smaller, 16)


def test_disjoint_representatives(line):
    """Test the sup over disjoint subfamilies of an overlapping family."""
    family = interval_family(("0", "1/2"), ("1/4", "3/4"))
    series = CodingService.disjoint_representatives_count(line, family, 8)
    assert series.values == [float(n + 1) for n in range(1, 9)]


@pytest.mark.parametrize("intervals", [
    (("0", "1"), ("1", "2")),
    (("0", "1"),),
])
def test_coding_bound_needs_disjoint_wandering_members(line, intervals):
    """Test overlapping members and members that return within the horizon."""
    with pytest.raises(FamilyValidationError):
        CodingService.coding_entropy_bound_check(line, interval_family(*intervals), [2, 3, 4], 16)
