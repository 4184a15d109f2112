import math

import pytest
from pydantic import ValidationError

from entrograph.core.errors import HorizonMismatchError, InvalidInputError
from entrograph.schemas.growth import GrowthClass, GrowthLabel, GrowthSeries, Relation
from entrograph.services.expr_parser import parse_sequence
from entrograph.services.growth_service import GrowthBands, GrowthService

HORIZON = 256


@pytest.mark.parametrize("values", [[1.0, -2.0], [1.0, float("nan")], [3.0, 2.0]])
def test_series_rejects_bad_values(values):
    """Test growth series validation of negative, undefined and decreasing values."""
    with pytest.raises(ValidationError):
        GrowthSeries.from_values(values)


def test_series_rejects_empty():
    """Test a series needs at least one value."""
    with pytest.raises(ValidationError):
        GrowthSeries.from_values([])


def test_log_array_zero_counts():
    """Test zero counts contribute 0 and values below 1 keep their logarithm."""
    series = GrowthSeries.from_values([0.0, 0.5, math.e])
    assert series.log_array().tolist() == pytest.approx([0.0, math.log(0.5), 1.0])


@pytest.mark.parametrize("c", [0.001, 0.5, 1000.0])
def test_projection_and_class_ignore_constant_factors(c):
    """Test c*n projects, classifies and compares like n for every c > 0."""
    series = GrowthSeries.from_function(lambda n: n, HORIZON).scaled(c)
    assert GrowthService.project_poly(series) == pytest.approx(1.0, abs=0.01)
    assert GrowthService.classify(series).label == GrowthLabel.LINEAR
    linear = GrowthSeries.from_function(lambda n: n, HORIZON)
    assert GrowthService.compare(series, linear).relation == Relation.EQUIVALENT
    assert GrowthService.compare(linear, series).relation == Relation.EQUIVALENT


@pytest.mark.parametrize("a,b,expected", [
    ("2*n+5", "n", Relation.EQUIVALENT),
    ("n^2", "n", Relation.GREATER),
    ("n", "n^2", Relation.LESS),
    ("ln(n+1)", "ln(n+1)", Relation.EQUIVALENT),
    ("7", "1", Relation.EQUIVALENT),
])
def test_compare(a, b, expected):
    """Test comparison of orders of growth at the default horizon."""
    verdict = GrowthService.compare(parse_sequence(a, HORIZON), parse_sequence(b, HORIZON))
    assert verdict.relation == expected


def test_compare_witness_constants():
    """Test witness constants bound the ratios."""
    verdict = GrowthService.compare(parse_sequence("2*n+5", HORIZON), parse_sequence("n", HORIZON))
    assert verdict.witness_constant == pytest.approx(7.0)
    assert verdict.reverse_constant == pytest.approx(256 / 517)


def test_compare_horizon_mismatch():
    """Test series of different horizons cannot be compared."""
    with pytest.raises(HorizonMismatchError):
        GrowthService.compare(parse_sequence("n", 32), parse_sequence("n", 64))


def test_compare_bad_tail_start():
    """Test tail starts beyond half the horizon are rejected."""
    with pytest.raises(InvalidInputError):
        GrowthService.compare(parse_sequence("n", 32), parse_sequence("n", 32), tail_start=20)


@pytest.mark.parametrize("t", [0.5, 1.0, 1.5, 2.0, 3.0])
def test_project_poly_recovers_degree(t):
    """Test the polynomial projection of n^t."""
    series = GrowthSeries.from_function(lambda n: n**t, HORIZON)
    assert GrowthService.project_poly(series) == pytest.approx(t, abs=0.01)


@pytest.mark.parametrize("t", [0.5, 1.0, 1.5, 2.0, 3.0])
def test_project_exp_recovers_rate(t):
    """Test the exponential projection of exp(t n), built from log values."""
    series = GrowthSeries.from_log_values([t * n for n in range(1, HORIZON + 1)])
    assert GrowthService.project_exp(series) == pytest.approx(t, abs=0.01)


def test_project_poly_of_constant_is_zero():
    """Test a constant series projects to degree 0."""
    assert GrowthService.project_poly(GrowthSeries.from_values([4.0] * 32)) == 0.0


def test_project_exp_overflow_needs_log_values():
    """Test float overflow on the tail is reported."""
    series = GrowthSeries.from_function(lambda n: math.exp(3 * n) if 3 * n < 709 else math.inf, HORIZON)
    with pytest.raises(InvalidInputError):
        GrowthService.project_exp(series)


@pytest.mark.parametrize("expression,label", [
    ("5", GrowthLabel.BOUNDED),
    ("n", GrowthLabel.LINEAR),
    ("3*n+2", GrowthLabel.LINEAR),
    ("n^2", GrowthLabel.POLYNOMIAL),
    ("2^n", GrowthLabel.EXPONENTIAL),
])
def test_classify(expression, label):
    """Test growth classes of closed-form sequences."""
    assert GrowthService.classify(parse_sequence(expression, HORIZON)).label == label


def test_classify_rates():
    """Test degree and rate estimates carried by the class."""
    assert GrowthService.classify(parse_sequence("n^2", HORIZON)).degree == pytest.approx(2.0, abs=0.01)
    assert GrowthService.classify(parse_sequence("2^n", HORIZON)).rate == pytest.approx(math.log(2), abs=0.01)


def test_classify_needs_horizon_16():
    """Test classification refuses short series."""
    with pytest.raises(InvalidInputError):
        GrowthService.classify(parse_sequence("n", 15))


def test_classify_custom_band():
    """Test a narrower linear band turns n^1.2 polynomial."""
    series = GrowthSeries.from_function(lambda n: n**1.2, HORIZON)
    assert GrowthService.classify(series).label == GrowthLabel.LINEAR
    narrow = GrowthBands(linear_band=(0.9, 1.1))
    assert GrowthService.classify(series, narrow).label == GrowthLabel.POLYNOMIAL


def test_bands_reject_bad_tail():
    """Test tail fractions outside (0, 1] are rejected."""
    with pytest.raises(InvalidInputError):
        GrowthBands(tail_fraction=1.5)


def test_sup_is_pointwise():
    """Test the sup of n and 10 at every n."""
    sup = GrowthService.sup([parse_sequence("n", 32), parse_sequence("10", 32)])
    assert sup.values == [max(n, 10.0) for n in range(1, 33)]


def test_sup_keeps_log_values():
    """Test sups of log-valued series stay in log space."""
    a = GrowthSeries.from_log_values([n for n in range(1, 33)])
    b = GrowthSeries.from_log_values([2 * n for n in range(1, 33)])
    assert GrowthService.sup([a, b]).log_values == [2.0 * n for n in range(1, 33)]


def test_sup_empty():
    """Test the sup of nothing is an input error."""
    with pytest.raises(InvalidInputError):
        GrowthService.sup([])


@pytest.mark.parametrize("expression,m,expected", [
    ("n^2", 2, True),
    ("n", 3, True),
    ("2^n", 2, False),
])
def test_linear_invariance(expression, m, expected):
    """Test [a(n)] = [a(mn)] for polynomial and exponential sequences."""
    invariant, _ = GrowthService.is_linearly_invariant(parse_sequence(expression, HORIZON), m)
    assert invariant is expected


@pytest.mark.parametrize("horizon,m", [(256, 1), (15, 2)])
def test_linear_invariance_rejects_bad_input(horizon, m):
    """Test invariance needs m >= 2 and a long enough horizon."""
    with pytest.raises(InvalidInputError):
        GrowthService.is_linearly_invariant(parse_sequence("n", horizon), m)


def test_class_ordering():
    """Test the order used to compare classes with expected ones."""
    linear = GrowthClass(label=GrowthLabel.LINEAR, degree=1.0)
    quadratic = GrowthClass(label=GrowthLabel.POLYNOMIAL, degree=2.0)
    doubling = GrowthClass(label=GrowthLabel.EXPONENTIAL, rate=0.69)
    assert linear.at_most(quadratic)
    assert quadratic.at_most(doubling)
    assert not doubling.at_most(linear)


def test_scaled_and_ratio_series():
    """Test scaling by a constant and the ratio against another series."""
    a = GrowthSeries.from_function(lambda n: n, 4)
    assert a.scaled(3).values == [3.0, 6.0, 9.0, 12.0]
    assert a.scaled(3).ratio_series(a).tolist() == [3.0, 3.0, 3.0, 3.0]
    assert a.truncated(2).values == [1.0, 2.0]
