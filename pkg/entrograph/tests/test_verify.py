import pytest

from entrograph.core.errors import InvalidInputError, UnknownSystemError
from entrograph.schemas.profile import CheckResult
from entrograph.services.verify_service import VerifyService


def test_suites():
    """Test the bundle names and that 'all' covers the others once."""
    suites = VerifyService.suites()
    assert set(suites) == {"parabolic", "brouwer", "properties", "coding", "double-arrow", "all"}
    parts = suites["parabolic"] + suites["brouwer"] + suites["properties"] + suites["coding"]
    assert len(suites["all"]) == len(parts)


def test_unknown_suite():
    """Test unknown suite names."""
    with pytest.raises(InvalidInputError):
        VerifyService.run("everything")


def test_raising_check_fails_alone(monkeypatch):
    """Test a check that raises is reported as failed and the suite goes on."""

    def broken() -> CheckResult:
        raise UnknownSystemError("unknown system 'henon'")

    def fine() -> CheckResult:
        return CheckResult(name="fine", passed=True)

    monkeypatch.setattr(VerifyService, "suites", classmethod(lambda cls: {"mixed": [broken, fine]}))
    results = VerifyService.run("mixed")
    assert [(r.name, r.passed) for r in results] == [("broken", False), ("fine", True)]
    assert results[0].details["error"] == "unknown system 'henon'"


def test_d_lower_identity():
    """Test the hitting-set lower bound identity."""
    assert VerifyService.d_lower_identity().passed


def test_translation_line_coding():
    """Test the translation line codes linearly."""
    result = VerifyService.translation_line_coding()
    assert result.passed
    assert result.details["exact"]


@pytest.mark.slow
def test_north_south_not_singular():
    """Test the ends of the north-south interval are not mutually singular."""
    result = VerifyService.north_south_not_singular()
    assert result.passed
    assert result.details["max_gap"] == 4


@pytest.mark.slow
def test_brouwer_quadratic_entropy():
    """Test the Brouwer sphere separates orbits quadratically."""
    result = VerifyService.brouwer_degree()
    assert result.passed, result.details
    assert result.details["aggregate"]["label"] == "polynomial"
    assert 1.6 <= result.details["aggregate"]["degree"] <= 2.4


@pytest.mark.slow
def test_brouwer_corners_code_superlinearly():
    """Test the two corner boxes of the Brouwer sphere produce more than linearly many codings."""
    result = VerifyService.brouwer_coding_growth(128)
    assert result.passed, result.details
    assert result.details["verdict"]["relation"] == "greater"


@pytest.mark.slow
def test_brouwer_corners_singular():
    """Test the corner boxes are mutually singular."""
    assert VerifyService.brouwer_singularity().passed


@pytest.mark.slow
@pytest.mark.parametrize("system_name", ["parabolic-disk", "translation-line", "double-arrow"])
def test_parabolic_linear_entropy(system_name):
    """Test parabolic systems separate orbits linearly."""
    result = VerifyService.linear_entropy(system_name, 256)
    assert result.passed, result.details
    assert result.details["sandwich_ok"]


@pytest.mark.slow
def test_concentration_near_infinity():
    """Test the translation line's growth sits near infinity."""
    result = VerifyService.parabolic_concentration()
    assert result.passed, result.details
    assert result.details == {"ball-infinity": "linear", "middle": "bounded"}


@pytest.mark.slow
def test_power_monotonicity():
    """Test powers of a map never separate fewer orbits."""
    result = VerifyService.power_monotonicity()
    assert result.passed, result.details
    assert result.details["rotation^4 bounded"]


@pytest.mark.slow
def test_sandwich_on_every_system():
    """Test separated and generating counts nest at every default level of every system."""
    result = VerifyService.sandwich_all()
    assert result.passed, result.details["violations"]
