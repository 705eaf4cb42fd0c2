import pytest
from pydantic import ValidationError

from difam.core.config import Settings


def test_defaults_match_the_library_constants() -> None:
    settings = Settings(_env_file=None)

    assert settings.psd_tolerance == 1e-6
    assert settings.fingerprint_quantum == 1e-6
    assert settings.spectrum_tolerance == 1e-8
    assert settings.candidate_ceiling == 10_000_000
    assert settings.workers == 1
    assert settings.time_budget_seconds is None
    assert settings.log_level == "WARNING"


def test_environment_overrides_defaults(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("DIFAM_PSD_TOLERANCE", "0.001")
    monkeypatch.setenv("DIFAM_WORKERS", "4")
    monkeypatch.setenv("DIFAM_TIME_BUDGET_SECONDS", "30")

    settings = Settings(_env_file=None)

    assert settings.psd_tolerance == 0.001
    assert settings.workers == 4
    assert settings.time_budget_seconds == 30.0


def test_empty_environment_values_fall_back_to_defaults(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("DIFAM_TIME_BUDGET_SECONDS", "")

    assert Settings(_env_file=None).time_budget_seconds is None


@pytest.mark.parametrize(
    ("name", "value"),
    [
        ("DIFAM_ANNEAL_COOLING", "1.5"),
        ("DIFAM_WORKERS", "0"),
        ("DIFAM_PSD_TOLERANCE", "-1"),
    ],
)
def test_out_of_range_values_are_rejected(
    monkeypatch: pytest.MonkeyPatch, name: str, value: str
) -> None:
    monkeypatch.setenv(name, value)

    with pytest.raises(ValidationError):
        Settings(_env_file=None)
