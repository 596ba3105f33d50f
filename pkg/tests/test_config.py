"""Tests for run settings."""

import pytest
from pydantic import ValidationError

from bmx.config import DEFAULT_TOL, TOL_ENV_VAR, Settings


class TestSettings:
    def test_defaults(self, monkeypatch):
        monkeypatch.delenv(TOL_ENV_VAR, raising=False)
        settings = Settings.from_env()
        assert settings.tol == DEFAULT_TOL
        assert settings.gauge is None
        assert settings.report is None

    def test_tolerance_from_environment(self, monkeypatch):
        monkeypatch.setenv(TOL_ENV_VAR, "1e-6")
        assert Settings.from_env().tol == 1e-6

    def test_flag_overrides_environment(self, monkeypatch):
        monkeypatch.setenv(TOL_ENV_VAR, "1e-6")
        assert Settings.from_env(tol=1e-3).tol == 1e-3

    def test_unset_overrides_are_ignored(self, monkeypatch):
        monkeypatch.delenv(TOL_ENV_VAR, raising=False)
        assert Settings.from_env(tol=None, seed=None).tol == DEFAULT_TOL

    @pytest.mark.parametrize("tol", [0, -1e-9])
    def test_tolerance_must_be_positive(self, tol):
        with pytest.raises(ValidationError, match="greater than 0"):
            Settings(tol=tol)

    def test_bad_environment_value(self, monkeypatch):
        monkeypatch.setenv(TOL_ENV_VAR, "tight")
        with pytest.raises(ValidationError):
            Settings.from_env()
