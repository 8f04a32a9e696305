"""Shared test fixtures."""

import numpy as np
import pytest

from secregen.codes.field import FieldSpec
from secregen.codes.layered import CodeParams
from secregen.core import config as config_module


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def gf7():
    return FieldSpec.prime(7)


@pytest.fixture
def gf16():
    return FieldSpec.binary(4)


@pytest.fixture
def gf65536():
    return FieldSpec.binary(16)


@pytest.fixture
def params_713():
    return CodeParams(7, 1, 3)


@pytest.fixture
def tiny_params(gf7):
    """(3,1,2) over GF(7): B=1, R=2, exhaustively enumerable."""
    return CodeParams(3, 1, 2, gf7)


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Point config loading at a missing temp file and drop the cached instance."""
    monkeypatch.setenv("RGC_CONFIG", str(tmp_path / "no-config.json"))
    monkeypatch.delenv("RGC_ORACLE_BUDGET", raising=False)
    config_module.reset_config()
    yield
    config_module.reset_config()
