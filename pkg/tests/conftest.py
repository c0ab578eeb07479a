import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from config import settings  # noqa: E402
from kernels import SphereSamplePlan  # noqa: E402
from schemas import load_symbol  # noqa: E402


@pytest.fixture(autouse=True)
def quiet_settings(monkeypatch):
    monkeypatch.setattr(settings, "quiet", True)
    monkeypatch.setattr(settings, "threads", 2)


@pytest.fixture
def corpus():
    """按名字取内置语料"""
    return load_symbol


@pytest.fixture
def z(corpus):
    return corpus("z")


@pytest.fixture
def half_plus_half_z(corpus):
    return corpus("half_plus_half_z")


@pytest.fixture
def ball2_plan():
    return SphereSamplePlan.monte_carlo(2, 200_000, seed=1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)
