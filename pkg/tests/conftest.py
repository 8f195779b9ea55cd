"""
Test configuration and fixtures for the Sato-Tate toolkit.
"""

import pytest
import tempfile
import shutil
from pathlib import Path

import sys

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from src.sato_tate.endo_group import EndoData  # noqa: E402
from src.sato_tate.groups import cyclic_group  # noqa: E402

DATA_DIR = Path(__file__).parent.parent / "data"

J2 = [[0, 1], [-1, 0]]
J4 = [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]]
ROTATION = [[0, -1], [1, 0]]


def brute_force_count(coefficients, p):
    """Projective points of y^2 = f(x) over F_p by enumerating every (x, y)."""
    affine = 0
    for x in range(p):
        fx = sum(c * pow(x, k, p) for k, c in enumerate(coefficients)) % p
        affine += sum(1 for y in range(p) if (y * y - fx) % p == 0)
    degree = len(coefficients) - 1
    if degree % 2 == 1:
        return affine + 1
    lead = coefficients[-1] % p
    at_infinity = sum(1 for y in range(p) if (y * y - lead) % p == 0)
    return affine + at_infinity


@pytest.fixture
def temp_dir():
    """Create temporary directory for tests."""
    temp_path = Path(tempfile.mkdtemp())
    yield temp_path
    shutil.rmtree(temp_path)


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def non_cm_elliptic():
    """End = Z for an elliptic curve."""
    return EndoData(g=1, basis=[[[1, 0], [0, 1]]], J=J2, name="E")


@pytest.fixture
def cm_elliptic_q():
    """CM by Z[i] over Q: Galois Z/2 acting by J -> -J."""
    return EndoData(
        g=1,
        basis=[[[1, 0], [0, 1]], ROTATION],
        J=J2,
        galois=cyclic_group(2),
        rho=[[[1, 0], [0, 1]], [[1, 0], [0, -1]]],
        name="E_cm",
    )


@pytest.fixture
def cm_elliptic_qi():
    """CM by Z[i] over Q(i): every endomorphism is defined over the base."""
    return EndoData(g=1, basis=[[[1, 0], [0, 1]], ROTATION], J=J2, name="E_cm_qi")


@pytest.fixture
def generic_genus2():
    return EndoData(
        g=2,
        basis=[[[int(i == j) for j in range(4)] for i in range(4)]],
        J=J4,
        name="C2",
    )


@pytest.fixture
def clean_env(monkeypatch):
    """Environment without SATO_TATE_* variables."""
    import os

    for key in list(os.environ):
        if key.startswith("SATO_TATE_"):
            monkeypatch.delenv(key, raising=False)
    yield {}
