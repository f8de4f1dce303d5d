import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vlczf import kernels
from vlczf import _kernels_py as py

try:
    from vlczf import _kernels as cy
except ImportError:  # pragma: no cover - extension not built
    cy = None

needs_ext = pytest.mark.skipif(cy is None, reason="compiled extension not built")


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


def test_env_forces_python():
    env = dict(os.environ, VLCZF_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from vlczf import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_ext
def test_extension_is_default():
    if os.environ.get("VLCZF_PURE_PYTHON", "").lower() not in ("1", "true", "yes"):
        assert kernels.BACKEND == "cython"


@needs_ext
@given(st.floats(1e-6, 1e5))
def test_capacity_parity(a):
    assert cy.capacity_nats(a) == pytest.approx(py.capacity_nats(a), rel=1e-12, abs=1e-15)


@needs_ext
@pytest.mark.parametrize("a", [0.0, -1.0])
def test_capacity_nonpositive(a):
    assert cy.capacity_nats(a) == py.capacity_nats(a) == 0.0


@needs_ext
@given(st.lists(st.floats(0.05, 3.0), min_size=4, max_size=4), st.floats(0.05, 0.95),
       st.integers(0, 1), st.floats(0.0, 0.5))
def test_max_extent_parity(g, xi, axis, frac):
    h11, h12, h21, h22 = g
    if abs(h11 * h22 - h12 * h21) < 1e-3:
        return
    c1, c2 = xi * (h11 + h12), xi * (h21 + h22)
    fixed = frac * min(h11, h12)
    a = cy.max_extent(h11, h12, h21, h22, c1, c2, fixed, axis, 1e-9)
    b = py.max_extent(h11, h12, h21, h22, c1, c2, fixed, axis, 1e-9)
    assert a == b


@needs_ext
def test_max_extent_tiny_step_terminates():
    # A step below float spacing must stop once the bracket cannot split.
    args = (1.0, 2.0, 2.0, 1.0, 1.5, 1.5, 0.0, 0, 1e-300)
    assert cy.max_extent(*args) == pytest.approx(1.5, abs=1e-15)
    assert py.max_extent(*args) == pytest.approx(1.5, abs=1e-15)


def test_python_backend_matches_quadrature_grid():
    # Both methods agree where they hand over (a = 1).
    lo, hi = py._mi_small(1.0, 8.0), py._mi_large(1.0, 8.0)
    assert lo == pytest.approx(hi, abs=1e-13)
    assert np.isfinite(py.capacity_nats(1e5))
