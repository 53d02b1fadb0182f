"""The compiled and pure-Python kernels implement the same contracts."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest
import scipy.linalg
import scipy.special
from hypothesis import given, settings
from hypothesis import strategies as st

from toprot import _backend, _pykernels
from conftest import BACKENDS

needs_cython = pytest.mark.skipif(BACKENDS["cython"] is None, reason="compiled kernels not built")


def test_backend_selected():
    assert _backend.BACKEND in ("cython", "python")
    forced = os.environ.get("TOPROT_PURE_PYTHON", "").strip() not in ("", "0")
    if BACKENDS["cython"] is not None and not forced:
        assert _backend.BACKEND == "cython"
    if forced:
        assert _backend.BACKEND == "python"


def test_pure_python_switch():
    env = dict(os.environ, TOPROT_PURE_PYTHON="1")
    code = "from toprot import _backend; print(_backend.BACKEND)"
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert res.stdout.strip() == "python"


def test_ellipk_matches_scipy(backend):
    for m in np.linspace(0.0, 0.999999, 101):
        assert math.isclose(backend.ellipk(m), scipy.special.ellipk(m), rel_tol=1e-14)


def test_ellipj_matches_scipy(backend):
    rng = np.random.default_rng(1)
    for _ in range(2000):
        m = rng.random() ** rng.choice([1, 6])
        u = rng.uniform(-20, 20)
        ref = scipy.special.ellipj(u, m)[:3]
        assert np.allclose(backend.ellipj(u, m), ref, rtol=0, atol=1e-13)


def test_ellipj_dn_at_quarter_period(backend):
    # cn vanishes at u = K; dn must stay accurate there
    for m in (0.1, 0.5, 0.9, 0.999):
        K = scipy.special.ellipk(m)
        assert backend.ellipj(K, m)[2] == pytest.approx(math.sqrt(1 - m), rel=1e-13)


def test_ellipj_hyperbolic_limit(backend):
    sn, cn, dn = backend.ellipj(0.7, 1.0)
    assert (sn, cn, dn) == (math.tanh(0.7), 1 / math.cosh(0.7), 1 / math.cosh(0.7))


def _random_tridiagonal(rng, n):
    return rng.normal(size=n).tolist(), rng.normal(size=n - 1).tolist()


def test_tridiag_eigenvalues_match_lapack(backend):
    rng = np.random.default_rng(2)
    for n in (1, 2, 3, 10, 57):
        d, e = _random_tridiagonal(rng, n)
        ref = scipy.linalg.eigh_tridiagonal(np.array(d), np.array(e), eigvals_only=True)
        assert np.allclose(backend.tridiag_eigenvalues(d, e), ref, rtol=0, atol=1e-12)


def test_tridiag_handles_zero_couplings(backend):
    assert backend.tridiag_eigenvalues([3.0, 1.0, 2.0], [0.0, 0.0]) == [1.0, 2.0, 3.0]


def test_sturm_count(backend):
    rng = np.random.default_rng(3)
    d, e = _random_tridiagonal(rng, 40)
    eig = np.sort(scipy.linalg.eigh_tridiagonal(np.array(d), np.array(e), eigvals_only=True))
    for x in np.linspace(eig[0] - 1, eig[-1] + 1, 97):
        assert backend.sturm_count(d, e, x) == int(np.sum(eig < x))


@needs_cython
@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=30),
    st.floats(-1e3, 1e3),
    st.randoms(use_true_random=False),
)
def test_backends_agree(diag, x, rnd):
    cy = BACKENDS["cython"]
    off = [rnd.uniform(-10, 10) for _ in range(len(diag) - 1)]
    a = np.array(_pykernels.tridiag_eigenvalues(diag, off))
    b = np.array(cy.tridiag_eigenvalues(diag, off))
    assert np.allclose(a, b, rtol=0, atol=1e-10 * max(1.0, np.max(np.abs(a))))
    assert _pykernels.sturm_count(diag, off, x) == cy.sturm_count(diag, off, x)


@needs_cython
@settings(max_examples=200, deadline=None)
@given(st.floats(-50, 50), st.floats(0.0, 1.0))
def test_backends_agree_elliptic(u, m):
    cy = BACKENDS["cython"]
    assert np.allclose(_pykernels.ellipj(u, m), cy.ellipj(u, m), rtol=0, atol=1e-14)
    if m < 1.0:
        assert math.isclose(_pykernels.ellipk(m), cy.ellipk(m), rel_tol=1e-15)
