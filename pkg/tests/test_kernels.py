"""The numba kernels and the numpy fallback must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest

from conftest import cgauss, rand_herm
from ncklab import kernels
from ncklab.schurhorn import family1_pair

npb = kernels.numpy_backend
nb = kernels.numba_backend
needs_numba = pytest.mark.skipif(nb is None, reason="numba backend disabled")
TOL, SWEEPS = 1e-15, 80


def _sorted_norms(W):
    return np.sort(np.linalg.norm(W, axis=1))[::-1]


@needs_numba
@pytest.mark.parametrize("n", [1, 2, 6, 20])
def test_herm_jacobi_parity(rng, n):
    a = rand_herm(rng, n)
    w1, v1, s1 = npb.herm_jacobi(a.copy(), TOL, SWEEPS)
    w2, v2, s2 = nb.herm_jacobi(a.copy(), TOL, SWEEPS)
    assert s1 >= 0 and s2 >= 0
    assert np.allclose(np.sort(w1), np.sort(w2), atol=1e-13 * max(1, abs(w1).max()))
    for w, v in ((w1, v1), (w2, v2)):
        assert np.allclose((v * w) @ v.conj().T, a, atol=1e-12 * np.linalg.norm(a))


@needs_numba
@pytest.mark.parametrize("shape", [(1, 1), (5, 3), (12, 12)])
def test_onesided_parity(rng, shape):
    a = cgauss(rng, *shape)
    W = np.ascontiguousarray(a.T)
    W1, V1, s1 = npb.onesided_jacobi(W.copy(), TOL, SWEEPS)
    W2, V2, s2 = nb.onesided_jacobi(W.copy(), TOL, SWEEPS)
    assert s1 >= 0 and s2 >= 0
    assert np.allclose(_sorted_norms(W1), _sorted_norms(W2), atol=1e-13)
    assert np.allclose(_sorted_norms(W1), np.linalg.svd(a, compute_uv=False), atol=1e-13)


@needs_numba
def test_batch_parity(rng):
    st = cgauss(rng, 33, 4, 4)
    o1, s1 = npb.batch_singular_values(st.copy(), TOL, SWEEPS)
    o2, s2 = nb.batch_singular_values(st.copy(), TOL, SWEEPS)
    assert s1 >= 0 and s2 >= 0
    assert np.allclose(o1, o2, atol=1e-13)
    assert np.allclose(o1, np.linalg.svd(st, compute_uv=False), atol=1e-13)


@needs_numba
@pytest.mark.parametrize("N", [1, 4, 37])
def test_givens_chain_parity(N):
    pair = family1_pair(N)
    M1, s1 = npb.givens_chain(pair.lam.copy(), pair.diag.copy(), 1e-12)
    M2, s2 = nb.givens_chain(pair.lam.copy(), pair.diag.copy(), 1e-12)
    assert s1 == s2 == 0
    assert np.allclose(M1, M2, atol=1e-13)


def test_givens_chain_two_by_two():
    for be in filter(None, (npb, nb)):
        M, status = be.givens_chain(np.array([3.0, 1.0]), np.array([2.0, 2.0]), 1e-12)
        assert status == 0
        assert np.allclose(M, [[2, 1], [1, 2]], atol=1e-15)


def test_backend_switch_subprocess():
    env = dict(os.environ, NCK_JIT="0")
    out = subprocess.run([sys.executable, "-c", "import ncklab; print(ncklab.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_fallback_end_to_end_matches():
    # the full pipeline under NCK_JIT=0 gives the same numbers as the default backend
    code = ("from ncklab import schurhorn as s; r = s.family1(64); "
            "print(repr(r.g_weak2), repr(r.r_weak2))")
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, NCK_JIT=flag)
        outs.append(subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                                   text=True, check=True).stdout.split())
    assert np.allclose(np.array(outs[0], float), np.array(outs[1], float), rtol=1e-12)
