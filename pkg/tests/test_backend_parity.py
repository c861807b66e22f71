"""The compiled and pure-Python sweep kernels must be interchangeable:
same state in, bit-identical state out. The selection is a speed choice only.
"""

from __future__ import annotations

import subprocess
import sys

import numpy as np
import pytest

from reputex.topics import LdaHyperparams, gibbs_sweep, init_model, kernels

from synthetic import random_small_corpus

needs_cython = pytest.mark.skipif(
    "cython" not in kernels.available_backends(),
    reason="compiled kernel not built",
)


@needs_cython
def test_identical_chains_across_backends():
    rng = np.random.default_rng(500)
    py = kernels.get_backend("python")
    cy = kernels.get_backend("cython")
    for _ in range(10):
        corpus, K = random_small_corpus(rng)
        seed = int(rng.integers(1 << 60))
        a = init_model(corpus, LdaHyperparams(K=K, seed=seed))
        b = init_model(corpus, LdaHyperparams(K=K, seed=seed))
        for _ in range(8):
            gibbs_sweep(a, kernel=cy)
            gibbs_sweep(b, kernel=py)
            assert a.rng_state == b.rng_state
            assert np.array_equal(a.z, b.z)
            assert np.array_equal(a.n_dk, b.n_dk)
            assert np.array_equal(a.n_kw, b.n_kw)
            assert np.array_equal(a.n_k, b.n_k)


@needs_cython
def test_larger_corpus_long_chain_parity():
    rng = np.random.default_rng(77)
    docs = [[int(w) for w in rng.integers(0, 50, size=12)] for _ in range(80)]
    from conftest import corpus_from_token_ids

    corpus = corpus_from_token_ids(docs, V=50)
    a = init_model(corpus, LdaHyperparams(K=4, seed=9001))
    b = init_model(corpus, LdaHyperparams(K=4, seed=9001))
    cy = kernels.get_backend("cython")
    py = kernels.get_backend("python")
    for _ in range(30):
        gibbs_sweep(a, kernel=cy)
    for _ in range(30):
        gibbs_sweep(b, kernel=py)
    assert a.rng_state == b.rng_state
    assert np.array_equal(a.z, b.z)


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


def test_env_override_selects_python_backend():
    code = (
        "import os; os.environ['REPUTEX_GIBBS_BACKEND'] = 'python'; "
        "from reputex.topics import kernels; "
        "assert kernels.BACKEND_NAME == 'python'; print('ok')"
    )
    result = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, timeout=60
    )
    assert result.returncode == 0, result.stderr
    assert result.stdout.strip() == "ok"
