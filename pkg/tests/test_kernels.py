import itertools
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cogsimp import _kernels as k


def levenshtein_oracle(s, t):
    # textbook full-table recursion
    d = [[0] * (len(t) + 1) for _ in range(len(s) + 1)]
    for i in range(len(s) + 1):
        d[i][0] = i
    for j in range(len(t) + 1):
        d[0][j] = j
    for i in range(1, len(s) + 1):
        for j in range(1, len(t) + 1):
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (s[i - 1] != t[j - 1]))
    return d[len(s)][len(t)]


requires_numba = pytest.mark.skipif(not k.HAVE_NUMBA, reason="numba unavailable or disabled")


@pytest.mark.parametrize("s,t,d", [("kitten", "sitting", 3), ("", "abc", 3), ("abc", "", 3),
                                   ("abc", "axc", 1), ("flaw", "lawn", 2), ("héllo", "hello", 1)])
def test_levenshtein_known(s, t, d):
    assert k.levenshtein(s, t) == d
    assert k.levenshtein_numpy(k._codes(s), k._codes(t)) == d


@settings(max_examples=200)
@given(st.text(alphabet="abcd", max_size=12), st.text(alphabet="abcd", max_size=12))
def test_levenshtein_numpy_matches_oracle(s, t):
    assert k.levenshtein_numpy(k._codes(s), k._codes(t)) == levenshtein_oracle(s, t)


@requires_numba
@settings(max_examples=200)
@given(st.text(alphabet="abcd", max_size=12), st.text(alphabet="abcd", max_size=12))
def test_levenshtein_jit_matches_numpy(s, t):
    a, b = k._codes(s), k._codes(t)
    assert k.levenshtein_jit(a, b) == k.levenshtein_numpy(a, b)


def counts_oracle(doubled):
    total = sum(doubled)
    out = np.zeros(total + 1, dtype=np.int64)
    for signs in itertools.product((0, 1), repeat=len(doubled)):
        out[sum(r for r, s in zip(doubled, signs) if s)] += 1
    return out


@settings(max_examples=100)
@given(st.lists(st.integers(1, 20), min_size=0, max_size=9))
def test_signed_rank_counts_match_enumeration(doubled):
    expected = counts_oracle(doubled)
    assert np.array_equal(k.signed_rank_counts_numpy(doubled), expected)
    assert np.array_equal(k.signed_rank_counts(doubled), expected)


@requires_numba
def test_signed_rank_counts_jit_matches_numpy_large():
    rng = np.random.default_rng(0)
    doubled = rng.integers(1, 60, size=25)
    assert np.array_equal(k.signed_rank_counts_jit(doubled), k.signed_rank_counts_numpy(doubled))
    assert k.signed_rank_counts_jit(doubled).sum() == 2 ** 25


def test_env_flag_selects_numpy_path():
    env = dict(os.environ, COGSIMP_DISABLE_JIT="1")
    code = "from cogsimp import _kernels as k; print(k.HAVE_NUMBA, k.levenshtein('kitten', 'sitting'))"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["False", "3"]
