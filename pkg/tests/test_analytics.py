import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hadamard.core import ValidationError, is_hadamard
from hadamard.constructions import F6rs, H6q, K4, fourier_matrix, walsh_matrix
from hadamard.circulant import fourier_circulant_form
from hadamard.analytics import (
    almost_bistochastic, bistochastic_check, bistochastic_search, det_report, dita_bistochastic_form,
    excess_report, haar_onenorm_average, haar_onenorm_exact, haar_orthogonal, haar_unitary, p_norm_report,
    row_stochastic_promote, sphere_abs_moment,
)


def test_det():
    assert math.isclose(det_report(fourier_matrix(4))["abs_det"], 16)
    assert det_report(fourier_matrix(4))["extremal"]
    Q3 = np.array([[1, 1, 1], [1, -1, 1], [1, 1, -1]])
    assert math.isclose(det_report(Q3)["abs_det"], 4)
    assert det_report(np.ones((3, 3)))["abs_det"] < 1e-12


def test_p_norms():
    U = fourier_matrix(4) / 2
    r = p_norm_report(U, 1)
    assert math.isclose(r.value, 8) and r.extremal
    assert not p_norm_report(np.eye(4), 1).extremal
    r4 = p_norm_report(U, 4)
    assert math.isclose(r4.value, 1) and r4.extremal


@given(st.integers(2, 6), st.integers(0, 2 ** 31 - 1))
def test_one_norm_bound(N, seed):
    U = haar_orthogonal(N, np.random.default_rng(seed))
    assert p_norm_report(U, 1).value <= N * math.sqrt(N) + 1e-9
    assert p_norm_report(U, 4).value >= N ** (2 / 4 - 0.5) - 1e-9


def test_excess():
    r = excess_report(K4())
    assert r.excess == 8 and r.bistochastic
    r = excess_report(walsh_matrix(2))
    assert r.excess == 4 and not r.bistochastic
    r = excess_report(fourier_circulant_form(3).matrix())
    assert math.isclose(r.modulus, 3 * math.sqrt(3))


@given(st.floats(0, 2 * np.pi))
def test_K4q_bistochastic(t):
    # K_4^q: circulant with first row (-1, q, 1, q)
    q = np.exp(1j * t)
    g = np.array([-1, q, 1, q])
    i = np.arange(4)
    H = g[(i[None, :] - i[:, None]) % 4]
    assert is_hadamard(H)
    ok, lam = bistochastic_check(H)
    assert ok and np.isclose(lam, 2 * q)
    assert row_stochastic_promote(H)


def test_row_stochastic_promote_rejects():
    with pytest.raises(ValidationError):
        row_stochastic_promote(walsh_matrix(2))


def test_bistochastic_search():
    assert bistochastic_search(walsh_matrix(2))["success"]
    assert bistochastic_search(fourier_matrix(5))["success"]
    r = bistochastic_search(H6q(np.exp(0.8j)), restarts=20)
    assert abs(r["excess"] - 6 * math.sqrt(6)) < 1e-6


def test_dita_bistochastic_form(rng):
    for N in (2, 3):
        Q = np.exp(2j * np.pi * rng.random((N, N)))
        M = dita_bistochastic_form(N, Q)
        assert is_hadamard(M)
        assert almost_bistochastic(M)
    assert almost_bistochastic(dita_bistochastic_form(3, np.ones((3, 3))))


def test_haar_exact_values():
    assert math.isclose(haar_onenorm_exact(2), 8 / math.pi)
    assert math.isclose(haar_onenorm_exact(3), 4.5)
    with pytest.raises(ValidationError):
        sphere_abs_moment(1)


def test_haar_samplers(rng):
    U = haar_orthogonal(5, rng, 10)
    assert np.allclose(U @ U.transpose(0, 2, 1), np.eye(5))
    V = haar_unitary(4, rng, 3)
    assert np.allclose(V @ V.conj().transpose(0, 2, 1), np.eye(4))


def test_haar_mc_large_N():
    r = haar_onenorm_average(20, samples=20_000, seed=1)
    assert abs(r["mean"] - r["exact"]) < 3 * r["stderr"] + 1e-12
    assert abs(r["exact"] / r["asymptotic"] - 1) < 0.05
