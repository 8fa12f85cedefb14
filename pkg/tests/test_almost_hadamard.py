import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hadamard.core import ValidationError
from hadamard.constructions import H6q, catalogue, fourier_matrix, paley, walsh_matrix
from hadamard.core import as_complex
from hadamard.analytics import haar_orthogonal
from hadamard.almost_hadamard import (
    L_gamma, L_nu, L_nu_closed, abc_pattern_matrix, abc_solution, balanced_check, build_K_N, build_L_N,
    circulant_ahm_vectors, complex_local_max_check, complex_phi, critical_check, defect_equivalence_check,
    equality_space_dim, is_abc_pattern, is_almost_hadamard, kn_phi_closed, local_max_check_real,
    phi_counterexample_search, phi_min_direction, projective_ahm, random_hermitian, sign_decomposition,
)


def test_K3_optimal():
    K = build_K_N(3)
    assert np.allclose(K[0] * math.sqrt(3), [-1, 2, 2])
    assert local_max_check_real(K / math.sqrt(3))


@pytest.mark.parametrize("N", [3, 5, 7])
def test_KN_is_ahm(N):
    assert is_almost_hadamard(build_K_N(N))
    assert critical_check(build_K_N(N) / math.sqrt(N))


def test_LN():
    assert np.allclose(L_gamma(3) * math.sqrt(3), [1, -2, -2])
    assert is_almost_hadamard(build_L_N(5))
    assert np.allclose(L_nu(5), L_nu_closed(5))
    assert np.all(L_nu_closed(5) > 0)
    v = circulant_ahm_vectors(L_gamma(5))
    assert np.allclose(np.abs(v["alpha"]), 1)
    with pytest.raises(ValidationError):
        build_L_N(4)


def test_real_hadamard_is_ahm():
    for H in (walsh_matrix(2), walsh_matrix(3), paley(11, 1)):
        N = H.shape[0]
        ok, ev = local_max_check_real(H / math.sqrt(N), return_eigs=True)
        assert ok and np.allclose(ev, math.sqrt(N))
        assert balanced_check(H / math.sqrt(N))


def test_random_orthogonal_not_critical(rng):
    U = haar_orthogonal(4, rng)
    assert not critical_check(U)
    assert not local_max_check_real(U)
    assert not balanced_check(haar_orthogonal(3, rng), "semi")


def test_zero_entry():
    assert not critical_check(np.eye(3))
    assert not local_max_check_real(np.eye(3))


def test_sign_decomposition_reassembles(rng):
    U = build_L_N(5) / math.sqrt(5)
    d = sign_decomposition(U)
    assert np.allclose(d.reassemble(), U)
    assert np.array_equal(d.sign_matrix, np.sign(U))


def test_abc_patterns():
    x, y, U, crit = abc_pattern_matrix(0, 1, 3)
    assert np.allclose(U * math.sqrt(5), build_K_N(5)) or np.allclose(-U * math.sqrt(5), build_K_N(5))
    x, y, U, crit = abc_pattern_matrix(1, 2, 2)
    assert np.allclose(U @ U.T, np.eye(7))
    assert crit >= 0 and is_almost_hadamard(math.sqrt(7) * U)
    with pytest.raises(ValidationError):
        abc_solution(2, 1, 2)
    assert not is_abc_pattern(np.eye(4, dtype=int), 1, 1, 1)


@pytest.mark.parametrize("q", [2, 3, 5])
def test_projective(q):
    H = projective_ahm(q)
    assert is_almost_hadamard(H)
    x, y, U, crit = abc_pattern_matrix(1, q, q * q - q)
    assert np.allclose(math.sqrt(q * q + q + 1) * U, H)


def test_complex_phi():
    U = build_K_N(3) / math.sqrt(3)
    assert math.isclose(complex_phi(U, np.ones((3, 3))), kn_phi_closed(3)) and kn_phi_closed(3) == -9
    H = fourier_matrix(5) / math.sqrt(5)
    rng = np.random.default_rng(0)
    for _ in range(100):
        assert complex_phi(H, random_hermitian(5, rng)) >= -1e-9
    D = np.diag(rng.standard_normal(5)).astype(complex)
    assert abs(complex_phi(H, D)) < 1e-9
    with pytest.raises(ValidationError):
        complex_phi(H, np.triu(np.ones((5, 5))))


@pytest.mark.parametrize("N", [3, 5, 6, 7])
def test_KN_not_complex_ahm(N):
    U = build_K_N(N) / math.sqrt(N)
    r = phi_counterexample_search(U, draws=500, seed=0)
    assert r["fails"] and complex_phi(U, r["certificate"]) < 0
    assert not complex_local_max_check(U)
    lam, B = phi_min_direction(U)
    assert lam < 0


def test_K4_complex_ahm():
    assert complex_local_max_check(build_K_N(4) / 2)


def test_hadamard_complex_ahm():
    for name in ("F5", "H6q", "W4"):
        H = as_complex(catalogue()[name][0]())
        U = H / math.sqrt(H.shape[0])
        assert complex_local_max_check(U, draws=200)
        assert phi_min_direction(U)[0] > -1e-9


@pytest.mark.parametrize("name", ["F4", "F5", "W4", "H6"])
def test_defect_equivalence(name):
    H = catalogue()[name][0]()
    assert defect_equivalence_check(H)["equal"]
