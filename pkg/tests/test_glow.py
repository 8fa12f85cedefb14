import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hadamard.core import ValidationError
from hadamard.constructions import K4, fourier, fourier_matrix, group, walsh_matrix, H6q
from hadamard.glow import (
    I_integral, I_one_block_closed, I_two_pairs_closed, K_coeff, K_tilde, Partition, bell,
    excess_samples, glow_moment_bruteforce, glow_mc, hadamard_p2_exact, mobius, moment_via_partitions,
    noncrossing_partitions, normalized_moment_mc, real_excess_distribution, real_moment_pairings,
    real_parity_split, set_partitions, universality_coefficients, universality_prediction,
)


def test_partition_counts():
    assert [bell(p) for p in range(1, 7)] == [1, 2, 5, 15, 52, 203]
    assert [len(noncrossing_partitions(p)) for p in range(1, 7)] == [1, 2, 5, 14, 42, 132]
    with pytest.raises(ValidationError):
        Partition(((0, 2),))


def test_partition_order():
    top = Partition(((0, 1, 2),))
    bottom = Partition(((0,), (1,), (2,)))
    assert bottom.refines(top) and not top.refines(bottom)
    assert str(Partition.from_sizes((2, 2))) == "12|34"
    assert not Partition(((0, 2), (1, 3))).is_noncrossing()


def test_mobius_values():
    one = Partition(((0, 1),))
    two = Partition(((0,), (1,)))
    assert mobius(one, one) == 1
    assert mobius(two, one) == -1
    # mu(0, 1) on P(p) is (-1)^{p-1} (p-1)!
    for p in range(1, 6):
        lo = Partition(tuple((i,) for i in range(p)))
        hi = Partition((tuple(range(p)),))
        assert mobius(lo, hi) == (-1) ** (p - 1) * math.factorial(p - 1)


def test_K_tilde():
    one = lambda p: Partition((tuple(range(p)),))
    assert K_tilde(one(2)) == Fraction(-1, 2)
    assert K_tilde(one(3)) == Fraction(2, 3)
    assert K_tilde(one(4)) == Fraction(-11, 8)
    for p in range(1, 5):
        assert K_coeff(Partition(tuple((i,) for i in range(p)))) == math.factorial(p)


def test_K_tilde_multiplicative():
    for p in range(1, 4):
        for q in range(1, 6 - p):
            for a in set_partitions(p):
                for b in set_partitions(q):
                    ab = Partition(a.blocks + tuple(tuple(x + p for x in blk) for blk in b.blocks))
                    assert K_tilde(ab) == K_tilde(a) * K_tilde(b)


@pytest.mark.parametrize("G", [(2,), (3,), (4,), (2, 2)])
def test_partitions_equal_bruteforce(G):
    F = fourier(group(*G)).to_complex()
    for p in (1, 2, 3):
        bf = glow_moment_bruteforce(F, p)
        assert abs(moment_via_partitions(F, p) - bf) < 1e-6 * abs(bf)
        assert abs(moment_via_partitions(group(*G), p) - bf) < 1e-6 * abs(bf)


def test_first_moment():
    for N in (2, 3, 5):
        assert abs(glow_moment_bruteforce(fourier_matrix(N), 1) - N * N) < 1e-9


@pytest.mark.parametrize("G", [(3,), (4,), (6,), (2, 2)])
def test_two_pairs(G):
    assert I_integral(group(*G), Partition.from_sizes((2, 2))) == I_two_pairs_closed(group(*G))
    if G == (4,):
        assert I_two_pairs_closed(group(4)) == 884


def test_I_identity_and_one_block():
    for N in (2, 3, 4):
        F = fourier_matrix(N)
        for p in (1, 2, 3):
            assert abs(I_integral(F, Partition(tuple((i,) for i in range(p)))) - N ** p) < 1e-9
            assert abs(I_integral(F, Partition((tuple(range(p)),))) - I_one_block_closed(N, p)) < 1e-9
    H = H6q(np.exp(0.3j))
    assert abs(I_integral(H, Partition(((0, 1),))) - I_one_block_closed(6, 2)) < 1e-8


def test_p2_exact_any_hadamard():
    for H in (fourier_matrix(4), walsh_matrix(2), fourier_matrix(5), H6q(np.exp(0.5j))):
        N = H.shape[0]
        v = glow_moment_bruteforce(H, 2).real / N ** 4 / 2
        assert math.isclose(v, hadamard_p2_exact(N), rel_tol=1e-12)


def test_universality_coefficients():
    K1, K2, K3 = universality_coefficients(2)
    assert K1 == 1
    # the prediction approaches the exact Fourier value with an O(N^-4) remainder
    errs = []
    for N in (5, 7, 9, 11):
        exact = moment_via_partitions(group(N), 2).real / N ** 4 / 2
        errs.append(abs(exact - universality_prediction(2, N)))
    assert errs == sorted(errs, reverse=True)


def test_real_glow_exhaustive():
    assert set(real_excess_distribution(fourier_matrix(2).real)) == {-2, 2}
    d = real_excess_distribution(walsh_matrix(2))
    assert all(v % 4 == 0 for v in d)
    r = real_parity_split(walsh_matrix(2))
    assert r["exhaustive"] and (r["even"], r["odd"]) == (Fraction(1, 4), Fraction(3, 4))
    r = real_parity_split(K4())
    assert (r["even"], r["odd"]) == (Fraction(1, 4), Fraction(3, 4))


def test_real_glow_W8_sampled():
    r = real_parity_split(walsh_matrix(3), samples=200_000, seed=3)
    assert abs(r["even"] - 0.75) < 4 * r["stderr"]


def test_mc_second_moment():
    res = glow_mc(H6q(np.exp(1.1j)), samples=50_000, seed=2)
    m, se = res["moments"][1]
    assert abs(m - 36) < 4 * se
    assert res["counts"].sum() == 50_000
    m, se = normalized_moment_mc(fourier_matrix(2), 2, samples=100_000, seed=5)
    assert abs(m - glow_moment_bruteforce(fourier_matrix(2), 2).real / 32) < 4 * se


@given(st.integers(0, 2 ** 31 - 1), st.sampled_from([2, 3, 4, math.inf]))
def test_excess_bound(seed, s):
    E = excess_samples(fourier_matrix(4), s, 200, seed)
    assert np.all(np.abs(E) <= 4 * 2 + 1e-9)


def test_pairings():
    assert [real_moment_pairings(p) for p in (1, 2, 3)] == [1, 3, 15]


@pytest.mark.parametrize("N", [2, 3, 5, 8])
def test_one_block_polynomials(N):
    assert I_one_block_closed(N, 2) == N * (2 * N - 1)
    assert I_one_block_closed(N, 3) == N * (6 * N * N - 9 * N + 4)
    assert I_one_block_closed(N, 4) == N * (24 * N ** 3 - 72 * N * N + 82 * N - 33)
