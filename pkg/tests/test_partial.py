import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hadamard.core import ValidationError, is_hadamard
from hadamard.constructions import K4, paley, walsh_matrix
from hadamard.partial import (
    PartialMatrix, ahp_bound_report, all_completions, block_completions_n8, butson_standard_form,
    canonical_four_row, check_embedding, count_phm, count_phm_bruteforce, dll_asymptotic, embed_in_walsh,
    five_row_completable, four_row_profile, is_tristochastic, multinomial_power_sum, normalize_split,
    p2_asymptotic, pbm_asymptotic, pbm_count_bruteforce, pbm_count_enumerate, pbm_count_formula,
    pbm_from_tristochastic, phm_probability, phm_probability_mc, polar_check, polar_closed_form,
    polar_pieces, standard_form, tristochastic_permutation, verify_phm,
)

W4, W8 = walsh_matrix(2), walsh_matrix(3)


def test_verify_and_standard_form():
    assert verify_phm(W4[:3]) and not verify_phm(np.ones((2, 4)))
    assert PartialMatrix(W4[:2]).verified
    with pytest.raises(ValidationError):
        PartialMatrix(np.ones((3, 2)))
    S = standard_form(W4[:3])
    assert np.array_equal(S, [[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1]])
    E = butson_standard_form([[1, 2, 0], [0, 1, 1]], 3)
    assert np.all(E[0] == 0) and np.all(E[:, 0] == 0)


@given(st.integers(1, 4).map(lambda n: 2 * n), st.integers(0, 2 ** 31 - 1))
def test_standard_form_two_rows(N, seed):
    rng = np.random.default_rng(seed)
    row = np.array([1] * (N // 2) + [-1] * (N // 2))[rng.permutation(N)]
    P = np.vstack([np.ones(N, int), row]) * (1 - 2 * rng.integers(0, 2, N))[None, :]
    S = standard_form(P)
    assert np.array_equal(S[1], [1] * (N // 2) + [-1] * (N // 2))


@pytest.mark.parametrize("M,N", [(2, 4), (2, 6), (3, 4), (3, 8), (4, 8), (2, 8), (4, 4)])
def test_counts(M, N):
    assert count_phm(M, N) == count_phm_bruteforce(M, N)


def test_count_values():
    assert count_phm(2, 4) == 96
    assert count_phm(3, 4) == 384
    assert count_phm(3, 6) == 0
    with pytest.raises(ValidationError):
        count_phm(5, 8)


def test_probabilities():
    assert math.isclose(phm_probability(2, 16), math.comb(16, 8) / 2 ** 16)
    assert abs(phm_probability(2, 16) / p2_asymptotic(16) - 1) < 0.02
    assert math.isclose(dll_asymptotic(2, 16), p2_asymptotic(16))
    assert math.isclose(dll_asymptotic(3, 8), 16 / (2 * math.pi * 8) ** 1.5)
    r = phm_probability_mc(3, 16, samples=200_000, seed=1)
    assert abs(r["p"] - phm_probability(3, 16)) < 4 * r["stderr"]


def test_multinomial_power_sum():
    r = multinomial_power_sum(2, 2, 10)
    assert r["exact"] == 184756 and abs(r["ratio"] - 1) < 0.02
    assert multinomial_power_sum(3, 1, 7)["exact"] == 3 ** 7
    assert abs(multinomial_power_sum(2, 3, 8)["ratio"] - 1) < 0.05


def test_four_row_profiles():
    assert four_row_profile(canonical_four_row(2, 0)) == (2, 0)
    assert four_row_profile(canonical_four_row(1, 1)) == (1, 1)
    assert four_row_profile(canonical_four_row(2, 1)) == (2, 1)
    with pytest.raises(ValidationError):
        four_row_profile(W4[:3])


def test_five_row_completion():
    r = five_row_completable(canonical_four_row(3, 0))
    assert not r["completable"] and r["obstruction"]["multiplicities"] == [3, 3, 3, 3]
    assert len(all_completions(canonical_four_row(3, 0))) == 0
    for a, b in [(2, 0), (1, 1), (2, 1)]:
        r = five_row_completable(canonical_four_row(a, b))
        assert r["completable"]
        assert verify_phm(np.vstack([canonical_four_row(a, b), r["row"]]))
    with pytest.raises(ValidationError):
        five_row_completable(np.ones((4, 8), int))


def test_block_completions():
    blocks = block_completions_n8()
    for key, mats in blocks.items():
        for H in mats:
            assert is_hadamard(H)
    top = blocks["W4K4"][0][:4]
    assert four_row_profile(top) == (1, 1)
    rows = {tuple(v) for v in all_completions(top)}
    for H in blocks["W4K4"]:
        assert all(tuple(v) in rows for v in H[4:])


@pytest.mark.parametrize("H", [W8, paley(11, 1)], ids=["W8", "P12"])
@pytest.mark.parametrize("r", [1, 2])
def test_polar(H, r):
    Hn = normalize_split(H, r)
    assert polar_check(Hn, r)["agree"]
    E, S = polar_closed_form(H.shape[0], r)
    pp = polar_pieces(Hn, r)
    assert np.max(np.abs(pp.E - E)) < 1e-9
    assert np.max(np.abs(pp.S - S)) < 1e-9


def test_polar_singular_values():
    H = normalize_split(W8, 2)
    A, D = H[:2, :2], H[2:, 2:]
    sa = np.linalg.svd(A, compute_uv=False)
    sd = np.linalg.svd(D, compute_uv=False)
    # D has the singular values of A plus sqrt N repeated
    assert np.allclose(np.sort(sd)[:2], np.sort(sa))
    assert np.allclose(np.sort(sd)[2:], math.sqrt(8))
    with pytest.raises(ValidationError):
        polar_pieces(W8, 0)


def test_ahp_bounds():
    r = ahp_bound_report(2, 8)
    assert r["ahp"] and r["bound"] < 1
    with pytest.raises(ValidationError):
        ahp_bound_report(3, 4, "general")


@given(st.integers(1, 4), st.integers(0, 2 ** 31 - 1))
def test_walsh_embedding(d, seed):
    rng = np.random.default_rng(seed)
    D = 1 - 2 * rng.integers(0, 2, (d, d))
    emb = embed_in_walsh(D)
    assert check_embedding(D, emb)


def test_walsh_embedding_sizes():
    assert embed_in_walsh(np.array([[1, -1], [1, 1]]))["n"] == 2
    assert embed_in_walsh(np.ones((2, 2), int))["n"] == 3


@pytest.mark.parametrize("q,M,N", [(3, 2, 6), (2, 3, 8), (3, 3, 3), (4, 2, 4), (2, 2, 6), (3, 3, 6)])
def test_pbm_counts(q, M, N):
    e = pbm_count_enumerate(q, M, N)
    assert e == pbm_count_formula(q, M, N)
    if q ** ((M - 1) * N) <= 5_000_000:
        assert e == pbm_count_bruteforce(q, M, N)


def test_pbm_values():
    assert pbm_count_formula(2, 3, 8) == 256 * 2520
    assert pbm_count_enumerate(3, 3, 3) > 0
    A = tristochastic_permutation(3)
    assert is_tristochastic(A)
    E = pbm_from_tristochastic(A)
    Z = np.exp(2j * np.pi * E / 3)
    assert verify_phm(Z)
    assert pbm_asymptotic(2, 3, 8) == dll_asymptotic(3, 8)
