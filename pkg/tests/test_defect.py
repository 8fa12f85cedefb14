import numpy as np
import pytest
from hypothesis import given, strategies as st

from hadamard.core import ButsonMatrix, ValidationError
from hadamard.constructions import (
    F4s, F6rs, H6q, T6, abelian_groups_upto, fourier, fourier_master, fourier_matrix, group, paley, walsh,
    walsh_matrix,
)
from hadamard.defect import (
    defect, defect_cyclic_closed, defect_fourier_closed, defect_fourier_orders, defect_isotypic_closed,
    defect_numeric, defect_rational, deformation_check, is_partial_isometry, master_defect,
    nicoara_white_generators, phm_defect, tensor_defect_check, truncated_fourier_defect,
)


@pytest.mark.parametrize("G,d", [((2,), 3), ((2, 2), 10), ((5,), 9), ((6,), 15), ((4,), 8), ((3,), 5)])
def test_fourier_closed_values(G, d):
    assert defect_fourier_closed(group(*G)) == d
    assert defect_numeric(fourier(group(*G))).defect == d


def test_closed_forms_agree_upto_16():
    for G in abelian_groups_upto(16):
        d = defect_fourier_orders(G)
        assert defect_isotypic_closed(G) == d
        if len(G.orders) == 1:
            assert defect_cyclic_closed(G.size) == d


def test_real_defect():
    for n in (2, 3):
        N = 2 ** n
        assert defect(walsh_matrix(n)) == N * (N + 1) // 2
    assert defect(paley(11, 1)) == 78


def test_F22q():
    assert defect(F4s(1)) == 10
    assert defect(F4s(np.exp(0.7j))) == 8


def test_exact_rank():
    assert defect_rational(T6()) == defect(T6())
    assert defect_rational(walsh(2)) == 10
    assert defect_rational(fourier(4)) == 8
    assert defect_rational(fourier(6)) == 15


def test_report_fields():
    r = defect_numeric(fourier(5), closed_form=9)
    assert r.agree and r.isolated_hint and not r.unstable
    assert r.dephased_defect == 0
    assert defect_numeric(fourier(6)).dephased_defect == 4
    with pytest.raises(ValidationError):
        defect_numeric(np.ones((3, 3)))
    with pytest.raises(ValidationError):
        defect_numeric(np.ones((2, 3)))


def test_haagerup_family_defect():
    # H_6^q sits in a one-parameter family, so it is not isolated
    r = defect_numeric(H6q(1))
    assert r.defect == 15 and r.dephased_defect == 4 and not r.isolated_hint


def test_tensor_inequality():
    F2, F3 = fourier_matrix(2), fourier_matrix(3)
    assert tensor_defect_check(F2, F2)
    assert defect(np.kron(F2, F2)) == 10 > 9
    assert tensor_defect_check(F2, F3)


@given(st.floats(0.1, 6.2), st.floats(0.1, 6.2))
def test_dita_deformation_defect(a, b):
    assert defect(F6rs(np.exp(1j * a), np.exp(1j * b))) >= 15 - 2


def test_phm_defect():
    P = walsh_matrix(2)[:2]
    r = phm_defect(P)
    # M(M+1)/2 + M(N-M), confirmed by the completion parametrization
    assert r.defect == 7 and r.closed_form == 7 and r.agree
    assert phm_defect(walsh_matrix(3)).defect == 36
    with pytest.raises(ValidationError):
        phm_defect(np.ones((2, 4)))


def test_truncated_fourier():
    G = group(5)
    full = truncated_fourier_defect(range(5), G)
    assert full["defect"] == 9 and full["agree"]
    r = truncated_fourier_defect([0, 1, 2, 3], G)
    assert r["agree"]
    one = truncated_fourier_defect([0], G)
    assert one["defect"] == 5


def test_master_defect():
    for N in (3, 4, 5):
        assert master_defect(fourier_master(N)).defect == defect_fourier_closed(N)


def test_nicoara_white():
    B = nicoara_white_generators(group(4), (0,), (1,))
    assert is_partial_isometry(B)
    r = deformation_check(group(4), (0,), (1,), 0.5)
    assert r["symmetric"] and r["antisymmetric"]
