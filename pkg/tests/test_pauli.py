import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pitesim.pauli import (
    PauliSum,
    mask_to_string,
    masks_commute,
    mul_masks,
    pauli_matrix,
    string_to_mask,
)


def test_string_mask_round_trip():
    for label in ("IXYZ", "ZIZI", "YYXZ", "IIII"):
        x, z = string_to_mask(label)
        assert mask_to_string(x, z, len(label)) == label


def test_zizi_has_qubit0_rightmost():
    x, z = string_to_mask("ZIZI")
    assert x == 0
    assert z == 0b1010  # Z on qubits 1 and 3


def test_single_qubit_products():
    # X*Z = -iY, Z*X = iY, Y*Y = I
    cases = {
        (("X", "Z")): ("Y", -1j),
        (("Z", "X")): ("Y", 1j),
        (("Y", "Y")): ("I", 1.0),
        (("X", "Y")): ("Z", 1j),
        (("Y", "X")): ("Z", -1j),
        (("Z", "Y")): ("X", -1j),
    }
    for (a, b), (want, phase) in cases.items():
        xa, za = string_to_mask(a)
        xb, zb = string_to_mask(b)
        x, z, ph = mul_masks(xa, za, xb, zb)
        assert mask_to_string(x, z, 1) == want
        assert ph == phase


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
def test_product_matches_dense(x1, z1, x2, z2):
    n = 8
    a = pauli_matrix(mask_to_string(x1, z1, n))
    b = pauli_matrix(mask_to_string(x2, z2, n))
    x3, z3, ph = mul_masks(x1, z1, x2, z2)
    c = ph * pauli_matrix(mask_to_string(x3, z3, n))
    assert np.allclose(a @ b, c)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 63), st.integers(0, 63), st.integers(0, 63), st.integers(0, 63))
def test_commutation_matches_dense(x1, z1, x2, z2):
    n = 6
    a = pauli_matrix(mask_to_string(x1, z1, n))
    b = pauli_matrix(mask_to_string(x2, z2, n))
    assert masks_commute(x1, z1, x2, z2) == np.allclose(a @ b, b @ a)


def test_sum_merges_and_drops():
    p = PauliSum.from_terms(2, [(0.5, "XZ"), (0.25, "XZ"), (1.0, "ZZ"), (-1.0, "ZZ")])
    assert p.strings() == {"XZ"}
    assert p.coeff("XZ") == pytest.approx(0.75)


def test_matmul_hermitian_square():
    p = PauliSum.from_terms(2, [(0.3, "XI"), (0.7, "ZY")])
    sq = p.matmul(p)
    dense = p.to_matrix()
    assert np.allclose(sq.to_matrix(), dense @ dense)


def test_serialization_round_trip():
    p = PauliSum.from_terms(4, [(0.125, "ZIZI"), (-2.5, "XYYX"), (1e-3, "IIIZ")])
    q = PauliSum.from_text(p.to_text())
    assert q.strings() == p.strings()
    for t in p.terms:
        assert q.coeff(t.string) == pytest.approx(t.coeff)


def test_serialization_q0_rightmost():
    p = PauliSum.from_terms(4, [(1.0, "IIIX")])
    line = p.to_text()
    assert line.split()[1] == "IIIX"
    # the X sits on qubit 0, the least significant statevector bit
    mat = p.to_matrix()
    x0 = np.kron(np.eye(8), np.array([[0, 1], [1, 0]]))
    assert np.allclose(mat, x0)


def test_non_hermitian_coefficient_rejected():
    p = PauliSum(2)
    p.add(1j, *string_to_mask("XI"))
    with pytest.raises(ValueError):
        _ = p.terms
