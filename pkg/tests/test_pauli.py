import numpy as np
import pytest

from sugeo.errors import (
    DimensionLimit,
    DimensionMismatch,
    NonTracelessInSUMode,
    NotCommuting,
    NotIndependent,
)
from sugeo.pauli import (
    SU,
    U,
    HermitianOperator,
    PauliVector,
    basis_dimension,
    basis_stack,
    check_n,
    commutes,
    pauli_matrix,
    pauli_strings,
    project_to_pauli,
    stabilizer_span,
    string_index,
    string_product,
    to_matrix,
    weight,
    weights_array,
)


def test_single_qubit_strings():
    assert pauli_strings(1, SU) == ("X", "Y", "Z")
    assert pauli_strings(1, U) == ("I", "X", "Y", "Z")


def test_two_qubit_basis_order():
    su = pauli_strings(2, SU)
    full = pauli_strings(2, U)
    assert len(su) == 15 and len(full) == 16
    assert "II" not in su
    assert full[0] == "II"
    assert list(full) == sorted(full)  # lexicographic, I < X < Y < Z
    assert basis_dimension(2, SU) == 15
    assert basis_dimension(3, U) == 64


def test_weight():
    assert weight("II") == 0
    assert weight("IXZY") == 3
    assert list(weights_array(1, U)) == [0, 1, 1, 1]


def test_qubit_zero_is_leftmost_factor():
    X = pauli_matrix("X")
    I2 = np.eye(2)
    assert np.allclose(pauli_matrix("XI"), np.kron(X, I2))
    assert np.allclose(pauli_matrix("IX"), np.kron(I2, X))


def test_pauli_matrix_values():
    assert np.allclose(pauli_matrix("Y"), [[0, -1j], [1j, 0]])
    zz = pauli_matrix("ZZ")
    assert np.allclose(zz, np.diag([1, -1, -1, 1]))


def test_trace_orthogonality():
    """tr(sigma sigma') = 2^n delta over the full n=2 basis."""
    stack = basis_stack(2, U)
    gram = np.einsum("aij,bji->ab", stack, stack).real
    assert np.allclose(gram, 4.0 * np.eye(16))


def test_projection_roundtrip():
    rng = np.random.default_rng(7)
    for mode in (SU, U):
        v = PauliVector(2, mode, rng.standard_normal(basis_dimension(2, mode)))
        w = project_to_pauli(to_matrix(v), mode)
        assert np.allclose(w.entries, v.entries, atol=1e-13)


def test_su_projection_rejects_trace():
    with pytest.raises(NonTracelessInSUMode):
        project_to_pauli(np.eye(4, dtype=complex), SU)


def test_hermitian_operator_validation():
    HermitianOperator(1, np.array([[0.0, 1j], [-1j, 2.0]]))
    with pytest.raises(ValueError):
        HermitianOperator(1, np.array([[0.0, 1.0], [2.0, 0.0]]))


def test_commutes():
    assert commutes("XI", "IX")
    assert not commutes("XI", "ZI")
    assert commutes("XX", "ZZ")  # two clashing positions, even
    assert not commutes("XXX", "ZZZ")


def test_string_product():
    assert string_product("XI", "ZI") == "YI"
    assert string_product("XZ", "ZX") == "YY"
    assert string_product("XY", "XY") == "II"


def test_stabilizer_span():
    S = stabilizer_span(("ZI", "IZ"))
    assert S.elements == ("II", "IZ", "ZI", "ZZ")
    assert S.n == 2


def test_stabilizer_span_rejects_anticommuting():
    with pytest.raises(NotCommuting):
        stabilizer_span(("XI", "ZI"))


def test_stabilizer_span_rejects_dependent():
    with pytest.raises(NotIndependent):
        stabilizer_span(("ZI", "IZ", "ZZ"))


def test_pauli_vector_json_roundtrip():
    v = PauliVector.from_terms(2, {"XY": 1.5, "ZI": -0.25})
    w = PauliVector.from_json(v.to_json())
    assert w.n == 2 and w.mode == SU
    assert np.allclose(w.entries, v.entries)
    assert v["XY"] == 1.5 and v["ZZ"] == 0.0
    assert v.terms() == {"XY": 1.5, "ZI": -0.25}


def test_from_terms_validation():
    with pytest.raises(DimensionMismatch):
        PauliVector.from_terms(2, {"X": 1.0})
    with pytest.raises(DimensionMismatch):
        PauliVector.from_terms(2, {"II": 1.0}, SU)


def test_qubit_cap():
    check_n(4)
    with pytest.raises(DimensionLimit):
        check_n(5)
    with pytest.raises(DimensionLimit):
        pauli_strings(0, SU)


def test_string_index_matches_order():
    idx = string_index(2, SU)
    strings = pauli_strings(2, SU)
    for i, s in enumerate(strings):
        assert idx[s] == i
