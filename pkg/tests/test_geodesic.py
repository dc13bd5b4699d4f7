import numpy as np
import pytest

from sugeo.errors import (
    DimensionMismatch,
    InconsistentPenalties,
    OutsidePatch,
    SingularHessian,
    StepLimitExceeded,
    UnsupportedCoefficient,
)
from sugeo.geodesic import (
    Curve,
    additive_triple_check,
    christoffel,
    curve_length,
    el_residual,
    embed_pauli_vector,
    metric_in_pauli_coords,
    pauli_geodesic,
    pauli_geodesic_curve,
    shoot_geodesic,
)
from sugeo.metrics import F1, F1DELTA, F2, FP, FPDELTA, FQ, MetricSpec, PenaltyFunction, norm
from sugeo.pauli import SU, PauliVector, stabilizer_span

F2_SPEC = MetricSpec(family=F2)
PEN1 = PenaltyFunction(kind="step", k=4.0, low_weight_cutoff=1)


def test_f2_straight_line_through_origin():
    y0 = np.array([0.4, -0.2, 0.3])
    curve = shoot_geodesic(F2_SPEC, np.zeros(3), y0, 1.0, steps=200)
    assert np.max(np.abs(curve.xs - np.outer(curve.ts, y0))) < 1e-8
    assert np.max(np.abs(curve.ys - y0)) < 1e-8
    assert np.max(np.abs(curve.speeds - np.linalg.norm(y0))) < 1e-8


def test_christoffel_symmetric_in_lower_indices():
    spec = MetricSpec(family=F1DELTA, delta=0.05)
    rng = np.random.default_rng(3)
    x = rng.standard_normal(3) * 0.3
    y = rng.standard_normal(3) + 0.3
    G = christoffel(spec, x, y).gammas
    asym = np.max(np.abs(G - np.transpose(G, (0, 2, 1)))) / np.max(np.abs(G))
    assert asym < 1e-9


def test_shoot_satisfies_euler_lagrange():
    spec = MetricSpec(family=FPDELTA, penalty=PenaltyFunction(kind="step", k=2.0, low_weight_cutoff=0), delta=0.05)
    rng = np.random.default_rng(5)
    y0 = rng.standard_normal(3)
    y0 += 0.3 * np.sign(y0)
    y0 = y0 / np.sum(np.abs(y0)) * 1.5
    curve = shoot_geodesic(spec, np.zeros(3), y0, 0.4, steps=800)
    assert el_residual(spec, curve) < 1e-4


def test_reanchoring_and_unitary_at():
    y0 = np.array([3.0, 0.0, 0.0])
    curve = shoot_geodesic(F2_SPEC, np.zeros(3), y0, 1.0)
    assert len(curve.segments) == 2
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    for i in (0, 400, 979, 985, 1000):
        t = curve.ts[i]
        lam, V = np.linalg.eigh(3.0 * t * sx)
        expected = V @ np.diag(np.exp(-1j * lam)) @ V.conj().T
        assert np.max(np.abs(curve.unitary_at(i) - expected)) < 1e-6


def test_step_limit():
    with pytest.raises(StepLimitExceeded):
        shoot_geodesic(F2_SPEC, np.zeros(3), np.array([3.0, 0.0, 0.0]), 3.0, max_segments=1)


def test_zero_velocity_rejected():
    with pytest.raises(ValueError):
        shoot_geodesic(F2_SPEC, np.zeros(3), np.zeros(3), 1.0)


def test_singular_hessian_detected():
    spec = MetricSpec(family=F1DELTA, delta=1e-7)
    with pytest.raises(SingularHessian):
        christoffel(spec, np.array([0.1, 0.2, 0.3]), np.array([1.0, 0.8, -0.5]))


def test_curve_json_roundtrip():
    curve = shoot_geodesic(F2_SPEC, np.zeros(3), np.array([3.0, 0.0, 0.0]), 1.0, steps=100)
    again = Curve.from_json(curve.to_json())
    assert np.allclose(again.ts, curve.ts)
    assert np.allclose(again.xs, curve.xs)
    assert np.allclose(again.ys, curve.ys)
    assert np.allclose(again.speeds, curve.speeds)
    assert again.segments == curve.segments
    assert len(again.anchors) == len(curve.anchors)
    for A, B in zip(again.anchors, curve.anchors):
        assert np.max(np.abs(A - B)) < 1e-15


def test_pauli_geodesic_closed_form():
    S = stabilizer_span(("Z",))
    coeffs = PauliVector.from_terms(1, {"Z": 0.7})
    op = pauli_geodesic(S, coeffs, 1.0)
    assert np.allclose(op.matrix, np.diag([np.exp(-0.7j), np.exp(0.7j)]))


def test_pauli_geodesic_rejects_outside_subgroup():
    S = stabilizer_span(("Z",))
    with pytest.raises(UnsupportedCoefficient):
        pauli_geodesic(S, PauliVector.from_terms(1, {"X": 0.5}), 1.0)


def test_pauli_geodesic_curve_leaves_patch():
    spec = MetricSpec(family=F1)
    with pytest.raises(OutsidePatch):
        pauli_geodesic_curve(spec, PauliVector.from_terms(1, {"Z": 2.0}), 2.0)


def test_straight_curve_length_is_time_times_norm():
    spec = MetricSpec(family=FP, penalty=PEN1)
    coeffs = PauliVector.from_terms(2, {"XI": 0.5, "ZZ": 0.25})
    curve = pauli_geodesic_curve(spec, coeffs, 0.8)
    assert curve_length(spec, curve) == pytest.approx(0.8 * norm(spec, coeffs), abs=1e-10)
    assert norm(spec, coeffs) == pytest.approx(0.5 + 4.0 * 0.25)


def test_metric_in_pauli_coords_at_origin():
    spec = MetricSpec(family=FQ, penalty=PEN1)
    y = PauliVector.from_terms(2, {"XI": 1.0, "ZZ": 2.0})
    assert metric_in_pauli_coords(spec, np.zeros(15), y.entries) == pytest.approx(norm(spec, y))
    with pytest.raises(DimensionMismatch):
        metric_in_pauli_coords(spec, np.zeros(3), y.entries)


def test_embed_pauli_vector_offsets():
    v = PauliVector.from_terms(1, {"X": 1.0, "Z": 0.5})
    left = embed_pauli_vector(v, 2, 0)
    right = embed_pauli_vector(v, 2, 1)
    assert left.terms() == {"XI": 1.0, "ZI": 0.5}
    assert right.terms() == {"IX": 1.0, "IZ": 0.5}


def test_additive_triple_penalty_mismatch():
    pen_a = PenaltyFunction(kind="step", k=3.0, low_weight_cutoff=0)
    pen_ab = PenaltyFunction(kind="step", k=3.0, low_weight_cutoff=1)
    spec_a = MetricSpec(family=FQ, penalty=pen_a)
    spec_ab = MetricSpec(family=FQ, penalty=pen_ab)
    with pytest.raises(InconsistentPenalties):
        additive_triple_check(spec_a, spec_a, spec_ab)


def test_additive_triple_identity_holds():
    pen = PenaltyFunction(kind="step", k=3.0, low_weight_cutoff=1)
    spec_1 = MetricSpec(family=FQ, penalty=pen)
    spec_2 = MetricSpec(family=FQ, penalty=pen)
    residual = additive_triple_check(spec_1, spec_1, spec_2, num_samples=20)
    assert residual < 1e-10
