"""Circuit-length upper bounds on distance, and the isometry catalogue.

If every Hamiltonian generating a gate of the universal set has norm at
most 1 (the metric is "G-bounding"), then a circuit of m gates yields a
smooth curve from I to its product of length at most m, hence
d_F(I, U) <= m.  The curve follows the piecewise gate controls scaled by
m and multiplied by a regularizer r(t) vanishing at the segment joints,
so the control is smooth and each segment contributes exactly
alpha_j * F(sigma_j) <= 1.

The isometry section checks which conjugation-type maps preserve which
norms: Pauli conjugation and complex conjugation preserve all families
(signed permutations of coefficients), Clifford conjugation preserves the
weight-blind families (permutations of the Pauli basis), local-unitary
conjugation preserves weights but mixes coefficients orthogonally (F2 and
Fq survive), and arbitrary unitary conjugation leaves only F2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .errors import DimensionMismatch, NotGBounding
from .metrics import (
    F1,
    F1DELTA,
    F2,
    FP,
    FPDELTA,
    FQ,
    MetricSpec,
    norm,
    norms_batch,
)
from .pauli import (
    SU,
    PauliVector,
    basis_dimension,
    matrix_of,
    pauli_matrix,
    project_to_pauli,
    string_index,
    validate_string,
    weight,
)

# ---------------------------------------------------------------------------
# gates and circuits


@dataclass(frozen=True)
class Gate:
    """exp(-i alpha sigma) acting on the listed qubits (one letter each)."""

    pauli: str
    alpha: float
    qubits: tuple

    def __post_init__(self):
        validate_string(self.pauli)
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if len(self.pauli) != len(self.qubits):
            raise DimensionMismatch("one Pauli letter per acted-on qubit")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("repeated qubit in gate")


@dataclass(frozen=True)
class GateSet:
    """The exactly-universal set exp(-i alpha sigma), wt(sigma) <= 2, alpha in [0,1]."""

    max_weight: int = 2
    alpha_max: float = 1.0

    def validate(self, gate: Gate):
        if weight(gate.pauli) > self.max_weight or weight(gate.pauli) == 0:
            raise ValueError(f"gate weight {weight(gate.pauli)} outside the gate set")
        if not 0.0 <= gate.alpha <= self.alpha_max:
            raise ValueError(f"gate alpha {gate.alpha} outside [0, {self.alpha_max}]")


@dataclass
class Circuit:
    n: int
    gates: list

    def full_string(self, gate: Gate) -> str:
        letters = ["I"] * self.n
        for q, c in zip(gate.qubits, gate.pauli):
            if not 0 <= q < self.n:
                raise DimensionMismatch(f"qubit {q} outside 0..{self.n - 1}")
            letters[q] = c
        return "".join(letters)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "gates": [
                {"pauli": g.pauli, "alpha": float(g.alpha), "qubits": list(g.qubits)}
                for g in self.gates
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Circuit":
        gates = [
            Gate(g["pauli"], float(g["alpha"]), tuple(g["qubits"]))
            for g in obj["gates"]
        ]
        return cls(int(obj["n"]), gates)


def gate_unitary(circuit: Circuit, gate: Gate) -> np.ndarray:
    """exp(-i alpha sigma) = cos(alpha) I - i sin(alpha) sigma (sigma^2 = I)."""
    sigma = pauli_matrix(circuit.full_string(gate))
    dim = 2**circuit.n
    return np.cos(gate.alpha) * np.eye(dim) - 1j * np.sin(gate.alpha) * sigma


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Product U_m ... U_1 (gate 1 applied first)."""
    dim = 2**circuit.n
    U = np.eye(dim, dtype=complex)
    for g in circuit.gates:
        U = gate_unitary(circuit, g) @ U
    return U


# ---------------------------------------------------------------------------
# circuit-to-curve construction


def regularizer(m: int):
    """r(t) = 1 - cos(2 pi m t): zero at multiples of 1/m, segment integrals 1/m."""
    if m < 1:
        raise ValueError("m must be >= 1")

    def r(t):
        return 1.0 - np.cos(2 * np.pi * m * t)

    return r


@dataclass
class CircuitTrajectory:
    """Schrodinger trajectory of the regularized circuit controls on [0, 1]."""

    circuit: Circuit
    spec: MetricSpec
    ts: np.ndarray
    unitaries: np.ndarray
    speeds: np.ndarray
    length: float
    endpoint_error: float

    @property
    def gate_count(self) -> int:
        return len(self.circuit.gates)

    @property
    def bound_holds(self) -> bool:
        return self.length <= self.gate_count + 1e-6


def _polar_unitary(V: np.ndarray) -> np.ndarray:
    P, _, Q = np.linalg.svd(V)
    return P @ Q


def circuit_to_curve(
    circuit: Circuit, spec: MetricSpec, steps_per_segment: int = 250
) -> CircuitTrajectory:
    """Integrate dV/dt = -i r(t) m H_j V over the gate segments.

    RK4 with polar re-unitarization each step; the endpoint reproduces the
    circuit product and the length never exceeds the gate count for a
    G-bounding metric.  Every gate Hamiltonian is checked against the
    metric at entry (G-bounding is a property of the penalties, not of the
    spec label).
    """
    gate_set = GateSet()
    m = len(circuit.gates)
    dim = 2**circuit.n
    d = basis_dimension(circuit.n, spec.mode)
    idx = string_index(circuit.n, spec.mode)
    if m == 0:
        ts = np.array([0.0, 1.0])
        eye = np.eye(dim, dtype=complex)
        return CircuitTrajectory(
            circuit, spec, ts, np.array([eye, eye]), np.zeros(2), 0.0, 0.0
        )

    sigmas = []
    for g in circuit.gates:
        gate_set.validate(g)
        s = circuit.full_string(g)
        e = np.zeros(d)
        e[idx[s]] = g.alpha
        if norm(spec, e) > 1.0 + 1e-12:
            raise NotGBounding(
                f"gate Hamiltonian {g.alpha:.3g}*{s} has norm {norm(spec, e):.6f} > 1"
            )
        sigmas.append((pauli_matrix(s), idx[s], g.alpha))

    r = regularizer(m)
    k = steps_per_segment
    dt = 1.0 / (m * k)
    V = np.eye(dim, dtype=complex)
    ts = [0.0]
    unitaries = [V.copy()]
    controls = [np.zeros(d)]

    for j, (sigma, col, alpha) in enumerate(sigmas):
        for step in range(k):
            t0 = j / m + step * dt

            def rhs(t, W):
                return -1j * (r(t) * m * alpha) * (sigma @ W)

            k1 = rhs(t0, V)
            k2 = rhs(t0 + 0.5 * dt, V + 0.5 * dt * k1)
            k3 = rhs(t0 + 0.5 * dt, V + 0.5 * dt * k2)
            k4 = rhs(t0 + dt, V + dt * k3)
            V = _polar_unitary(V + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4))
            t1 = t0 + dt
            ts.append(t1)
            unitaries.append(V.copy())
            gamma = np.zeros(d)
            gamma[col] = r(t1) * m * alpha
            controls.append(gamma)

    ts = np.array(ts)
    speeds = norms_batch(spec, np.array(controls))
    length = float(simpson(speeds, x=ts))
    endpoint_error = float(np.max(np.abs(V - circuit_unitary(circuit))))
    return CircuitTrajectory(
        circuit, spec, ts, np.array(unitaries), speeds, length, endpoint_error
    )


# ---------------------------------------------------------------------------
# isometries


_APPLICABLE = {
    "pauli": (F1, F2, FP, FQ, F1DELTA, FPDELTA),
    "complex_conjugation": (F1, F2, FP, FQ, F1DELTA, FPDELTA),
    "clifford": (F1, F1DELTA, F2),
    "local_unitary": (F2, FQ),
    "unitary": (F2,),
}


@dataclass
class IsometryMap:
    """Pushforward H -> h(H) for one of the conjugation-type global maps."""

    kind: str
    operator: np.ndarray = None
    pauli: str = None

    def __post_init__(self):
        if self.kind not in _APPLICABLE:
            raise ValueError(f"unknown isometry kind {self.kind!r}")
        if self.kind == "pauli":
            if self.pauli is None:
                raise ValueError("pauli kind needs a Pauli string")
        elif self.kind != "complex_conjugation":
            if self.operator is None:
                raise ValueError(f"{self.kind} kind needs a unitary operator")
            self.operator = np.asarray(self.operator, dtype=complex)

    def applicable(self, spec: MetricSpec) -> bool:
        return spec.family in _APPLICABLE[self.kind]

    def push(self, H: np.ndarray) -> np.ndarray:
        H = matrix_of(H)
        if self.kind == "pauli":
            sigma = pauli_matrix(self.pauli)
            return sigma @ H @ sigma
        if self.kind == "complex_conjugation":
            return -H.conj()
        return self.operator @ H @ self.operator.conj().T


@dataclass
class IsometryCheckResult:
    max_deviation: float
    applicable: bool
    counterexample: PauliVector = None


def isometry_check(
    iso: IsometryMap, spec: MetricSpec, samples: int = 200, n: int = 2,
    seed: int = 20260822,
) -> IsometryCheckResult:
    """Max |F(h(H)) - F(H)| over random Hamiltonians.

    Applicable pairs per the catalogue must come out < 1e-10; for pairs
    declared inapplicable, the first Hamiltonian with deviation > 1e-6 is
    kept as the counterexample.
    """
    rng = np.random.default_rng(seed)
    d = basis_dimension(n, SU)
    worst = 0.0
    counterexample = None
    for _ in range(samples):
        y = rng.standard_normal(d)
        H = np.einsum(
            "k,kij->ij", y, np.stack([pauli_matrix(s) for s in _su_strings(n)])
        )
        pushed = project_to_pauli(iso.push(H), SU)
        dev = abs(norm(spec, pushed) - norm(spec, PauliVector(n, SU, y)))
        if dev > worst:
            worst = dev
            if dev > 1e-6 and counterexample is None:
                counterexample = PauliVector(n, SU, y)
    return IsometryCheckResult(worst, iso.applicable(spec), counterexample)


def _su_strings(n: int):
    from .pauli import pauli_strings

    return pauli_strings(n, SU)


def pauli_symmetric_check(spec: MetricSpec, samples: int = 50, n: int = 2,
                          seed: int = 20260822) -> bool:
    """Norm invariance under random sign flips of the coefficients."""
    rng = np.random.default_rng(seed)
    d = basis_dimension(n, spec.mode)
    for _ in range(samples):
        y = rng.standard_normal(d)
        signs = rng.choice([-1.0, 1.0], size=d)
        if abs(norm(spec, signs * y) - norm(spec, y)) > 1e-12 * max(1.0, norm(spec, y)):
            return False
    return True


# ---------------------------------------------------------------------------
# named Clifford operators (for isometry checks)


def cnot_matrix() -> np.ndarray:
    """CNOT, control qubit 0 (most significant bit), target qubit 1."""
    return np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    )


def hadamard_matrix() -> np.ndarray:
    return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def s_matrix() -> np.ndarray:
    return np.diag([1.0, 1.0j])


def swap_matrix() -> np.ndarray:
    return np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    )


def local_unitary(factors) -> np.ndarray:
    """Tensor product of single-qubit unitaries, qubit 0 leftmost."""
    W = np.array([[1.0 + 0j]])
    for f in factors:
        W = np.kron(W, np.asarray(f, dtype=complex))
    return W


def random_su2(rng) -> np.ndarray:
    """Haar-ish single-qubit unitary via QR of a complex Gaussian."""
    A = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    Q, R = np.linalg.qr(A)
    return Q @ np.diag(np.exp(-1j * np.angle(np.diag(R))))
