"""Diagonal unitaries, the 2*pi phase lattice, and minimal Pauli geodesics.

A diagonal unitary U = sum_z e^{-i theta_z} |z><z| is reached by the
diagonal Hamiltonians diag(theta) + 2*pi*diag(m), m integer.  Each such
Hamiltonian generates a Pauli geodesic (diagonal Z-type strings commute),
so the minimal Pauli geodesic length through U is the closest-vector
problem

    min_m F(diag(h) - 2*pi*diag(m))

over the integer lattice, with h the phases reduced to (-pi, pi].  The
Pauli coefficients of a diagonal vector v are its scaled Walsh-Hadamard
transform (W v)/2^n, where W[s, z] = (-1)^{popcount(s & z)}; bit s marks
the Z positions (leftmost letter = most significant bit).

Enumeration is exhaustive over a coordinate window, pruned by the Parseval
bound F >= sqrt(sum v_z^2 / 2^n) (valid for every family here since all
penalty weights are >= 1), with a certification rule that turns a windowed
search into exact CVP when the incumbent is small enough.

The smoothed families are evaluated through their Delta -> 0 limits (F1Delta
as F1, FpDelta as Fp): the objective needs no smoothness and the limit is
the quantity of interest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import hadamard

from .config import DEFAULT_N_CAP, env_n_cap
from .errors import (
    DimensionLimit,
    DimensionMismatch,
    NonTracelessInSUMode,
    UnsupportedSpec,
    WindowTooSmall,
)
from .metrics import F1, F1DELTA, F2, FP, FPDELTA, FQ, MetricSpec
from .pauli import SU, U, PauliVector, HermitianOperator, basis_dimension, string_index

_CHUNK = 1 << 19


@dataclass
class DiagonalUnitary:
    """U = sum_z exp(-i theta_z) |z><z|; phases in radians, length 2^n."""

    n: int
    phases: np.ndarray

    def __post_init__(self):
        self.phases = np.asarray(self.phases, dtype=float)
        if self.phases.shape != (2**self.n,):
            raise DimensionMismatch(f"expected {2**self.n} phases")

    def to_json(self) -> dict:
        return {"n": self.n, "theta": [float(t) for t in self.phases]}

    @classmethod
    def from_json(cls, obj: dict) -> "DiagonalUnitary":
        return cls(int(obj["n"]), np.array(obj["theta"], dtype=float))


@dataclass
class PhaseLattice:
    """The lattice 2*pi * diag(m); SU mode restricts to trace zero."""

    mode: str
    n: int

    def basis_matrix(self) -> np.ndarray:
        """Columns = Pauli coefficients of the U-mode basis 2*pi |z><z|."""
        return 2 * np.pi * hadamard(2**self.n).astype(float) / 2**self.n

    def log_det(self) -> float:
        d = 2**self.n
        return d * (math.log(2 * np.pi) - 0.5 * self.n * math.log(2.0))


@dataclass
class CvpResult:
    minimizer: np.ndarray
    value: float
    geodesic_hamiltonian: HermitianOperator
    certified: bool
    window_used: int


def reduce_phases(theta: np.ndarray) -> np.ndarray:
    """Shift each phase by a multiple of 2*pi into (-pi, pi]."""
    theta = np.asarray(theta, dtype=float)
    return np.pi - np.mod(np.pi - theta, 2 * np.pi)


@lru_cache(maxsize=None)
def _z_index_map(n: int) -> np.ndarray:
    """Basis index of the Z-type string whose Z positions are the bits of s."""
    idx = string_index(n, U)
    out = np.empty(2**n, dtype=int)
    for s in range(2**n):
        label = "".join("Z" if (s >> (n - 1 - q)) & 1 else "I" for q in range(n))
        out[s] = idx[label]
    return out


def diagonal_to_pauli(h: np.ndarray) -> PauliVector:
    """U-mode Pauli coefficients of diag(h): the Walsh-Hadamard transform /2^n."""
    h = np.asarray(h, dtype=float)
    dim = len(h)
    n = int(round(math.log2(dim)))
    if 2**n != dim:
        raise DimensionMismatch(f"phase vector length {dim} is not a power of two")
    y = hadamard(dim) @ h / dim
    entries = np.zeros(basis_dimension(n, U))
    entries[_z_index_map(n)] = y
    return PauliVector(n, U, entries)


# ---------------------------------------------------------------------------
# the CVP solver


def _diag_weights(spec: MetricSpec, n: int):
    """(kind, per-coordinate weights w_s over the 2^n diagonal strings)."""
    popcounts = np.array([bin(s).count("1") for s in range(2**n)])
    if spec.family in (F1, F1DELTA):
        return "taxicab", np.ones(2**n)
    if spec.family in (FP, FPDELTA):
        return "taxicab", np.array([spec.penalty.weight_value(int(j)) for j in popcounts])
    if spec.family == F2:
        return "quadratic", np.ones(2**n)
    if spec.family == FQ:
        return "quadratic", np.array(
            [spec.penalty.weight_value(int(j)) for j in popcounts]
        )
    raise UnsupportedSpec(f"no CVP objective for family {spec.family}")


def _values(kind: str, weights: np.ndarray, y: np.ndarray) -> np.ndarray:
    if kind == "taxicab":
        return np.abs(y) @ weights
    return np.sqrt(y**2 @ weights)


def cvp_minimal_pauli_geodesic(
    spec: MetricSpec,
    U_diag,
    window: int = 2,
    require_certified: bool = False,
) -> CvpResult:
    """Minimize F(diag(h) - 2*pi*diag(m)) by windowed exhaustive enumeration.

    Enumerates m in [-w, w]^{2^n} (SU mode adds the constraint
    sum(m) = sum(h)/2pi, fixing the trace of the Hamiltonian to zero).
    The result is certified exact when the incumbent is below the cheapest
    conceivable cost of leaving the window, 2*pi*w*min(weights)/2^n;
    otherwise the window doubles once, capped at 4, and the result carries
    certified=False (or raises if require_certified).
    """
    if isinstance(U_diag, DiagonalUnitary):
        n, theta = U_diag.n, U_diag.phases
    else:
        theta = np.asarray(U_diag, dtype=float)
        n = int(round(math.log2(len(theta))))
    cap = min(env_n_cap(default=DEFAULT_N_CAP), 3)
    if n > cap:
        raise DimensionLimit(f"CVP enumeration capped at n={cap} (9^{2**n} candidates)")
    if window < 1:
        raise ValueError("window must be >= 1")
    h = reduce_phases(theta)
    kind, weights = _diag_weights(spec, n)

    su_sum = None
    if spec.mode == SU:
        total = float(np.sum(h)) / (2 * np.pi)
        su_sum = int(round(total))
        if abs(total - su_sum) > 1e-9:
            raise NonTracelessInSUMode(
                "phase sum is not a multiple of 2*pi; U is not special unitary"
            )
        weights = weights.copy()
        weights[0] = 0.0  # identity coefficient is projected out
    w_min = float(np.min(weights[weights > 0.0])) if np.any(weights > 0.0) else 1.0

    w = window
    while True:
        value, m = _enumerate(kind, weights, h, w, su_sum, n)
        certified = value < 2 * np.pi * w * w_min / 2**n
        if certified or w >= 4:
            break
        w = min(2 * w, 4)
    if require_certified and not certified:
        raise WindowTooSmall(
            f"window {w} could not certify optimality (incumbent {value:.6g})"
        )
    v = h - 2 * np.pi * m
    if su_sum is not None:
        v = v - np.sum(v) / 2**n
    return CvpResult(
        minimizer=m,
        value=value,
        geodesic_hamiltonian=HermitianOperator(n, np.diag(v.astype(complex))),
        certified=certified,
        window_used=w,
    )


def _enumerate(kind, weights, h, w, su_sum, n):
    dim = 2**n
    Wt = hadamard(dim).astype(float)
    base = 2 * w + 1
    total = base**dim
    # seed the incumbent with the Babai point so pruning bites immediately
    best_m = np.zeros(dim, dtype=int)
    best_value = math.inf
    if su_sum is None or su_sum == 0:
        best_value = float(_values(kind, weights, (h @ Wt / dim)[None, :])[0])
    shape = (base,) * dim
    for c0 in range(0, total, _CHUNK):
        c1 = min(c0 + _CHUNK, total)
        idx = np.arange(c0, c1)
        m = np.stack(np.unravel_index(idx, shape), axis=1) - w
        if su_sum is not None:
            keep = m.sum(axis=1) == su_sum
            if not np.any(keep):
                continue
            m = m[keep]
        v = h[None, :] - 2 * np.pi * m
        # Parseval prune: every family's value is >= the flat-q F2 value
        ssq = np.einsum("ij,ij->i", v, v) / dim
        if su_sum is not None:
            ssq = np.maximum(ssq - (np.sum(h) - 2 * np.pi * su_sum) ** 2 / dim**2, 0.0)
        alive = ssq < best_value**2
        if not np.any(alive):
            continue
        y = v[alive] @ Wt / dim
        vals = _values(kind, weights, y)
        i = int(np.argmin(vals))
        if vals[i] < best_value:
            best_value = float(vals[i])
            best_m = m[alive][i]
    return best_value, best_m


# ---------------------------------------------------------------------------
# volume bounds


def _log_q_product(spec: MetricSpec, n: int) -> float:
    _, weights = _diag_weights(spec, n)
    return float(np.sum(np.log(weights)))


def unit_ball_volume(spec: MetricSpec, r: float, n: int) -> float:
    """Volume of {F <= r} in the 2^n-dimensional diagonal subspace.

    Closed forms: (2r)^d/d! for F1 (the Delta -> 0 limit of F1Delta),
    (sqrt(pi) r)^d/(d/2)! for F2, and the F2 volume scaled by
    prod_sigma 1/q(wt sigma) for Fq.  Evaluated in log space.
    """
    d = 2**n
    if r <= 0:
        return 0.0
    if spec.family in (F1, F1DELTA):
        return math.exp(d * math.log(2 * r) - math.lgamma(d + 1))
    if spec.family == F2:
        return math.exp(d * math.log(math.sqrt(math.pi) * r) - math.lgamma(d / 2 + 1))
    if spec.family == FQ:
        return math.exp(
            d * math.log(math.sqrt(math.pi) * r)
            - math.lgamma(d / 2 + 1)
            - _log_q_product(spec, n)
        )
    raise UnsupportedSpec(f"no volume formula for family {spec.family}")


def coverage_bound(spec: MetricSpec, f_fraction: float, n: int) -> float:
    """Smallest r with V_F(r) >= f * det(M), M the lattice basis matrix.

    If a fraction f of the fundamental cell is within distance r of the
    lattice, the ball volume must be at least f times the cell volume;
    inverting gives a lower bound on the covering radius scale.
    """
    if not 0.0 < f_fraction <= 1.0:
        raise ValueError("f_fraction must be in (0, 1]")
    d = 2**n
    log_rhs = math.log(f_fraction) + PhaseLattice(spec.mode, n).log_det()
    if spec.family in (F1, F1DELTA):
        return 0.5 * math.exp((log_rhs + math.lgamma(d + 1)) / d)
    if spec.family == F2:
        return math.exp((log_rhs + math.lgamma(d / 2 + 1)) / d) / math.sqrt(math.pi)
    if spec.family == FQ:
        return math.exp(
            (log_rhs + math.lgamma(d / 2 + 1) + _log_q_product(spec, n)) / d
        ) / math.sqrt(math.pi)
    raise UnsupportedSpec(f"no volume formula for family {spec.family}")


def monte_carlo_coverage(
    spec: MetricSpec, r: float, n: int, samples: int = 10000, seed: int = 20260822,
    window: int = 1,
) -> float:
    """Fraction of the fundamental cell within CVP distance r of the lattice.

    Uniform phases in [-pi, pi)^{2^n}; the CVP is solved for all samples at
    once by sweeping the (2w+1)^{2^n} lattice offsets.
    """
    if n > 2:
        raise DimensionLimit("Monte Carlo coverage is restricted to n <= 2")
    dim = 2**n
    kind, weights = _diag_weights(spec, n)
    rng = np.random.default_rng(seed)
    h = rng.uniform(-np.pi, np.pi, size=(samples, dim))
    Wt = hadamard(dim).astype(float)
    best = np.full(samples, np.inf)
    base = 2 * window + 1
    for flat in range(base**dim):
        m = np.array(np.unravel_index(flat, (base,) * dim)) - window
        v = h - 2 * np.pi * m[None, :]
        vals = _values(kind, weights, v @ Wt / dim)
        np.minimum(best, vals, out=best)
    return float(np.mean(best <= r))
