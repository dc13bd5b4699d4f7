"""Norms on the Pauli coefficient space defining right-invariant metrics.

Families:

  F1      sum of |y^sigma|                      (taxicab; not smooth)
  F2      sqrt of sum of (y^sigma)^2            (Euclidean / bi-invariant)
  Fp      weighted taxicab, weights p(wt sigma) (not smooth)
  Fq      weighted Euclidean, weights q(wt sigma)
  F1Delta smoothed F1 via the implicit indicatrix construction
  FpDelta smoothed Fp, likewise

The smoothed families use g(y) = sum_sigma p_sigma sqrt(Delta^2 + y_sigma^2)
and define N(y) as the unique positive solution of g(y/N) = 1.  That N is a
strongly convex Minkowski norm provided Delta < 1/P with P = sum_sigma
p_sigma, and satisfies the sandwich N_p(y) <= N(y) <= N_p(y)/(1 - P*Delta)
where N_p is the exact weighted taxicab norm.

Note F2 here is a genuine norm (square root included).  Expressions like
tr(H^2)/2^n elsewhere are its square.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DeltaTooLarge,
    DimensionMismatch,
    NotSmoothMetric,
    UnsupportedSpec,
    ZeroVector,
)
from .pauli import SU, PauliVector, basis_dimension, weights_array

F1 = "F1"
F2 = "F2"
FP = "Fp"
FQ = "Fq"
F1DELTA = "F1Delta"
FPDELTA = "FpDelta"

FAMILIES = (F1, F2, FP, FQ, F1DELTA, FPDELTA)
SMOOTHED = (F1DELTA, FPDELTA)
QUADRATIC = (F2, FQ)
NEEDS_PENALTY = (FP, FQ, FPDELTA)

_IMPLICIT_TOL = 1e-12


@dataclass(frozen=True)
class PenaltyFunction:
    """Weight-dependent penalty p(j) >= 1.

    kind "step": p(j) = 1 for j <= low_weight_cutoff, else k.
    kind "table": p(j) = values[j], explicit per weight 0..n.
    """

    kind: str = "step"
    k: float = 1.0
    low_weight_cutoff: int = 2
    values: Optional[tuple] = None

    def __post_init__(self):
        if self.kind == "step":
            if self.k < 1.0:
                raise ValueError(f"step penalty k={self.k} < 1")
        elif self.kind == "table":
            if not self.values or any(v < 1.0 for v in self.values):
                raise ValueError("table penalty needs values, all >= 1")
            object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        else:
            raise ValueError(f"unknown penalty kind {self.kind!r}")

    def weight_value(self, j: int) -> float:
        if self.kind == "step":
            return 1.0 if j <= self.low_weight_cutoff else float(self.k)
        if j >= len(self.values):
            raise DimensionMismatch(
                f"table penalty has {len(self.values)} entries, weight {j} requested"
            )
        return self.values[j]

    def to_json(self) -> dict:
        if self.kind == "step":
            out = {"kind": "step", "k": float(self.k)}
            if self.low_weight_cutoff != 2:
                out["low_weight_cutoff"] = self.low_weight_cutoff
            return out
        return {"kind": "table", "values": list(self.values)}

    @classmethod
    def from_json(cls, obj: dict) -> "PenaltyFunction":
        if obj["kind"] == "step":
            return cls(
                kind="step",
                k=float(obj["k"]),
                low_weight_cutoff=int(obj.get("low_weight_cutoff", 2)),
            )
        return cls(kind="table", values=tuple(obj["values"]))


@dataclass(frozen=True)
class MetricSpec:
    """One metric family plus its parameters."""

    family: str
    penalty: Optional[PenaltyFunction] = None
    delta: Optional[float] = None
    mode: str = SU

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise UnsupportedSpec(f"unknown metric family {self.family!r}")
        if self.family in NEEDS_PENALTY and self.penalty is None:
            raise UnsupportedSpec(f"{self.family} requires a penalty function")
        if self.family in SMOOTHED:
            if self.delta is None or self.delta <= 0:
                raise UnsupportedSpec(f"{self.family} requires delta > 0")

    def to_json(self) -> dict:
        out = {"family": self.family, "mode": self.mode}
        if self.penalty is not None:
            out["penalty"] = self.penalty.to_json()
        if self.delta is not None:
            out["delta"] = float(self.delta)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "MetricSpec":
        penalty = None
        if "penalty" in obj and obj["penalty"] is not None:
            penalty = PenaltyFunction.from_json(obj["penalty"])
        delta = obj.get("delta")
        return cls(
            family=obj["family"],
            penalty=penalty,
            delta=None if delta is None else float(delta),
            mode=obj.get("mode", SU),
        )


@dataclass
class NormEvaluation:
    value: float
    gradient: Optional[np.ndarray] = None
    hessian: Optional[np.ndarray] = None


# ---------------------------------------------------------------------------
# penalty vectors over the basis


def penalty_vector(spec: MetricSpec, n: int) -> np.ndarray:
    """p(wt sigma) over the basis in canonical order (ones for F1/F1Delta/F2)."""
    w = weights_array(n, spec.mode)
    if spec.family in (F1, F2, F1DELTA) or spec.penalty is None:
        return np.ones(len(w))
    return np.array([spec.penalty.weight_value(int(j)) for j in w])


def _entries(spec: MetricSpec, y, n: int = None) -> np.ndarray:
    if isinstance(y, PauliVector):
        if y.mode != spec.mode:
            raise DimensionMismatch(f"vector mode {y.mode} vs spec mode {spec.mode}")
        return y.entries
    y = np.asarray(y, dtype=float)
    if n is not None and y.shape != (basis_dimension(n, spec.mode),):
        raise DimensionMismatch(
            f"expected {basis_dimension(n, spec.mode)} entries, got {y.shape}"
        )
    return y


def _infer_n(spec: MetricSpec, y: np.ndarray) -> int:
    d = len(y)
    for n in range(1, 8):
        if basis_dimension(n, spec.mode) == d:
            return n
    raise DimensionMismatch(f"vector length {d} matches no qubit count in mode {spec.mode}")


# ---------------------------------------------------------------------------
# norm evaluation


def norm(spec: MetricSpec, y) -> float:
    """F(y) for any family (delegates to the implicit solver when smoothed)."""
    v = _entries(spec, y)
    n = _infer_n(spec, v)
    p = penalty_vector(spec, n)
    if spec.family in (F1, FP):
        return float(p @ np.abs(v))
    if spec.family in (F2, FQ):
        return float(np.sqrt(p @ v**2))
    return implicit_norm(spec, y)


def implicit_norm(spec: MetricSpec, y) -> float:
    """Solve g(y/N) = 1 for N, where g(u) = sum p_j sqrt(delta^2 + u_j^2).

    The map N -> g(y/N) decreases strictly from +inf to P*delta < 1, so the
    root is unique.  Start from the sandwich-based bracket, widen it
    geometrically if needed, then Newton with bisection fallback until
    |g - 1| < 1e-12.
    """
    if spec.family not in SMOOTHED:
        raise UnsupportedSpec(f"implicit_norm is for {SMOOTHED}, not {spec.family}")
    v = _entries(spec, y)
    n = _infer_n(spec, v)
    p = penalty_vector(spec, n)
    P = float(np.sum(p))
    delta = spec.delta
    if P * delta >= 1.0:
        raise DeltaTooLarge(f"P*delta = {P * delta:.4g} >= 1 (P={P}, delta={delta})")
    n_p = float(p @ np.abs(v))
    if n_p == 0.0:
        return 0.0

    def g(N):
        return float(p @ np.sqrt(delta**2 + (v / N) ** 2))

    lo = max(n_p * (1.0 - P * delta), 1e-300)
    hi = n_p * (1.0 + P * delta) + P * delta
    # widen until the root is actually bracketed: g(lo) > 1 > g(hi)
    while g(lo) < 1.0:
        lo *= 0.5
    while g(hi) > 1.0:
        hi *= 2.0

    N = min(max(n_p / (1.0 - P * delta), lo), hi)
    for _ in range(200):
        gN = g(N)
        if abs(gN - 1.0) < _IMPLICIT_TOL:
            return N
        if gN > 1.0:
            lo = N
        else:
            hi = N
        u = v / N
        dg = float(p @ (-(v**2) / N**3 / np.sqrt(delta**2 + u**2)))
        step = (gN - 1.0) / dg if dg != 0 else 0.0
        N_new = N - step
        if not lo < N_new < hi:
            N_new = 0.5 * (lo + hi)
        N = N_new
    raise ArithmeticError("implicit norm solve did not converge")


def norms_batch(spec: MetricSpec, rows: np.ndarray) -> np.ndarray:
    """norm() over the rows of an (m, dim) array in one vectorized pass.

    The smoothed families run a rowwise bracketed Newton; identical results
    to the scalar path (same tolerance), just without the Python loop.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    n = _infer_n(spec, rows[0])
    p = penalty_vector(spec, n)
    if spec.family in (F1, FP):
        return np.abs(rows) @ p
    if spec.family in (F2, FQ):
        return np.sqrt(rows**2 @ p)
    P = float(np.sum(p))
    delta = spec.delta
    if P * delta >= 1.0:
        raise DeltaTooLarge(f"P*delta = {P * delta:.4g} >= 1 (P={P}, delta={delta})")
    n_p = np.abs(rows) @ p
    live = n_p > 0.0
    out = np.zeros(len(rows))
    if not np.any(live):
        return out
    v = rows[live]
    npv = n_p[live]

    def g(N):
        return np.sqrt(delta**2 + (v / N[:, None]) ** 2) @ p

    lo = np.maximum(npv * (1.0 - P * delta), 1e-300)
    hi = npv * (1.0 + P * delta) + P * delta
    for _ in range(200):
        bad = g(lo) < 1.0
        if not np.any(bad):
            break
        lo[bad] *= 0.5
    for _ in range(200):
        bad = g(hi) > 1.0
        if not np.any(bad):
            break
        hi[bad] *= 2.0
    N = np.clip(npv / (1.0 - P * delta), lo, hi)
    for _ in range(100):
        gN = g(N)
        if np.all(np.abs(gN - 1.0) < _IMPLICIT_TOL):
            break
        lo = np.where(gN > 1.0, N, lo)
        hi = np.where(gN < 1.0, N, hi)
        u = v / N[:, None]
        dg = (-(v**2) / N[:, None] ** 3 / np.sqrt(delta**2 + u**2)) @ p
        with np.errstate(divide="ignore", invalid="ignore"):
            N_new = N - (gN - 1.0) / dg
        N = np.where((N_new > lo) & (N_new < hi), N_new, 0.5 * (lo + hi))
    out[live] = N
    return out


def grad_f_squared(spec: MetricSpec, y) -> np.ndarray:
    """Analytic gradient of F^2 (used by the geodesic engine and Euler checks)."""
    v = _entries(spec, y)
    n = _infer_n(spec, v)
    p = penalty_vector(spec, n)
    if spec.family in (F2, FQ):
        return 2.0 * p * v
    if spec.family in (F1, FP):
        raise NotSmoothMetric(f"{spec.family} has no smooth gradient")
    N = implicit_norm(spec, y)
    if N == 0.0:
        raise ZeroVector("gradient undefined at 0")
    u = v / N
    gamma = p * u / np.sqrt(spec.delta**2 + u**2)
    D = float(gamma @ v)
    # grad N = N * gamma / D, so grad N^2 = 2 N^2 gamma / D
    return 2.0 * N**2 * gamma / D


def hessian(spec: MetricSpec, y) -> np.ndarray:
    """H = (1/2) d^2(F^2)/dy dy, strictly positive definite for smooth specs.

    F2 -> identity; Fq -> diag(q).  For the smoothed families, writing
    yhat = y/N, gamma_j = p_j yhat_j / sqrt(delta^2 + yhat_j^2) and
    Gamma_jj = p_j delta^2 / (delta^2 + yhat_j^2)^(3/2):

        N_{,l}  = N gamma_l / D                    with D = sum_j gamma_j y_j
        N_{,lk} = Gamma_ll delta_lk / D
                  - (Gy_l gamma_k + gamma_l Gy_k) / D^2
                  + gamma_l gamma_k S2 / D^3       with Gy = Gamma*y,
                                                        S2 = sum Gamma_jj y_j^2
        H_{lk}  = N N_{,lk} + N_{,l} N_{,k}
    """
    v = _entries(spec, y)
    n = _infer_n(spec, v)
    p = penalty_vector(spec, n)
    if spec.family in (F1, FP):
        raise NotSmoothMetric(f"{spec.family} is not twice differentiable off the axes")
    if spec.family in (F2, FQ):
        if not np.any(v):
            raise ZeroVector("hessian requested at y = 0")
        return np.diag(p)
    N = implicit_norm(spec, y)
    if N == 0.0:
        raise ZeroVector("hessian requested at y = 0")
    delta = spec.delta
    u = v / N
    root = np.sqrt(delta**2 + u**2)
    gamma = p * u / root
    Gamma = p * delta**2 / root**3
    D = float(gamma @ v)
    Gy = Gamma * v
    S2 = float(Gamma @ v**2)
    H = np.diag(Gamma) / D
    H -= (np.outer(Gy, gamma) + np.outer(gamma, Gy)) / D**2
    H += np.outer(gamma, gamma) * (S2 + N * D) / D**3
    return N * H


def evaluate(spec: MetricSpec, y, with_gradient=False, with_hessian=False) -> NormEvaluation:
    out = NormEvaluation(value=norm(spec, y))
    if with_gradient:
        out.gradient = grad_f_squared(spec, y)
    if with_hessian:
        out.hessian = hessian(spec, y)
    return out


# ---------------------------------------------------------------------------
# Euler homogeneity diagnostics


def euler_identities_check(spec: MetricSpec, y) -> tuple:
    """Residuals of the three Euler identities for the 2-homogeneous F^2.

    r1 = |grad(F^2) . y - 2 F^2|            (analytic gradient)
    r2 = |y^T d^2(F^2) y - 2 F^2|           (analytic Hessian, d^2 = 2H)
    r3 = max_{k,l} |sum_j d^3_{jkl}(F^2) y_j|  (third derivative by central
         finite differences of H, step 1e-4 * |y|)

    All three vanish for a positively homogeneous norm; residuals materially
    above the finite-difference floor indicate a broken Hessian or solver.
    """
    v = _entries(spec, y)
    F2sq = norm(spec, v) ** 2
    r1 = abs(float(grad_f_squared(spec, v) @ v) - 2.0 * F2sq)
    H = hessian(spec, v)
    r2 = abs(2.0 * float(v @ H @ v) - 2.0 * F2sq)
    h = 1e-4 * float(np.linalg.norm(v))
    r3 = 0.0
    for l in range(len(v)):
        e = np.zeros(len(v))
        e[l] = h
        dH = (hessian(spec, v + e) - hessian(spec, v - e)) / h  # = 2 dH/dy_l
        r3 = max(r3, float(np.max(np.abs(v @ dH))))
    return r1, r2, r3


def metric_equivalence_constants(spec_a: MetricSpec, spec_b: MetricSpec, samples) -> tuple:
    """Empirical (min, max) of norm_b/norm_a over sample vectors.

    `samples` is an array of shape (m, dim) of nonzero vectors; both specs
    must share the basis mode.
    """
    if spec_a.mode != spec_b.mode:
        raise DimensionMismatch("specs on different basis modes")
    ratios = []
    for v in np.asarray(samples, dtype=float):
        a = norm(spec_a, v)
        if a == 0.0:
            raise ZeroVector("sample with zero norm")
        ratios.append(norm(spec_b, v) / a)
    return float(np.min(ratios)), float(np.max(ratios))
