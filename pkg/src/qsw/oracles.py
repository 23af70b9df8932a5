"""Independent reference solutions for walks on a line and small graphs.

Closed-form infinite-line distributions (Bessel functions computed by
downward recurrence), brute-force classical and Schrodinger solvers via
eigendecomposition, and the total variation distance. Everything here is
kept on a code path disjoint from the evolution module (no superoperators,
no Pade exponentials, no adaptive stepping) so that agreement between the
two routes is a genuine cross-check rather than a tautology.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import GeneratorMatrix

# Rescaling guard for the downward recurrences.
_BIG = 1e250
_SMALL = 1e-250


@dataclass(frozen=True)
class LineWalkSpec:
    """A walk on a finite symmetric line: n_sites odd, hop rate gamma, time t."""

    n_sites: int
    gamma: float
    t: float

    def __post_init__(self):
        if self.n_sites < 3 or self.n_sites % 2 == 0:
            raise ValueError(f"n_sites must be odd and >= 3, got {self.n_sites}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.t < 0:
            raise ValueError(f"t must be nonnegative, got {self.t}")

    @property
    def half_width(self) -> int:
        return (self.n_sites - 1) // 2

    @property
    def positions(self) -> np.ndarray:
        k = self.half_width
        return np.arange(-k, k + 1)


@dataclass(frozen=True)
class LineDistribution:
    """Probability profile over signed line positions.

    probabilities[i] belongs to positions[i]. tail_mass is the probability
    the untruncated (infinite-line) distribution carries beyond the stored
    window; it is reported, never folded back in by renormalization.
    """

    positions: np.ndarray
    probabilities: np.ndarray
    tail_mass: float


def _miller_downward(n_max: int, x: float, sign: float) -> np.ndarray:
    """Unnormalized downward recurrence b_{k-1} = (2k/x) b_k + sign*b_{k+1}.

    sign=-1 gives the ordinary Bessel recurrence, sign=+1 the modified one.
    Starts high enough above max(n_max, x) for 1e-10 accuracy at orders
    up to 100 and arguments up to 40, with overflow rescaling.
    """
    start = max(n_max, int(math.ceil(x))) + int(math.ceil(math.sqrt(40.0 * (n_max + 1)))) + 20
    arr = np.zeros(start + 2)
    arr[start] = _SMALL
    for k in range(start, 0, -1):
        arr[k - 1] = (2.0 * k / x) * arr[k] + sign * arr[k + 1]
        if abs(arr[k - 1]) > _BIG:
            arr *= _SMALL
    return arr


def bessel_j_sequence(n_max: int, x: float) -> np.ndarray:
    """J_n(x) for n = 0..n_max, x >= 0.

    Downward recurrence normalized through J_0(x) + 2*sum_k J_{2k}(x) = 1.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0.0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        return out
    arr = _miller_downward(n_max, x, sign=-1.0)
    norm = arr[0] + 2.0 * arr[2:-1:2].sum()
    return arr[: n_max + 1] / norm


def scaled_bessel_i_sequence(n_max: int, x: float) -> np.ndarray:
    """exp(-x) * I_n(x) for n = 0..n_max, x >= 0.

    Same downward scheme with the modified recurrence, normalized through
    I_0(x) + 2*sum_k I_k(x) = exp(x); dividing by that sum yields the
    exponentially scaled values directly, so nothing overflows.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0.0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        return out
    arr = _miller_downward(n_max, x, sign=+1.0)
    norm = arr[0] + 2.0 * arr[1:-1].sum()
    return arr[: n_max + 1] / norm


def crw_line_analytic(spec: LineWalkSpec) -> LineDistribution:
    """Classical walk on the infinite line, truncated to the requested window.

    p_j(t) = exp(-2 gamma t) * I_|j|(2 gamma t), the exact solution of
    dp_j/dt = gamma (p_{j-1} + p_{j+1} - 2 p_j) from a delta at j = 0.
    """
    x = 2.0 * spec.gamma * spec.t
    seq = scaled_bessel_i_sequence(spec.half_width, x)
    probs = seq[np.abs(spec.positions)]
    return LineDistribution(spec.positions, probs, float(1.0 - probs.sum()))


def qw_line_analytic(spec: LineWalkSpec) -> LineDistribution:
    """Purely Hamiltonian walk on the infinite line, truncated to the window.

    p_j(t) = J_j(2 gamma t)^2; the uniform diagonal of the line Hamiltonian
    contributes only a global phase, so it drops out of the populations.
    """
    x = 2.0 * spec.gamma * spec.t
    seq = bessel_j_sequence(spec.half_width, x)
    probs = seq[np.abs(spec.positions)] ** 2
    return LineDistribution(spec.positions, probs, float(1.0 - probs.sum()))


def classical_master_solve(m: GeneratorMatrix, p0: np.ndarray, t: float) -> np.ndarray:
    """exp(M t) p0 through an eigendecomposition of the symmetric generator.

    Deliberately not the evolution module's exponential: this is the
    reference route. Requires symmetric M (always true for undirected
    graphs) and a normalized p0.
    """
    a = m.entries
    p0 = np.asarray(p0, dtype=float)
    if p0.shape != (m.dim,):
        raise ValueError(f"p0 has shape {p0.shape}, expected ({m.dim},)")
    if abs(p0.sum() - 1.0) > 1e-9:
        raise ValueError("p0 must sum to 1")
    if np.abs(a - a.T).max() > 1e-12:
        raise ValueError("generator must be symmetric for the eigendecomposition route")
    if t < 0:
        raise ValueError("t must be nonnegative")
    w, v = np.linalg.eigh(a)
    return v @ (np.exp(w * t) * (v.T @ p0))


def schrodinger_solve(h, psi0: np.ndarray, t: float) -> np.ndarray:
    """exp(-i H t) psi0 through an eigendecomposition of the Hamiltonian.

    h is a Hamiltonian (or anything with Hermitian .entries); psi0 must be
    normalized. Norm is preserved to machine precision by construction.
    """
    entries = np.asarray(h.entries)
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (entries.shape[0],):
        raise ValueError(f"psi0 has shape {psi0.shape}, expected ({entries.shape[0]},)")
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-10:
        raise ValueError("psi0 must be normalized")
    w, v = np.linalg.eigh(entries)
    return v @ (np.exp(-1j * w * t) * (v.conj().T @ psi0))


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    """Total variation distance (1/2) sum_i |p_i - q_i|."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    return float(0.5 * np.abs(p - q).sum())
