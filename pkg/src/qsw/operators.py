"""Hamiltonians, jump-operator sets, and the transition-rate tensor.

The walk regimes differ only in their operator content, all of it derived
from the classical generator M:

- Hamiltonian H[a, b] = M[a, b] (coherent hopping),
- edge-local jump operators, one per ordered vertex pair with a rate,
- a single global jump operator equal to M entrywise,
- the empty set (purely Hamiltonian walk).

tensor_element evaluates the master equation's transition tensor

    T[(a, alpha), (b, beta)] = delta_(alpha beta) <a|(-iH - K/2)|b>
                             + delta_(a b) <beta|(iH - K/2)|alpha>
                             + sum_k <a|L_k|b><beta|L_k^dag|alpha>

with K = sum_k L_k^dag L_k and the Hamiltonian terms applied exactly once.
axiom_rate evaluates the six closed-form rates a graph-constrained walk
generator exhibits on vertex neighborhoods, and audit_axioms cross-checks
the two element by element over a whole graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import GeneratorMatrix, Graph

EDGE_LOCAL = "edge-local"
GLOBAL = "global"
EMPTY = "empty"
CUSTOM = "custom"


def _frozen_complex(entries) -> np.ndarray:
    arr = np.array(entries, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Hamiltonian:
    """Hermitian dim x dim matrix, units 1/time (hbar = 1)."""

    entries: np.ndarray

    def __post_init__(self):
        arr = _frozen_complex(self.entries)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"Hamiltonian must be square, got shape {arr.shape}")
        if np.abs(arr - arr.conj().T).max() > 1e-14:
            raise ValueError("Hamiltonian must be Hermitian")
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class JumpOperatorSet:
    """Ordered collection of jump operators with a regime tag.

    regime_tag is one of "edge-local", "global", "empty", "custom"; the
    first three are the built-in constructions and carry structural
    guarantees (see the constructor functions), "custom" is user-supplied.
    """

    dim: int
    operators: tuple
    regime_tag: str

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        if self.regime_tag not in (EDGE_LOCAL, GLOBAL, EMPTY, CUSTOM):
            raise ValueError(f"unknown regime tag {self.regime_tag!r}")
        ops = []
        for op in self.operators:
            arr = _frozen_complex(op)
            if arr.shape != (self.dim, self.dim):
                raise ValueError(f"operator shape {arr.shape} does not match dim {self.dim}")
            ops.append(arr)
        object.__setattr__(self, "operators", tuple(ops))

    def overlap_sum(self) -> np.ndarray:
        """K = sum_k L_k^dag L_k (zero matrix for the empty set)."""
        k = np.zeros((self.dim, self.dim), dtype=complex)
        for op in self.operators:
            k += op.conj().T @ op
        return k


def hamiltonian_from_generator(m: GeneratorMatrix) -> Hamiltonian:
    """H with H[a, b] = M[a, b]; requires M symmetric to 1e-12."""
    a = m.entries
    if a.size and np.abs(a - a.T).max() > 1e-12:
        raise ValueError("generator is not symmetric; cannot form a Hermitian Hamiltonian")
    return Hamiltonian((a + a.T) / 2.0)


def edge_jump_operators(m: GeneratorMatrix, amplitude: str = "sqrt") -> JumpOperatorSet:
    """One single-entry operator per ordered pair (a, b) with M[a, b] != 0, a != b.

    amplitude="sqrt" (default) sets the entry to sqrt(M[a, b]) so the
    dissipator's population-transfer rate is exactly the classical rate;
    amplitude="literal" uses M[a, b] itself, which matches only at rate 1.
    """
    if amplitude not in ("sqrt", "literal"):
        raise ValueError(f"amplitude must be 'sqrt' or 'literal', got {amplitude!r}")
    a = m.entries
    ops = []
    for row in range(m.dim):
        for col in range(m.dim):
            if row == col or a[row, col] == 0.0:
                continue
            rate = a[row, col]
            if amplitude == "sqrt":
                if rate < 0:
                    raise ValueError(f"negative off-diagonal rate at ({row}, {col})")
                value = np.sqrt(rate)
            else:
                value = rate
            op = np.zeros((m.dim, m.dim), dtype=complex)
            op[row, col] = value
            ops.append(op)
    return JumpOperatorSet(m.dim, tuple(ops), EDGE_LOCAL)


def global_jump_operator(m: GeneratorMatrix, parts: str = "full") -> JumpOperatorSet:
    """Single operator equal to M entrywise.

    parts="full" (default) keeps the diagonal; parts="offdiagonal" zeroes it.
    """
    if parts not in ("full", "offdiagonal"):
        raise ValueError(f"parts must be 'full' or 'offdiagonal', got {parts!r}")
    op = np.array(m.entries, dtype=complex)
    if parts == "offdiagonal":
        np.fill_diagonal(op, 0.0)
    return JumpOperatorSet(m.dim, (op,), GLOBAL)


def empty_jump_operators(dim: int) -> JumpOperatorSet:
    """The empty set: evolution is then purely Hamiltonian."""
    if dim < 1:
        raise ValueError(f"dim must be positive, got {dim}")
    return JumpOperatorSet(dim, (), EMPTY)


@dataclass(frozen=True)
class TensorElement:
    """One element of a transition tensor: indices and complex value (1/time)."""

    a: int
    alpha: int
    b: int
    beta: int
    value: complex


def _check_index(name: str, value: int, dim: int) -> int:
    value = int(value)
    if not 0 <= value < dim:
        raise IndexError(f"index {name}={value} out of range for dim {dim}")
    return value


def _tensor_value(h_entries, ops, overlap, a, alpha, b, beta) -> complex:
    value = 0.0 + 0.0j
    if alpha == beta:
        value += -1j * h_entries[a, b] - 0.5 * overlap[a, b]
    if a == b:
        value += 1j * h_entries[beta, alpha] - 0.5 * overlap[beta, alpha]
    for op in ops:
        value += op[a, b] * np.conj(op[alpha, beta])
    return complex(value)


def tensor_element(h: Hamiltonian, ls: JumpOperatorSet, a: int, alpha: int, b: int, beta: int) -> TensorElement:
    """The transition tensor element T[(a, alpha), (b, beta)].

    Gives d(rho_{a alpha})/dt = sum_{b beta} T rho_{b beta} at omega = 1 in
    the dissipative part and full weight on the Hamiltonian part, i.e. the
    unweighted generator whose interpolated version the evolution module
    exponentiates. Hamiltonian terms enter once, not once per operator.
    """
    if h.dim != ls.dim:
        raise ValueError(f"dimension mismatch: H is {h.dim}, operators are {ls.dim}")
    a = _check_index("a", a, h.dim)
    alpha = _check_index("alpha", alpha, h.dim)
    b = _check_index("b", b, h.dim)
    beta = _check_index("beta", beta, h.dim)
    value = _tensor_value(h.entries, ls.operators, ls.overlap_sum(), a, alpha, b, beta)
    return TensorElement(a, alpha, b, beta, value)


def _axiom_value(h_entries, ops, overlap, axiom, m, n, l) -> complex:
    jump = 0.0 + 0.0j
    if axiom == 1:
        for op in ops:
            jump += op[m, m] * np.conj(op[m, m])
        return complex(jump - overlap[m, m])
    if axiom == 2:
        for op in ops:
            jump += op[n, m] * np.conj(op[n, m])
        return complex(jump)
    if axiom == 3:
        for op in ops:
            jump += op[m, m] * np.conj(op[n, m])
        return complex(jump + 1j * h_entries[m, n] - 0.5 * overlap[m, n])
    if axiom == 4:
        for op in ops:
            jump += op[m, m] * np.conj(op[n, n])
        return complex(
            jump
            - 1j * h_entries[m, m]
            + 1j * h_entries[n, n]
            - 0.5 * overlap[m, m]
            - 0.5 * overlap[n, n]
        )
    if axiom == 5:
        for op in ops:
            jump += op[l, m] * np.conj(op[n, n])
        return complex(jump - 1j * h_entries[l, m] - 0.5 * overlap[l, m])
    # axiom 6
    for op in ops:
        jump += op[l, m] * np.conj(op[n, m])
    return complex(jump)


def axiom_canonical_indices(axiom: int, m: int, n: int | None, l: int | None) -> tuple[int, int, int, int]:
    """The (a, alpha, b, beta) tensor tuple each axiom formula describes."""
    if axiom == 1:
        return (m, m, m, m)
    if axiom == 2:
        return (n, n, m, m)
    if axiom == 3:
        return (m, n, m, m)
    if axiom == 4:
        return (m, n, m, n)
    if axiom == 5:
        return (l, n, m, n)
    return (l, n, m, m)


def axiom_rate(h: Hamiltonian, ls: JumpOperatorSet, axiom: int, m: int, n: int | None = None, l: int | None = None) -> TensorElement:
    """Closed-form rate for one of the six neighborhood transition axioms.

    1: population m self-rate          T[(m,m),(m,m)]
    2: population transfer m -> n      T[(n,n),(m,m)]
    3: population m -> coherence (m,n) T[(m,n),(m,m)]
    4: coherence (m,n) self-rate       T[(m,n),(m,n)]
    5: coherence (m,n) -> (l,n)        T[(l,n),(m,n)]
    6: population m -> coherence (l,n) T[(l,n),(m,m)]

    Axioms 2-4 need n, axioms 5-6 need l and n, all pairwise distinct from
    m. Conjugate elements follow by Hermiticity of the tensor and are not
    enumerated separately.
    """
    if h.dim != ls.dim:
        raise ValueError(f"dimension mismatch: H is {h.dim}, operators are {ls.dim}")
    if axiom not in (1, 2, 3, 4, 5, 6):
        raise ValueError(f"axiom must be 1..6, got {axiom}")
    m = _check_index("m", m, h.dim)
    if axiom >= 2:
        if n is None:
            raise ValueError(f"axiom {axiom} requires n")
        n = _check_index("n", n, h.dim)
        if n == m:
            raise ValueError("m and n must be distinct")
    if axiom >= 5:
        if l is None:
            raise ValueError(f"axiom {axiom} requires l")
        l = _check_index("l", l, h.dim)
        if l == m or l == n:
            raise ValueError("l, m, n must be pairwise distinct")
    value = _axiom_value(h.entries, ls.operators, ls.overlap_sum(), axiom, m, n, l)
    return TensorElement(*axiom_canonical_indices(axiom, m, n, l), value)


@dataclass(frozen=True)
class AuditFailure:
    kind: str
    indices: tuple
    deviation: float

    def to_dict(self) -> dict:
        return {"kind": self.kind, "indices": list(self.indices), "deviation": self.deviation}


@dataclass(frozen=True)
class AxiomAuditReport:
    """Outcome of cross-checking the axiom formulas against the tensor.

    max_formula_deviation covers the axiom-vs-tensor comparisons over all
    vertex neighborhoods (conjugate tuples included). Non-adjacent
    population-transfer elements must vanish identically in every regime;
    full move-locality (every index motion follows an edge) is a theorem
    only for the edge-local and empty sets, and is checked there.
    """

    regime: str
    dim: int
    tol: float
    tuples_evaluated: int
    comparisons: int
    max_formula_deviation: float
    max_hermiticity_deviation: float
    max_nonadjacent_transfer: float
    move_locality_checked: bool
    max_nonlocal_element: float
    axiom6_max_abs: float
    axiom6_nonzero: tuple
    failures: tuple
    passed: bool

    def to_dict(self) -> dict:
        return {
            "regime": self.regime,
            "dim": self.dim,
            "tol": self.tol,
            "tuples_evaluated": self.tuples_evaluated,
            "comparisons": self.comparisons,
            "max_formula_deviation": self.max_formula_deviation,
            "max_hermiticity_deviation": self.max_hermiticity_deviation,
            "max_nonadjacent_transfer": self.max_nonadjacent_transfer,
            "move_locality_checked": self.move_locality_checked,
            "max_nonlocal_element": self.max_nonlocal_element,
            "axiom6_max_abs": self.axiom6_max_abs,
            "axiom6_nonzero": [list(item) for item in self.axiom6_nonzero],
            "failures": [f.to_dict() for f in self.failures],
            "passed": self.passed,
        }


def audit_axioms(h: Hamiltonian, ls: JumpOperatorSet, g: Graph, tol: float = 1e-10) -> AxiomAuditReport:
    """Verify the axiom formulas against the full transition tensor.

    Evaluates every tensor element of the graph (dim^4 tuples) and checks:

    - each axiom formula equals its tensor element on every applicable
      neighborhood tuple, and the conjugate tuple equals the conjugate;
    - the tensor is Hermitian as a map: T(a,alpha,b,beta) agrees with
      conj(T(alpha,a,beta,b)) everywhere;
    - population transfer between non-adjacent vertices is exactly zero;
    - for the edge-local and empty sets, any element that moves an index
      off an edge is exactly zero (the global set provably spills to
      distance two through its L^dag L term, so it is exempt);
    - axiom 6 activity is reported with its nonzero tuples.
    """
    dim = g.n_vertices
    if h.dim != dim or ls.dim != dim:
        raise ValueError("Hamiltonian, operators and graph dimensions must agree")
    adjacency = g.weight_matrix() != 0
    h_entries = h.entries
    ops = ls.operators
    overlap = ls.overlap_sum()

    tensor = np.empty((dim, dim, dim, dim), dtype=complex)
    for a in range(dim):
        for alpha in range(dim):
            for b in range(dim):
                for beta in range(dim):
                    tensor[a, alpha, b, beta] = _tensor_value(h_entries, ops, overlap, a, alpha, b, beta)

    failures = []
    comparisons = 0
    max_formula_dev = 0.0

    def compare(axiom, m, n, l):
        nonlocal comparisons, max_formula_dev
        indices = axiom_canonical_indices(axiom, m, n, l)
        formula = _axiom_value(h_entries, ops, overlap, axiom, m, n, l)
        for idx, expected in (
            (indices, formula),
            ((indices[1], indices[0], indices[3], indices[2]), np.conj(formula)),
        ):
            dev = abs(tensor[idx] - expected)
            comparisons += 1
            max_formula_dev = max(max_formula_dev, dev)
            if dev > tol:
                failures.append(AuditFailure(f"axiom-{axiom}", idx, dev))

    axiom6_max = 0.0
    axiom6_nonzero = []
    for m in range(dim):
        compare(1, m, None, None)
        neighbors = g.neighbors(m)
        for n in neighbors:
            compare(2, m, n, None)
            compare(3, m, n, None)
            compare(4, m, n, None)
            for l in neighbors:
                if l == n:
                    continue
                compare(5, m, n, l)
                compare(6, m, n, l)
                strength = abs(_axiom_value(h_entries, ops, overlap, 6, m, n, l))
                axiom6_max = max(axiom6_max, strength)
                if strength > tol:
                    axiom6_nonzero.append((l, n, m, strength))

    herm_dev = float(np.abs(tensor - np.conj(tensor.transpose(1, 0, 3, 2))).max())
    if herm_dev > tol:
        failures.append(AuditFailure("hermiticity", (), herm_dev))

    max_transfer = 0.0
    for a in range(dim):
        for b in range(dim):
            if a != b and not adjacency[a, b]:
                value = abs(tensor[a, a, b, b])
                max_transfer = max(max_transfer, value)
                if value != 0.0:
                    failures.append(AuditFailure("non-adjacent-transfer", (a, a, b, b), value))

    move_locality = ls.regime_tag in (EDGE_LOCAL, EMPTY)
    max_nonlocal = 0.0
    if move_locality:
        for a in range(dim):
            for alpha in range(dim):
                for b in range(dim):
                    for beta in range(dim):
                        ket_moves_off_edge = a != b and not adjacency[a, b]
                        bra_moves_off_edge = alpha != beta and not adjacency[alpha, beta]
                        if ket_moves_off_edge or bra_moves_off_edge:
                            value = abs(tensor[a, alpha, b, beta])
                            max_nonlocal = max(max_nonlocal, value)
                            if value != 0.0:
                                failures.append(AuditFailure("nonlocal-element", (a, alpha, b, beta), value))

    return AxiomAuditReport(
        regime=ls.regime_tag,
        dim=dim,
        tol=float(tol),
        tuples_evaluated=dim**4,
        comparisons=comparisons,
        max_formula_deviation=max_formula_dev,
        max_hermiticity_deviation=herm_dev,
        max_nonadjacent_transfer=max_transfer,
        move_locality_checked=move_locality,
        max_nonlocal_element=max_nonlocal,
        axiom6_max_abs=axiom6_max,
        axiom6_nonzero=tuple(axiom6_nonzero),
        failures=tuple(failures),
        passed=not failures,
    )
