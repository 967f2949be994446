"""Deterministic noncontextual hidden-variable models.

A value assignment ``s`` gives every member of the family a bit (``0`` for
eigenvalue +1) and must satisfy ``s(c) = s(a) + s(b) + beta`` for every
product relation, i.e. ``K s = c``. The assignments form an affine space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import bitlinalg as bl
from .errors import InvariantError, SizeGuardError
from .obsset import ModuleV, ObservableSet
from .phasefn import PhaseFunction, coboundary, from_assignment
from .symgroup import GroupAction

MAX_SWEEP_DIM = 20
MAX_PAIRWISE = 256


@dataclass
class AssignmentSpace:
    """Solution set of ``K s = c``; ``particular is None`` means it is empty."""

    particular: Optional[np.ndarray]
    kernel: list[np.ndarray]
    length: int

    @property
    def empty(self) -> bool:
        return self.particular is None

    @property
    def dim(self) -> int:
        return -1 if self.empty else len(self.kernel)

    @property
    def size(self) -> int:
        return 0 if self.empty else 1 << len(self.kernel)

    def elements(self, max_dim: int = MAX_SWEEP_DIM) -> np.ndarray:
        if self.empty:
            return np.zeros((0, self.length), dtype=np.uint8)
        if self.dim > max_dim:
            raise SizeGuardError(f"assignment space has 2^{self.dim} members; limit is 2^{max_dim}")
        return bl.span(self.kernel, self.length) ^ self.particular[None, :]

    def contains(self, s) -> bool:
        if self.empty:
            return False
        return bl.in_span(bl.as_bits(s, 1) ^ self.particular, self.kernel)


def enumerate_assignments(obs: ObservableSet) -> AssignmentSpace:
    cs = obs.constraint_system
    sol = bl.solve_affine(cs.K, cs.c)
    if sol is None:
        return AssignmentSpace(None, [], obs.size)
    return AssignmentSpace(sol[0], sol[1], obs.size)


def act_on_assignment(action: GroupAction, g: int, s) -> np.ndarray:
    """``g(s) = s . g^{-1}``."""
    s = bl.as_bits(s, 1)
    return s[list(action.inverse_element(g).perm)]


@dataclass
class Lemma1Report:
    closed_under_group: bool
    differences_in_V: bool
    checked_assignments: int

    @property
    def holds(self) -> bool:
        return self.closed_under_group and self.differences_in_V


def check_lemma1(space: AssignmentSpace, action: GroupAction, V: ModuleV, max_dim: int = 12) -> Lemma1Report:
    """Exhaustive check that G preserves consistency and that assignments differ by elements of V."""
    if space.empty:
        raise InvariantError("assignment space is empty")
    S = space.elements(max_dim)
    closed = all(space.contains(act_on_assignment(action, g, s)) for s in S for g in range(action.order))
    if len(S) <= MAX_PAIRWISE:
        diffs = all(V.contains(S[i] ^ S[j]) for i in range(len(S)) for j in range(i + 1, len(S)))
    else:
        # V is a subspace, so differences to a fixed member suffice
        diffs = all(V.contains(s ^ S[0]) for s in S)
    return Lemma1Report(closed, diffs, len(S))


@dataclass
class DeltaResult:
    delta: Optional[int]
    argmin: Optional[np.ndarray]
    group_order: int
    assignments: int
    induced: Optional[np.ndarray] = None  # o_s for the minimiser

    @property
    def classical_bound(self) -> Optional[int]:
        return None if self.delta is None else self.group_order - self.delta


def induced_outputs(S: np.ndarray, action: GroupAction, b_e: int) -> np.ndarray:
    """``o_s(g) = s(g b_e)`` for each row ``s`` of ``S``; shape ``(len(S), |G|)``."""
    cols = action.perm_array()[:, b_e]
    return S[:, cols]


def delta(obs: ObservableSet, action: GroupAction, o: Sequence[int], b_e: int, max_dim: int = MAX_SWEEP_DIM) -> DeltaResult:
    """Minimal Hamming distance between ``o`` and any assignment-induced output function."""
    o = np.asarray(o, dtype=np.uint8) & 1
    if o.shape != (action.order,):
        raise InvariantError("output function must be defined on every group element")
    space = enumerate_assignments(obs)
    if space.empty:
        return DeltaResult(None, None, action.order, 0)
    S = space.elements(max_dim)
    induced = induced_outputs(S, action, b_e)
    dist = (induced ^ o[None, :]).sum(axis=1)
    k = int(np.argmin(dist))
    return DeltaResult(int(dist[k]), S[k].copy(), action.order, len(S), induced[k].copy())


def parity_lower_bound(obs: ObservableSet, action: GroupAction, o: Sequence[int], b_e: int) -> Optional[int]:
    """Lower bound on Delta from the parity of the induced outputs.

    ``sum_g s(g b_e)`` is the same bit for every assignment exactly when the
    indicator of the output indices lies in the row space of ``K``; the bit is
    then the matching combination of ``c``. If it differs from the parity of
    ``o`` every ``o_s`` misses ``o`` somewhere and the bound is 1. Returns
    ``None`` when the parity is not fixed.
    """
    cs = obs.constraint_system
    cols = action.perm_array()[:, b_e]
    w = np.zeros(obs.size, dtype=np.uint8)
    for c in cols:
        w[c] ^= 1
    # s . w is constant over the solution set iff w lies in the row space of K;
    # that constant is read off from the matching combination of c.
    sol = bl.solve_affine(cs.K.T, w)
    if sol is None:
        return None
    const = int(sol[0] @ cs.c.astype(np.int64)) % 2
    return int(const != int(np.sum(np.asarray(o)) % 2))


@dataclass
class ClassicalReduction:
    table: list[int]
    o_prime: np.ndarray
    exact: bool
    evaluator: Callable[[int], int] = field(repr=False, default=None)


def classical_reduction(o: Sequence[int], s, action: GroupAction, b_e: int, obs: Optional[ObservableSet] = None) -> ClassicalReduction:
    """Reduce evaluating ``o`` to evaluating ``o'(g) = s(g b_e)`` plus a lookup table."""
    o = np.asarray(o, dtype=np.uint8) & 1
    s = bl.as_bits(s, 1)
    phi = from_assignment(s, action, obs)
    _, exact = coboundary(phi, action)
    cols = action.perm_array()[:, b_e]
    o_prime = s[cols].astype(np.uint8)
    table = [int(g) for g in np.flatnonzero(o_prime ^ o)]
    members = frozenset(table)

    def evaluator(g: int) -> int:
        return int(s[action.act(g, b_e)]) ^ int(g in members)

    return ClassicalReduction(table, o_prime, exact, evaluator)


class AuditedMemory:
    """Read-only table of ``Phi_r(a)`` for generators ``r`` and measurable ``a``, with access counting."""

    def __init__(self, phi: PhaseFunction, generators: Sequence[int], measurable: Sequence[int]):
        self._cells = {(i, a): int(phi[r][a]) for i, r in enumerate(generators) for a in measurable}
        self.capacity = len(generators) * len(measurable)
        self.reads = 0
        self.touched: set = set()

    def read(self, gen: int, a: int) -> int:
        key = (gen, a)
        if key not in self._cells:
            raise InvariantError(f"memory access outside the stored table: generator {gen}, index {a}")
        self.reads += 1
        self.touched.add(key)
        return self._cells[key]

    @property
    def cells(self) -> int:
        return len(self._cells)


@dataclass
class CoprocessorRun:
    output: int
    memory_cells: int
    memory_bound: int
    reads: int
    element: int


def cc_coprocessor(
    obs: ObservableSet,
    action: GroupAction,
    phi: PhaseFunction,
    word: Sequence[int],
    b_e: int,
    reference_context: Sequence[int],
) -> CoprocessorRun:
    """Evaluate ``Phi_g(b_e)`` for ``g = R[w_k] ... R[w_1]`` using only stored generator values.

    Each step adds ``Phi_{r}(g' b_e) = sum_{a in C(g')} Phi_r(a)`` where ``g'`` is
    the partial product so far; the context ``C(g')`` is obtained by letting
    ``g'`` act on the reference context. Requires ``dPhi = 0``.
    """
    _, exact = coboundary(phi, action)
    if not exact:
        raise InvariantError("phase function is not exact; the generator decomposition does not apply")
    group = action.group
    mem = AuditedMemory(phi, group.generators, obs.measurable)
    acc = 0
    cur = group.identity
    for i in word:
        if not 0 <= i < len(group.generators):
            raise InvariantError(f"word letter {i} is not a generator")
        perm = action.perm(cur)
        for a in reference_context:
            acc ^= mem.read(i, perm[a])
        cur = group.mul(group.generators[i], cur)
    if mem.cells > len(obs.measurable) * len(group.generators):
        raise InvariantError("memory bound exceeded")
    return CoprocessorRun(acc, mem.cells, len(obs.measurable) * len(group.generators), mem.reads, cur)
