"""Finite groups acting on observable indices by signed permutations.

A group element ``g`` is recorded through its conjugation action on the
observable family: ``u(g) T_a u(g)^dagger = (-1)^{signs[a]} T_{perm[a]}``.
Projective phases of ``u`` never show up in this action and are dropped.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InvariantError, SizeGuardError
from .obsset import ModuleV, ObservableSet
from .pauli import conjugate

MAX_GROUP_ORDER = 4096

Circuit = tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class SignedPerm:
    perm: tuple[int, ...]
    signs: tuple[int, ...]

    @classmethod
    def identity(cls, n: int) -> "SignedPerm":
        return cls(tuple(range(n)), (0,) * n)

    @classmethod
    def from_arrays(cls, perm, signs=None) -> "SignedPerm":
        perm = tuple(int(p) for p in perm)
        signs = (0,) * len(perm) if signs is None else tuple(int(s) & 1 for s in signs)
        if sorted(perm) != list(range(len(perm))):
            raise InvariantError(f"not a permutation: {perm}")
        if len(signs) != len(perm):
            raise InvariantError("signs and perm have different lengths")
        return cls(perm, signs)

    def __len__(self) -> int:
        return len(self.perm)

    def compose(self, other: "SignedPerm") -> "SignedPerm":
        """``self . other``: apply ``other`` first."""
        perm = tuple(self.perm[p] for p in other.perm)
        signs = tuple(s ^ self.signs[p] for s, p in zip(other.signs, other.perm))
        return SignedPerm(perm, signs)

    def inverse(self) -> "SignedPerm":
        n = len(self.perm)
        perm = [0] * n
        signs = [0] * n
        for a, (p, s) in enumerate(zip(self.perm, self.signs)):
            perm[p] = a
            signs[p] = s
        return SignedPerm(tuple(perm), tuple(signs))

    @property
    def is_identity(self) -> bool:
        return self.perm == tuple(range(len(self.perm))) and not any(self.signs)

    def perm_matrix(self) -> np.ndarray:
        """``P`` with ``(P s)(a) = s(perm[a])``."""
        n = len(self.perm)
        P = np.zeros((n, n), dtype=np.uint8)
        P[np.arange(n), list(self.perm)] = 1
        return P


@dataclass
class FiniteGroup:
    """Multiplication table plus generator words.

    ``words[g]`` is a tuple of generator positions ``(i_1, ..., i_k)`` with
    ``g = R[i_k] ... R[i_1]``.
    """

    table: np.ndarray
    generators: tuple[int, ...]
    words: tuple[tuple[int, ...], ...]
    names: tuple[str, ...] = ()
    identity: int = 0

    def __post_init__(self):
        self.table = np.asarray(self.table, dtype=np.int64)
        if not self.names:
            self.names = tuple(f"g{i}" for i in range(self.order))

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def mul(self, g: int, h: int) -> int:
        return int(self.table[g, h])

    def inverse(self, g: int) -> int:
        return int(np.flatnonzero(self.table[g] == self.identity)[0])

    def from_word(self, word: Sequence[int]) -> int:
        g = self.identity
        for i in word:
            g = self.mul(self.generators[i], g)
        return g

    def check_axioms(self) -> None:
        n = self.order
        t = self.table
        e = self.identity
        if not (np.array_equal(t[e], np.arange(n)) and np.array_equal(t[:, e], np.arange(n))):
            raise InvariantError("identity element does not act trivially")
        for g in range(n):
            if sorted(t[g]) != list(range(n)) or sorted(t[:, g]) != list(range(n)):
                raise InvariantError("table is not a Latin square")
        if n <= 64:
            left = t[t[:, :, None], np.arange(n)[None, None, :]]
            right = t[np.arange(n)[:, None, None], t[None, :, :]]
            if not np.array_equal(left, right):
                raise InvariantError("multiplication is not associative")

    @classmethod
    def from_table(cls, table, generators: Sequence[int], names: Sequence[str] = (), identity: int = 0):
        table = np.asarray(table, dtype=np.int64)
        words = _bfs_words(table, list(generators), identity)
        grp = cls(table, tuple(generators), words, tuple(names), identity)
        grp.check_axioms()
        return grp

    @classmethod
    def trivial(cls) -> "FiniteGroup":
        return cls(np.zeros((1, 1), dtype=np.int64), (), ((),), ("e",))

    @classmethod
    def abelian(cls, orders: Sequence[int]) -> "FiniteGroup":
        """Direct product of cyclic groups, elements in mixed-radix order."""
        orders = list(orders)
        elems = list(itertools.product(*[range(k) for k in orders]))
        if len(elems) > MAX_GROUP_ORDER:
            raise SizeGuardError(f"group order {len(elems)} exceeds cap {MAX_GROUP_ORDER}")
        index = {e: i for i, e in enumerate(elems)}
        table = np.zeros((len(elems), len(elems)), dtype=np.int64)
        for i, a in enumerate(elems):
            for j, b in enumerate(elems):
                table[i, j] = index[tuple((x + y) % k for x, y, k in zip(a, b, orders))]
        gens = []
        for pos in range(len(orders)):
            unit = tuple(int(q == pos) for q in range(len(orders)))
            gens.append(index[unit])
        if all(k < 10 for k in orders):
            names = ["".join(str(x) for x in e) or "e" for e in elems]
        else:
            names = [",".join(str(x) for x in e) or "e" for e in elems]
        return cls.from_table(table, gens, names)

    @classmethod
    def parse(cls, spec: str) -> "FiniteGroup":
        """``"Z2"``, ``"Z2xZ2"``, ``"Z2^3"``, ``"Z2xZ4"``, ``"trivial"``."""
        spec = spec.strip().replace(" ", "")
        if spec in ("trivial", "1", "e"):
            return cls.trivial()
        orders: list[int] = []
        for part in spec.split("x"):
            if not part.startswith("Z"):
                raise InvariantError(f"cannot parse group spec {spec!r}")
            body = part[1:]
            base, _, power = body.partition("^")
            try:
                k = int(base)
                reps = int(power) if power else 1
            except ValueError:
                raise InvariantError(f"cannot parse group spec {spec!r}") from None
            if k < 1 or reps < 0:
                raise InvariantError(f"cannot parse group spec {spec!r}")
            orders.extend([k] * reps)
        return cls.abelian(orders)


def _bfs_words(table: np.ndarray, generators: list[int], identity: int) -> tuple[tuple[int, ...], ...]:
    n = table.shape[0]
    words: list[Optional[tuple[int, ...]]] = [None] * n
    words[identity] = ()
    queue = deque([identity])
    while queue:
        g = queue.popleft()
        for i, r in enumerate(generators):
            h = int(table[r, g])
            if words[h] is None:
                words[h] = words[g] + (i,)
                queue.append(h)
    if any(w is None for w in words):
        raise InvariantError("generators do not generate the whole group")
    return tuple(words)  # type: ignore[arg-type]


@dataclass
class GroupAction:
    """A finite group together with its signed-permutation action on indices."""

    group: FiniteGroup
    elements: tuple[SignedPerm, ...]
    generator_circuits: Optional[tuple[Circuit, ...]] = None
    _inv_perm: list = field(default=None, repr=False)

    def __post_init__(self):
        self._inv_perm = [e.inverse() for e in self.elements]

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def size(self) -> int:
        return len(self.elements[0])

    def perm(self, g: int) -> tuple[int, ...]:
        return self.elements[g].perm

    def signs(self, g: int) -> tuple[int, ...]:
        return self.elements[g].signs

    def act(self, g: int, a: int) -> int:
        return self.elements[g].perm[a]

    def perm_array(self) -> np.ndarray:
        """``(|G|, |A|)`` integer array with ``[g, a] = ga``."""
        return np.array([e.perm for e in self.elements], dtype=np.int64)

    def inverse_element(self, g: int) -> SignedPerm:
        return self._inv_perm[g]

    def circuit(self, g: int) -> Optional[Circuit]:
        if self.generator_circuits is None:
            return None
        out: list[tuple[str, int]] = []
        for i in self.group.words[g]:
            out.extend(self.generator_circuits[i])
        return tuple(out)

    def check_homomorphism(self) -> None:
        t = self.group.table
        for g in range(self.order):
            for h in range(self.order):
                if self.elements[g].compose(self.elements[h]) != self.elements[int(t[g, h])]:
                    raise InvariantError(
                        f"action is not a homomorphism at ({self.group.names[g]}, {self.group.names[h]})"
                    )


def action_from_circuit(obs: ObservableSet, circuit: Sequence[tuple[str, int]]) -> SignedPerm:
    """Signed permutation induced on ``obs`` by conjugation with a gate circuit."""
    perm, signs = [], []
    for p in obs.observables:
        img = conjugate(p, circuit)
        hit = obs.signed_index(img)
        if hit is None:
            raise InvariantError(f"conjugating {p} gives {img}, which is outside ±Ω")
        perm.append(hit[0])
        signs.append(hit[1])
    return SignedPerm.from_arrays(perm, signs)


def generate(
    generators: Sequence[SignedPerm],
    names: Optional[Sequence[str]] = None,
    circuits: Optional[Sequence[Sequence[tuple[str, int]]]] = None,
    size: Optional[int] = None,
    cap: int = MAX_GROUP_ORDER,
) -> GroupAction:
    """Close a set of generator actions into a group.

    Elements are discovered breadth-first: each known element is multiplied
    on the left by the generators in the given order. Element names are the
    generator words (``"e"`` for the identity).
    """
    if size is None:
        if not generators:
            raise InvariantError("need the index-set size when there are no generators")
        size = len(generators[0])
    for g in generators:
        if len(g) != size:
            raise InvariantError("generator actions have inconsistent lengths")
    ident = SignedPerm.identity(size)
    elems = [ident]
    words: list[tuple[int, ...]] = [()]
    index = {ident: 0}
    queue = deque([0])
    while queue:
        k = queue.popleft()
        for i, r in enumerate(generators):
            new = r.compose(elems[k])
            if new not in index:
                if len(elems) >= cap:
                    raise SizeGuardError(f"group generation exceeded cap of {cap} elements")
                index[new] = len(elems)
                elems.append(new)
                words.append(words[k] + (i,))
                queue.append(index[new])
    n = len(elems)
    table = np.zeros((n, n), dtype=np.int64)
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            table[i, j] = index[a.compose(b)]
    gen_idx = tuple(index[r] for r in generators)
    gnames = list(names) if names is not None else [f"r{i}" for i in range(len(generators))]
    elem_names = tuple("e" if not w else "*".join(gnames[i] for i in reversed(w)) for w in words)
    group = FiniteGroup(table, gen_idx, tuple(words), elem_names)
    return GroupAction(group, tuple(elems), tuple(tuple(map(tuple, c)) for c in circuits) if circuits else None)


def from_homomorphism(
    group: FiniteGroup,
    generator_actions: Sequence[SignedPerm],
    circuits: Optional[Sequence[Sequence[tuple[str, int]]]] = None,
) -> GroupAction:
    """Action of an abstract group given by images of its generators.

    The image of every element is computed along its generator word and the
    result is checked against the multiplication table, so a relation that
    the generator images violate is reported rather than silently ignored.
    """
    if len(generator_actions) != len(group.generators):
        raise InvariantError("one action per group generator required")
    size = len(generator_actions[0]) if generator_actions else None
    if size is None:
        raise InvariantError("cannot infer index-set size without generators")
    elems = []
    for w in group.words:
        acc = SignedPerm.identity(size)
        for i in w:
            acc = generator_actions[i].compose(acc)
        elems.append(acc)
    act = GroupAction(group, tuple(elems), tuple(tuple(map(tuple, c)) for c in circuits) if circuits else None)
    act.check_homomorphism()
    return act


def trivial_action(size: int) -> GroupAction:
    return GroupAction(FiniteGroup.trivial(), (SignedPerm.identity(size),), ((),))


def check_input_group(action: GroupAction) -> bool:
    """True iff every element maps the family onto itself without sign flips."""
    return all(not any(e.signs) for e in action.elements)


def module_action(action: GroupAction, g: int, v, V: Optional[ModuleV] = None) -> np.ndarray:
    """``g(v) = v . g^{-1}``, i.e. ``g(v)(a) = v(g^{-1} a)``."""
    v = np.asarray(v, dtype=np.uint8)
    if V is not None and not V.contains(v):
        raise InvariantError("vector is not in V")
    inv = action.inverse_element(g).perm
    return v[list(inv)].copy()


def module_matrix(action: GroupAction, g: int, V: ModuleV) -> np.ndarray:
    """Matrix ``S_g`` of ``v -> g(v)`` in V-coordinates (columns are images of basis vectors)."""
    cols = []
    for b in V.basis:
        img = module_action(action, g, b)
        c = V.coords(img)
        if c is None:
            raise InvariantError(f"g(v) left V for element {action.group.names[g]}")
        cols.append(c)
    if not cols:
        return np.zeros((0, 0), dtype=np.uint8)
    return np.array(cols, dtype=np.uint8).T


def beta_invariant(obs: ObservableSet, action: GroupAction) -> bool:
    """Check ``beta(a, b) = beta(g^{-1}a, g^{-1}b)`` over all binary relations and elements."""
    cs = obs.constraint_system
    rows = {r.support: r.beta for r in cs.relations}
    for g in range(action.order):
        e = action.elements[g]
        for r in cs.relations:
            img = frozenset(e.perm[i] for i in r.support)
            if img not in rows:
                return False
            if rows[img] != r.beta ^ (sum(e.signs[i] for i in r.support) & 1):
                return False
    return True
