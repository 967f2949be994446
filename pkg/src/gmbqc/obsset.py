"""Indexed observable families, their product constraints, and the module V.

An :class:`ObservableSet` holds the identity (always index 0), the measurable
observables, the output observables and any other members, in that canonical
order. Product relations among commuting members become rows of a GF(2)
constraint matrix ``K``; value assignments solve ``K s = c`` and the sign-flip
module ``V`` is ``ker K``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from . import bitlinalg as bl
from .errors import InvariantError
from .pauli import Pauli, commutes, multiply, product

ObsLike = Union[Pauli, str]


def _as_pauli(p: ObsLike) -> Pauli:
    return p if isinstance(p, Pauli) else Pauli.parse(p)


@dataclass(frozen=True)
class Relation:
    """``T_product = (-1)^beta * prod(T_f for f in factors)`` with commuting factors."""

    factors: tuple[int, ...]
    product: int
    beta: int

    @property
    def support(self) -> frozenset[int]:
        # indices appearing an odd number of times
        odd: set[int] = set()
        for i in (*self.factors, self.product):
            odd ^= {i}
        return frozenset(odd)

    def row(self, n: int) -> np.ndarray:
        r = np.zeros(n, dtype=np.uint8)
        for i in self.support:
            r[i] = 1
        return r


@dataclass(frozen=True)
class ObservableSet:
    observables: tuple[Pauli, ...]
    measurable: tuple[int, ...]
    outputs: tuple[int, ...]
    contexts: tuple[tuple[int, ...], ...] = ()
    _lookup: dict = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_lookup", {p: i for i, p in enumerate(self.observables)})

    @classmethod
    def build(
        cls,
        observables: Optional[Iterable[ObsLike]] = None,
        measurable: Iterable[ObsLike] = (),
        outputs: Iterable[ObsLike] = (),
        contexts: Iterable[Iterable[ObsLike]] = (),
    ) -> "ObservableSet":
        """Validate and canonically order an observable family.

        Order is identity, measurable (as given), outputs (as given, skipping
        ones already listed as measurable), then the remaining observables in
        their given order. When ``observables`` is omitted the family is the
        identity plus the measurable and output lists.
        """
        meas = [_as_pauli(p) for p in measurable]
        outs = [_as_pauli(p) for p in outputs]
        if observables is None:
            given = meas + outs
            n = given[0].n_qubits if given else 1
            given = [Pauli.identity(n)] + given
            # duplicates between measurable and outputs are allowed here
            seen: list[Pauli] = []
            for p in given:
                if p not in seen:
                    seen.append(p)
            given = seen
        else:
            given = [_as_pauli(p) for p in observables]
        if not given:
            raise InvariantError("empty observable set")
        n = given[0].n_qubits
        if any(p.n_qubits != n for p in given):
            raise InvariantError("observables act on different numbers of qubits")
        if len(set(given)) != len(given):
            dup = next(p for p in given if given.count(p) > 1)
            raise InvariantError(f"duplicate observable {dup}")
        unsigned = [p.unsigned for p in given]
        if len(set(unsigned)) != len(unsigned):
            dup = next(p for p in given if unsigned.count(p.unsigned) > 1)
            raise InvariantError(f"both {dup} and {-dup} present")
        ident = Pauli.identity(n)
        if ident not in given:
            raise InvariantError("identity +I missing from observable set")
        for p in meas + outs:
            if p not in given:
                raise InvariantError(f"{p} is not a member of the observable set")
        order: list[Pauli] = [ident]
        for p in meas + outs + given:
            if p not in order:
                order.append(p)
        lookup = {p: i for i, p in enumerate(order)}
        if ident in meas:
            raise InvariantError("the identity cannot be a measurable observable")
        ctx = tuple(tuple(lookup[_as_pauli(p)] for p in c) for c in contexts)
        obj = cls(
            observables=tuple(order),
            measurable=tuple(lookup[p] for p in meas),
            outputs=tuple(lookup[p] for p in outs),
            contexts=ctx,
        )
        obj._check_contexts()
        return obj

    def with_contexts(self, contexts: Iterable[Sequence[int]]) -> "ObservableSet":
        """Copy with additional multi-factor relations (given by member indices)."""
        merged = list(self.contexts)
        for c in contexts:
            c = tuple(int(i) for i in c)
            if c not in merged and tuple(sorted(c)) not in [tuple(sorted(m)) for m in merged]:
                merged.append(c)
        obj = ObservableSet(self.observables, self.measurable, self.outputs, tuple(merged))
        obj._check_contexts()
        return obj

    def _check_contexts(self) -> None:
        for c in self.contexts:
            if len(c) == 0:
                raise InvariantError("empty context")
            for i in c:
                if not 0 <= i < self.size:
                    raise InvariantError(f"context index {i} out of range")
            for x in range(len(c)):
                for y in range(x + 1, len(c)):
                    if not commutes(self.observables[c[x]], self.observables[c[y]]):
                        raise InvariantError(
                            f"context members {self.observables[c[x]]} and "
                            f"{self.observables[c[y]]} do not commute"
                        )
            self.context_relation(c)

    @property
    def size(self) -> int:
        return len(self.observables)

    @property
    def n_qubits(self) -> int:
        return self.observables[0].n_qubits

    def index(self, p: ObsLike) -> int:
        p = _as_pauli(p)
        try:
            return self._lookup[p]
        except KeyError:
            raise KeyError(f"{p} not in observable set") from None

    def signed_index(self, p: Pauli) -> Optional[tuple[int, int]]:
        """``(a, sign)`` with ``p == (-1)^sign T_a``, or ``None`` if ``±p`` is absent."""
        i = self._lookup.get(p)
        if i is not None:
            return i, 0
        i = self._lookup.get(-p)
        if i is not None:
            return i, 1
        return None

    def context_relation(self, factors: Sequence[int]) -> Relation:
        phase, prod = product([self.observables[i] for i in factors])
        hit = self.signed_index(prod)
        if hit is None:
            raise InvariantError(
                f"product of context {[str(self.observables[i]) for i in factors]} is not in the set"
            )
        if abs(phase.imag) > 1e-12:
            raise InvariantError("context product is not Hermitian")
        c, flip = hit
        # T_c = (-1)^flip * prod and prod = phase * (...)
        beta = flip ^ int(phase.real < 0)
        return Relation(tuple(factors), c, beta)

    def labels(self) -> list[str]:
        return [str(p) for p in self.observables]

    @cached_property
    def constraint_system(self) -> "ConstraintSystem":
        return constraints(self)


@dataclass(frozen=True)
class ConstraintSystem:
    relations: tuple[Relation, ...]
    K: np.ndarray
    c: np.ndarray

    @property
    def triples(self) -> list[tuple[int, int, int, int]]:
        return [(r.factors[0], r.factors[1], r.product, r.beta) for r in self.relations if len(r.factors) == 2]

    @property
    def n_rows(self) -> int:
        return self.K.shape[0]

    def row_index(self) -> dict[frozenset, int]:
        return {r.support: i for i, r in enumerate(self.relations)}


def constraints(obs: ObservableSet) -> ConstraintSystem:
    """All product relations among commuting members, one row per distinct support.

    Binary relations ``T_c = ±T_a T_b`` (``a < b``) are found by exhaustive
    scan in lexicographic ``(a, b)`` order; the set's explicit contexts then
    contribute their multi-factor relations. Relations with identical support
    are the same GF(2) equation (with the same sign), so only the first is kept.
    """
    n = obs.size
    rels: list[Relation] = []
    seen: set[frozenset] = set()

    def add(rel: Relation) -> None:
        if rel.support in seen:
            return
        seen.add(rel.support)
        rels.append(rel)

    if n == 1:
        add(Relation((0, 0), 0, 0))
    for a in range(n):
        pa = obs.observables[a]
        for b in range(a + 1, n):
            pb = obs.observables[b]
            if not commutes(pa, pb):
                continue
            phase, prod = multiply(pa, pb)
            hit = obs.signed_index(prod)
            if hit is None:
                continue
            c, flip = hit
            add(Relation((a, b), c, flip ^ int(phase.real < 0)))
    for ctx in obs.contexts:
        if len(ctx) >= 2:
            add(obs.context_relation(ctx))
    K = bl.from_rows([r.row(n) for r in rels], n)
    c = np.array([r.beta for r in rels], dtype=np.uint8)
    return ConstraintSystem(tuple(rels), K, c)


@dataclass(frozen=True)
class ModuleV:
    """The GF(2) space of sign flips preserving every product relation."""

    basis: np.ndarray  # shape (dim, |A|)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def length(self) -> int:
        return self.basis.shape[1]

    @property
    def order(self) -> int:
        return 1 << self.dim

    def vector(self, coords) -> np.ndarray:
        coords = bl.as_bits(coords, 1)
        if coords.shape[0] != self.dim:
            raise ValueError("coordinate length does not match dim V")
        return bl.matmul(coords, self.basis) if self.dim else np.zeros(self.length, dtype=np.uint8)

    def coords(self, v) -> Optional[np.ndarray]:
        return bl.coordinates(v, list(self.basis))

    def contains(self, v) -> bool:
        return bl.in_span(v, list(self.basis))

    def elements(self) -> np.ndarray:
        """All members; row ``k`` has V-coordinates given by the bits of ``k``."""
        return bl.span(list(self.basis), self.length)

    def coord_table(self) -> np.ndarray:
        k = np.arange(self.order)
        return ((k[:, None] >> np.arange(self.dim)) & 1).astype(np.uint8)


def compute_V(obs: ObservableSet) -> ModuleV:
    cs = obs.constraint_system
    return ModuleV(bl.kernel_matrix(cs.K))


def check_separation(obs: ObservableSet, V: ModuleV) -> bool:
    """True iff every pair of distinct indices is told apart by some ``v`` in V."""
    cols = {tuple(V.basis[:, a]) for a in range(obs.size)}
    return len(cols) == obs.size


def separation_failures(obs: ObservableSet, V: ModuleV) -> list[tuple[int, int]]:
    seen: dict[tuple, int] = {}
    bad = []
    for a in range(obs.size):
        key = tuple(V.basis[:, a])
        if key in seen:
            bad.append((seen[key], a))
        else:
            seen[key] = a
    return bad
