"""Group extensions of the input group and their classification by H^2(G, N).

N is the subspace of V invisible to the outputs (zero on the identity and on
every non-measurable member). G acts on N from the right by ``n.h = n o h``
(``(n.h)(a) = n(h a)``), and the full symmetry group E has elements ``(g, n)``
with product

    (g, n)(h, n') = (gh, lambda(g, h) + n.h + n').

Differentials (all signs vanish mod 2):

    (d n)(g, h)          = n_g.h + n_h + n_gh
    (d lam)(g, h, k)     = lam(h, k) + lam(gh, k) + lam(g, hk) + lam(g, h).k

The second formula is exactly the associativity condition of the product
above, so a 2-cochain defines a group iff ``d lam = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import bitlinalg as bl
from .errors import InvariantError, SizeGuardError
from .obsset import ModuleV, ObservableSet
from .phasefn import PhaseFunction, coboundary
from .symgroup import FiniteGroup, GroupAction

MAX_H2_GROUP = 16
MAX_H2_MODULE = 8


@dataclass
class SubgroupN:
    basis: np.ndarray  # (dim N, |A|)
    V: ModuleV = field(repr=False)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def coords(self, n) -> Optional[np.ndarray]:
        return bl.coordinates(n, list(self.basis))

    def vector(self, coords) -> np.ndarray:
        coords = bl.as_bits(coords, 1)
        if self.dim == 0:
            return np.zeros(self.basis.shape[1], dtype=np.uint8)
        return bl.matmul(coords, self.basis)

    def contains(self, n) -> bool:
        return bl.in_span(n, list(self.basis))


def compute_N(obs: ObservableSet, V: ModuleV, action: Optional[GroupAction] = None) -> SubgroupN:
    """Elements of V vanishing on every non-measurable index.

    When an action is given, closure of N under ``n -> n o g`` is checked and
    a violation raises :class:`InvariantError`.
    """
    hidden = [a for a in range(obs.size) if a not in obs.measurable]
    B = V.basis
    if V.dim == 0:
        N = SubgroupN(np.zeros((0, obs.size), dtype=np.uint8), V)
    else:
        M = B[:, hidden].T  # coordinates c with sum_i c_i B_i vanishing on hidden
        ker = bl.kernel(M) if hidden else [row for row in bl.identity(V.dim)]
        rows = [bl.matmul(c, B) for c in ker]
        N = SubgroupN(np.array(rows, dtype=np.uint8).reshape(len(rows), obs.size), V)
    if action is not None:
        for g in range(action.order):
            perm = list(action.perm(g))
            for n in N.basis:
                if not N.contains(n[perm]):
                    raise InvariantError(f"N is not closed under the action of {action.group.names[g]}")
    return N


def module_matrices(action: GroupAction, N: SubgroupN) -> list[np.ndarray]:
    """Right action ``n -> n o g`` on N-coordinates, one matrix per group element."""
    mats = []
    for g in range(action.order):
        perm = list(action.perm(g))
        cols = []
        for n in N.basis:
            c = N.coords(n[perm])
            if c is None:
                raise InvariantError(f"N is not closed under the action of {action.group.names[g]}")
            cols.append(c)
        mats.append(np.array(cols, dtype=np.uint8).T if cols else np.zeros((0, 0), dtype=np.uint8))
    return mats


def trivial_module(group: FiniteGroup, dim: int) -> list[np.ndarray]:
    return [bl.identity(dim) for _ in range(group.order)]


@dataclass
class LambdaCochain:
    values: np.ndarray  # (|G|, |G|, dim N) coordinates in N

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)


def lambda_from_phase(phi: PhaseFunction, action: GroupAction, N: SubgroupN) -> LambdaCochain:
    """``lambda(g, h) = (d Phi)_{g,h}`` expressed in N-coordinates."""
    d, _ = coboundary(phi, action)
    G = action.order
    out = np.zeros((G, G, N.dim), dtype=np.uint8)
    for g in range(G):
        for h in range(G):
            c = N.coords(d[g, h])
            if c is None:
                raise InvariantError(
                    f"lambda({action.group.names[g]}, {action.group.names[h]}) is not in N"
                )
            out[g, h] = c
    return LambdaCochain(out)


def _check_sizes(group: FiniteGroup, m: int) -> None:
    if group.order > MAX_H2_GROUP:
        raise SizeGuardError(f"|G| = {group.order} exceeds the limit {MAX_H2_GROUP}")
    if m > MAX_H2_MODULE:
        raise SizeGuardError(f"dim N = {m} exceeds the limit {MAX_H2_MODULE}")


def d1_matrix(group: FiniteGroup, mats: Sequence[np.ndarray], m: int) -> np.ndarray:
    """Matrix of ``C^1 -> C^2``; index ``(g*m + i)`` for C^1 and ``((g*G + h)*m + i)`` for C^2."""
    G = group.order
    D = np.zeros((G * G * m, G * m), dtype=np.uint8)
    t = group.table
    I = bl.identity(m)
    for g in range(G):
        for h in range(G):
            r = (g * G + h) * m
            D[r:r + m, g * m:(g + 1) * m] ^= mats[h]
            D[r:r + m, h * m:(h + 1) * m] ^= I
            gh = int(t[g, h])
            D[r:r + m, gh * m:(gh + 1) * m] ^= I
    return D


def d2_matrix(group: FiniteGroup, mats: Sequence[np.ndarray], m: int) -> np.ndarray:
    """Matrix of ``C^2 -> C^3``; C^3 index ``((g*G + h)*G + k)*m + i``."""
    G = group.order
    D = np.zeros((G ** 3 * m, G * G * m), dtype=np.uint8)
    t = group.table
    I = bl.identity(m)

    def col(a, b):
        return (a * G + b) * m

    for g in range(G):
        for h in range(G):
            for k in range(G):
                r = ((g * G + h) * G + k) * m
                for c, M in (
                    (col(h, k), I),
                    (col(int(t[g, h]), k), I),
                    (col(g, int(t[h, k])), I),
                    (col(g, h), mats[k]),
                ):
                    D[r:r + m, c:c + m] ^= M
    return D


def apply_d2(group: FiniteGroup, mats: Sequence[np.ndarray], lam: np.ndarray) -> np.ndarray:
    """``d lambda`` evaluated directly, shape ``(|G|, |G|, |G|, m)``."""
    G = group.order
    t = group.table
    out = np.zeros((G, G, G, lam.shape[-1]), dtype=np.uint8)
    for g in range(G):
        for h in range(G):
            for k in range(G):
                v = lam[h, k] ^ lam[int(t[g, h]), k] ^ lam[g, int(t[h, k])]
                if lam.shape[-1]:
                    v = v ^ bl.matmul(mats[k], lam[g, h])
                out[g, h, k] = v
    return out


@dataclass
class H2Result:
    dim: int
    cocycle_basis: list
    coboundary_basis: np.ndarray  # reduced rows spanning im d1
    d1: np.ndarray = field(repr=False)
    d2: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return 1 << self.dim


def h2(group: FiniteGroup, mats: Sequence[np.ndarray], m: int) -> H2Result:
    """``H^2(G, N) = ker d2 / im d1`` over GF(2), by rank arithmetic."""
    _check_sizes(group, m)
    D1 = d1_matrix(group, mats, m)
    D2 = d2_matrix(group, mats, m)
    if bl.matmul(D2, D1).any():
        raise InvariantError("d2 d1 != 0; the module action is not a right action")
    c2 = group.order ** 2 * m
    cocycles = bl.kernel(D2) if c2 else []
    im, pivots = bl.rref(D1.T) if D1.size else (np.zeros((0, c2), dtype=np.uint8), [])
    im = im[: len(pivots)]
    dim = len(cocycles) - len(pivots)
    return H2Result(dim, cocycles, im, D1, D2)


def classify(lam: LambdaCochain, group: FiniteGroup, mats: Sequence[np.ndarray], h2res: Optional[H2Result] = None) -> np.ndarray:
    """Canonical representative of ``[lambda]`` modulo coboundaries (zero iff the class is trivial)."""
    m = lam.values.shape[-1]
    if apply_d2(group, mats, lam.values).any():
        raise InvariantError("lambda is not a cocycle")
    if h2res is None:
        h2res = h2(group, mats, m)
    return bl.reduce_modulo(lam.flat(), list(h2res.coboundary_basis))


def same_class(l1: LambdaCochain, l2: LambdaCochain, group: FiniteGroup, mats, h2res: Optional[H2Result] = None) -> bool:
    return bool(np.array_equal(classify(l1, group, mats, h2res), classify(l2, group, mats, h2res)))


def coboundary_of(n: np.ndarray, group: FiniteGroup, mats: Sequence[np.ndarray]) -> LambdaCochain:
    """``d n`` for a 1-cochain given as ``(|G|, m)`` coordinates."""
    G, m = n.shape
    flat = bl.matmul(d1_matrix(group, mats, m), n.reshape(-1))
    return LambdaCochain(flat.reshape(G, G, m))


@dataclass
class ExtensionGroup:
    group: FiniteGroup
    pairs: list  # element index -> (g, n as int bitmask)
    base: FiniteGroup

    @property
    def order(self) -> int:
        return self.group.order


def build_E(group: FiniteGroup, mats: Sequence[np.ndarray], lam: LambdaCochain) -> ExtensionGroup:
    """The extension of G by N defined by ``lambda``; verifies associativity, normality and the quotient."""
    m = lam.values.shape[-1]
    if m > 16:
        raise SizeGuardError("extension too large to tabulate")
    d = apply_d2(group, mats, lam.values)
    if d.any():
        g, h, k = (int(x) for x in np.argwhere(d.any(axis=-1))[0])
        raise InvariantError(
            f"d lambda != 0 at ({group.names[g]}, {group.names[h]}, {group.names[k]})"
        )
    G = group.order
    nn = 1 << m
    weights = 1 << np.arange(m)
    bits = ((np.arange(nn)[:, None] >> np.arange(m)) & 1).astype(np.uint8)
    # right action on bitmasks, per element
    act = np.array([[int(bl.matmul(mats[h], bits[n]) @ weights) if m else 0 for n in range(nn)] for h in range(G)])
    lam_int = np.array([[int(lam.values[g, h] @ weights) if m else 0 for h in range(G)] for g in range(G)])
    pairs = [(g, n) for g in range(G) for n in range(nn)]
    idx = {p: i for i, p in enumerate(pairs)}
    t = group.table
    table = np.zeros((len(pairs), len(pairs)), dtype=np.int64)
    for i, (g, n) in enumerate(pairs):
        for j, (h, n2) in enumerate(pairs):
            table[i, j] = idx[(int(t[g, h]), int(lam_int[g, h]) ^ int(act[h][n]) ^ n2)]
    # identity of E is (e, lambda(e,e)) since (e, x)(e, x) = (e, lambda(e,e) + x + x)
    ident = idx[(group.identity, int(lam_int[group.identity, group.identity]))]
    zero = int(lam_int[group.identity, group.identity])
    gens = [idx[(r, zero)] for r in group.generators] + [idx[(group.identity, zero ^ (1 << i))] for i in range(m)]
    E = FiniteGroup.from_table(table, gens, [f"({group.names[g]},{n})" for g, n in pairs], ident)
    # N = {(e, n)} is normal and E/N ~ G via (g, n) -> g
    normal = {idx[(group.identity, n)] for n in range(nn)}
    for x in range(len(pairs)):
        xi = E.inverse(x)
        for y in normal:
            if int(table[int(table[x, y]), xi]) not in normal:
                raise InvariantError("N is not normal in E")
    for i, (g, _) in enumerate(pairs):
        for j, (h, _) in enumerate(pairs):
            if pairs[int(table[i, j])][0] != int(t[g, h]):
                raise InvariantError("projection E -> G is not a homomorphism")
    return ExtensionGroup(E, pairs, group)


def n_average(xi, N: SubgroupN) -> np.ndarray:
    """``Xi'(a) = Xi(a)`` where every element of N vanishes at ``a``, and 0 elsewhere."""
    xi = np.asarray(xi, dtype=float).copy()
    if N.dim:
        xi[N.basis.any(axis=0)] = 0.0
    return xi


def parse_module(spec: str, group: FiniteGroup) -> list[np.ndarray]:
    """``trivial:<m>`` gives the trivial action on ``Z_2^m``."""
    kind, _, arg = spec.partition(":")
    if kind == "trivial":
        try:
            m = int(arg)
        except ValueError:
            raise InvariantError(f"bad module spec {spec!r}") from None
        if m < 0:
            raise InvariantError("module dimension must be non-negative")
        return trivial_module(group, m)
    raise InvariantError(f"unknown module spec {spec!r}")
