"""Phase functions as V-valued 1-cochains on the input group.

A phase function is stored as a ``(|G|, |A|)`` bit array whose row ``g`` is
``Phi_g``. Its coboundary is

    (dPhi)_{g,h}(a) = Phi_g(h a) + Phi_h(a) + Phi_{gh}(a)   (mod 2)

and, following the source convention, ``dPhi = 0`` is called *exact*.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import bitlinalg as bl
from .errors import InvariantError
from .obsset import ModuleV, ObservableSet
from .symgroup import GroupAction

XI_TOL = 1e-9


class StateNotSymmetric(InvariantError):
    """The characteristic function is not invariant in magnitude under G."""


@dataclass(frozen=True)
class PhaseFunction:
    values: np.ndarray  # (|G|, |A|) uint8

    def __post_init__(self):
        object.__setattr__(self, "values", bl.as_bits(self.values, 2))

    @classmethod
    def zero(cls, order: int, size: int) -> "PhaseFunction":
        return cls(np.zeros((order, size), dtype=np.uint8))

    def __getitem__(self, g: int) -> np.ndarray:
        return self.values[g]

    def __add__(self, other: "PhaseFunction") -> "PhaseFunction":
        return PhaseFunction(self.values ^ other.values)

    def __eq__(self, other) -> bool:
        return isinstance(other, PhaseFunction) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())

    def in_module(self, V: ModuleV) -> bool:
        return all(V.contains(row) for row in self.values)

    def to_json(self, group_names: Sequence[str]) -> dict:
        return {name: "".join(str(int(b)) for b in row) for name, row in zip(group_names, self.values)}


def coboundary(phi: PhaseFunction, action: GroupAction) -> tuple[np.ndarray, bool]:
    """Return ``(dPhi, exact)`` with ``dPhi`` of shape ``(|G|, |G|, |A|)``."""
    vals = phi.values
    perms = action.perm_array()
    table = action.group.table
    # vals[g][perms[h]] -> (g, h, a)
    shifted = vals[:, perms]  # (G, G, A): [g, h, a] = Phi_g(h a)
    d = shifted ^ vals[None, :, :] ^ vals[table]
    return d.astype(np.uint8), not d.any()


def from_assignment(s, action: GroupAction, obs: Optional[ObservableSet] = None) -> PhaseFunction:
    """``Phi_g(a) = s(g a) + s(a)`` for a value assignment ``s``."""
    s = bl.as_bits(s, 1)
    if obs is not None:
        cs = obs.constraint_system
        if (bl.matmul(cs.K, s) != cs.c).any():
            raise InvariantError("value assignment violates a product constraint")
    perms = action.perm_array()
    return PhaseFunction(s[perms] ^ s[None, :])


def output_function(phi: PhaseFunction, b_e: int, o_e: int, obs: Optional[ObservableSet] = None) -> np.ndarray:
    """``o(g) = Phi_g(b_e) + o(e)`` for every group element."""
    if obs is not None and b_e not in obs.outputs:
        raise InvariantError(f"index {b_e} is not an output observable")
    return (phi.values[:, b_e] ^ (o_e & 1)).astype(np.uint8)


@dataclass
class SymmetryFamily:
    """Affine family of phase functions, described per group element in V-coordinates."""

    V: ModuleV
    particular: np.ndarray  # (|G|, dim V)
    kernels: list[list[np.ndarray]]  # per g, basis of free V-coordinates

    @property
    def order(self) -> int:
        return self.particular.shape[0]

    @property
    def free_dims(self) -> list[int]:
        return [len(k) for k in self.kernels]

    def member(self, choices: Optional[Sequence[np.ndarray]] = None) -> PhaseFunction:
        """Phase function with ``Phi_g = particular_g + sum(choices[g] . kernel_g)``."""
        coords = self.particular.copy()
        if choices is not None:
            for g, ch in enumerate(choices):
                for bit, kv in zip(ch, self.kernels[g]):
                    if bit:
                        coords[g] ^= kv
        return PhaseFunction(np.array([self.V.vector(c) for c in coords], dtype=np.uint8))

    def random_member(self, rng: np.random.Generator) -> PhaseFunction:
        choices = [rng.integers(0, 2, size=len(k)) for k in self.kernels]
        return self.member(choices)


def symmetry_solutions(
    obs: ObservableSet,
    V: ModuleV,
    action: GroupAction,
    xi: Sequence[float],
    tol: float = XI_TOL,
) -> Optional[SymmetryFamily]:
    """All ``Phi`` with ``Phi_g`` in V and ``Xi(g a) = (-1)^{Phi_g(a)} Xi(a)``.

    Indices where ``Xi(a) = 0`` leave ``Phi_g(a)`` unconstrained. Returns
    ``None`` when the sign pattern cannot be realised inside V. Raises
    :class:`StateNotSymmetric` if ``|Xi(g a)| != |Xi(a)|`` somewhere.
    """
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (obs.size,):
        raise InvariantError("characteristic function has the wrong length")
    B = V.basis
    particular = np.zeros((action.order, V.dim), dtype=np.uint8)
    kernels: list[list[np.ndarray]] = []
    for g in range(action.order):
        perm = np.array(action.perm(g))
        mag = np.abs(np.abs(xi[perm]) - np.abs(xi))
        if (mag > tol).any():
            a = int(np.argmax(mag))
            raise StateNotSymmetric(
                f"state not G-symmetric: |Xi| differs at {obs.observables[a]} -> "
                f"{obs.observables[perm[a]]} under {action.group.names[g]}"
            )
        live = np.flatnonzero(np.abs(xi) > tol)
        rhs = (np.sign(xi[perm[live]]) != np.sign(xi[live])).astype(np.uint8)
        M = B[:, live].T if V.dim else np.zeros((len(live), 0), dtype=np.uint8)
        sol = bl.solve_affine(M, rhs)
        if sol is None:
            return None
        particular[g] = sol[0]
        kernels.append(sol[1])
    return SymmetryFamily(V, particular, kernels)


@dataclass
class Verdict:
    contextual: bool
    witness: Optional[PhaseFunction] = None
    certificate: list[dict] = field(default_factory=list)

    @property
    def label(self) -> str:
        return "ContextualByProp1" if self.contextual else "InconclusiveWithExactWitness"


def _certification_system(obs, V, action, o, b_e, o_e):
    G = action.order
    k = V.dim
    A = obs.size
    B = V.basis.astype(np.uint8)
    perms = action.perm_array()
    table = action.group.table
    rows: list[np.ndarray] = []
    rhs: list[int] = []
    labels: list[dict] = []
    for g in range(G):
        r = np.zeros(G * k, dtype=np.uint8)
        r[g * k:(g + 1) * k] = B[:, b_e]
        rows.append(r)
        rhs.append(int(o[g]) ^ o_e)
        labels.append({"kind": "output", "g": g})
    seen: set[bytes] = set()
    for g in range(G):
        for h in range(G):
            gh = int(table[g, h])
            for a in range(A):
                r = np.zeros(G * k, dtype=np.uint8)
                r[g * k:(g + 1) * k] ^= B[:, perms[h, a]]
                r[h * k:(h + 1) * k] ^= B[:, a]
                r[gh * k:(gh + 1) * k] ^= B[:, a]
                key = r.tobytes()
                if not r.any() or key in seen:
                    continue
                seen.add(key)
                rows.append(r)
                rhs.append(0)
                labels.append({"kind": "cocycle", "g": g, "h": h, "a": a})
    M = np.array(rows, dtype=np.uint8) if rows else np.zeros((0, G * k), dtype=np.uint8)
    return M, np.array(rhs, dtype=np.uint8), labels


def certify_contextuality(
    obs: ObservableSet,
    V: ModuleV,
    action: GroupAction,
    o: Sequence[int],
    b_e: int,
    o_e: Optional[int] = None,
) -> Verdict:
    """Search for an exact phase function reproducing ``o`` through ``b_e``.

    Unknowns are the V-coordinates of every ``Phi_g``. The constraints are
    ``Phi_g(b_e) = o(g) + o(e)`` and ``dPhi = 0``. Infeasibility proves
    contextuality; a solution is returned as a witness but says nothing in
    the other direction.
    """
    o = np.asarray(o, dtype=np.uint8) & 1
    if o.shape != (action.order,):
        raise InvariantError("output function must be defined on every group element")
    if o_e is None:
        o_e = int(o[action.group.identity])
    M, rhs, labels = _certification_system(obs, V, action, o, b_e, int(o_e))
    sol = bl.solve_affine(M, rhs)
    if sol is None:
        y = bl.infeasibility_certificate(M, rhs)
        cert = [labels[i] for i in np.flatnonzero(y)]
        return Verdict(True, None, cert)
    coords = sol[0].reshape(action.order, V.dim)
    phi = PhaseFunction(np.array([V.vector(c) for c in coords], dtype=np.uint8).reshape(action.order, obs.size))
    return Verdict(False, phi, [])


def verify_certificate(obs, V, action, o, b_e, o_e, certificate: Sequence[dict]) -> bool:
    """Re-check an infeasibility certificate produced by :func:`certify_contextuality`."""
    G = action.order
    k = V.dim
    B = V.basis.astype(np.uint8)
    perms = action.perm_array()
    table = action.group.table
    acc = np.zeros(G * k, dtype=np.uint8)
    parity = 0
    for lab in certificate:
        r = np.zeros(G * k, dtype=np.uint8)
        if lab["kind"] == "output":
            g = lab["g"]
            r[g * k:(g + 1) * k] = B[:, b_e]
            parity ^= int(o[g]) ^ int(o_e)
        elif lab["kind"] == "cocycle":
            g, h, a = lab["g"], lab["h"], lab["a"]
            gh = int(table[g, h])
            r[g * k:(g + 1) * k] ^= B[:, perms[h, a]]
            r[h * k:(h + 1) * k] ^= B[:, a]
            r[gh * k:(gh + 1) * k] ^= B[:, a]
        else:
            return False
        acc ^= r
    return not acc.any() and parity == 1
