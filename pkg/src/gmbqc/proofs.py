"""Parity proofs and symmetry-based proofs of contextuality.

An assignment vector ``s`` transforms under an element ``h`` of a proof group
as ``s' = P_h s + v_h`` with ``P_h[a, h a] = 1`` and ``v_h`` the sign bits of
``h`` (the offset sits at ``a``, as in the matrix form). Both ``s`` and
``s'`` must solve ``K s = c``, so a row combination ``a`` with
``a^T K (I - P_h) = 0`` and ``a^T K v_h = 1`` rules out every assignment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import bitlinalg as bl
from .errors import InvariantError
from .fixtures import BUILTINS, Fixture, builtin  # noqa: F401  (re-exported)
from .obsset import ObservableSet
from .symgroup import GroupAction, SignedPerm, check_input_group


@dataclass
class ParityCertificate:
    b: np.ndarray  # over constraint rows

    def rows(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.b)]

    def to_json(self) -> dict:
        return {"type": "parity", "rows": self.rows()}


@dataclass
class SymmetryCertificate:
    a: np.ndarray  # over constraint rows
    h: int
    h_name: str = ""
    h_word: tuple = ()

    def rows(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.a)]

    def to_json(self) -> dict:
        return {"type": "symmetry", "rows": self.rows(), "h": self.h_name, "word": list(self.h_word)}


def is_consistent(obs: ObservableSet, s) -> bool:
    cs = obs.constraint_system
    return not (bl.matmul(cs.K, bl.as_bits(s, 1)) ^ cs.c).any()


def transform_assignment(s, h: SignedPerm, obs: Optional[ObservableSet] = None) -> np.ndarray:
    """``s'(a) = s(h a) + v_h(a)``; checks consistency of input and output when ``obs`` is given."""
    s = bl.as_bits(s, 1)
    if obs is not None and not is_consistent(obs, s):
        raise InvariantError("value assignment violates a product constraint")
    out = s[list(h.perm)] ^ np.asarray(h.signs, dtype=np.uint8)
    if obs is not None and not is_consistent(obs, out):
        raise InvariantError("transformed assignment is inconsistent; the action does not preserve the constraints")
    return out


def verify_parity(obs: ObservableSet, cert: ParityCertificate) -> bool:
    cs = obs.constraint_system
    b = bl.as_bits(cert.b, 1)
    if b.shape != (cs.n_rows,):
        return False
    return not bl.matmul(b, cs.K).any() and int(b @ cs.c.astype(np.int64)) % 2 == 1


def find_parity_proof(obs: ObservableSet) -> Optional[ParityCertificate]:
    """A combination of constraint rows summing to ``0 = 1``, or ``None`` if assignments exist."""
    cs = obs.constraint_system
    y = bl.infeasibility_certificate(cs.K, cs.c)
    return None if y is None else ParityCertificate(y)


def _symmetry_system(obs: ObservableSet, h: SignedPerm) -> tuple[np.ndarray, np.ndarray]:
    K = obs.constraint_system.K
    P = h.perm_matrix()
    M = bl.matmul(K, bl.identity(obs.size) ^ P)
    rhs = bl.matmul(K, np.asarray(h.signs, dtype=np.uint8))
    return M, rhs


def verify_symmetry(obs: ObservableSet, action: GroupAction, cert: SymmetryCertificate) -> bool:
    a = bl.as_bits(cert.a, 1)
    if a.shape != (obs.constraint_system.n_rows,):
        return False
    M, rhs = _symmetry_system(obs, action.elements[cert.h])
    return not bl.matmul(a, M).any() and int(a @ rhs.astype(np.int64)) % 2 == 1


def find_symmetry_proof(
    obs: ObservableSet,
    action: GroupAction,
    elements: Optional[Iterable[int]] = None,
) -> Optional[SymmetryCertificate]:
    """Search the elements of ``action`` (default: group order) for a symmetry certificate."""
    if action.size != obs.size:
        raise InvariantError("action and observable set have different index sets")
    order = range(action.order) if elements is None else elements
    for h in order:
        M, rhs = _symmetry_system(obs, action.elements[h])
        if not rhs.any():
            continue
        y = bl.infeasibility_certificate(M, rhs)
        if y is not None:
            return SymmetryCertificate(y, h, action.group.names[h], action.group.words[h])
    return None


def constraint_row_permutation(obs: ObservableSet, h: SignedPerm) -> np.ndarray:
    """``P'_h`` with ``K P_h = P'_h K``: row ``r`` goes to the row supported on ``h(supp r)``."""
    cs = obs.constraint_system
    lookup = cs.row_index()
    n = cs.n_rows
    Pp = np.zeros((n, n), dtype=np.uint8)
    for r, rel in enumerate(cs.relations):
        img = frozenset(h.perm[i] for i in rel.support)
        if img not in lookup:
            raise InvariantError(f"constraint row {r} is not mapped onto a constraint row")
        Pp[r, lookup[img]] = 1
    if (Pp.sum(axis=0) != 1).any():
        raise InvariantError("constraint rows are not permuted by the action")
    return Pp


def relate(cert: SymmetryCertificate, obs: ObservableSet, action: GroupAction) -> ParityCertificate:
    """Parity certificate ``b = (I - P'_h)^T a`` implied by a symmetry certificate."""
    h = action.elements[cert.h]
    Pp = constraint_row_permutation(obs, h)
    n = Pp.shape[0]
    b = bl.matmul((bl.identity(n) ^ Pp).T, bl.as_bits(cert.a, 1))
    out = ParityCertificate(b)
    if not verify_parity(obs, out):
        raise InvariantError("derived parity certificate failed verification")
    return out


def check_lemma4(action: GroupAction) -> bool:
    """True when no element flips a sign, so no symmetry certificate can exist."""
    return check_input_group(action)


def parity_sum_shift(obs: ObservableSet, h: SignedPerm, subset: Optional[Iterable[int]] = None) -> int:
    """Change of ``eta = sum_{a in subset} s(a)`` under ``h``, when ``h`` permutes the subset.

    With the whole index set (default) this is ``sum_a v_h(a) mod 2``.
    """
    idx = sorted(range(obs.size) if subset is None else subset)
    if sorted(h.perm[a] for a in idx) != idx:
        raise InvariantError("element does not permute the chosen subset")
    return int(sum(h.signs[a] for a in idx) % 2)
