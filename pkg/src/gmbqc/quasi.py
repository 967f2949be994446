"""Quasi-probability functions on the phase space V.

Phase-space points are the elements of V, labelled by integers whose bits are
the coordinates in the canonical basis of V. The phase-point operators are

    A_v = (1/|V|) sum_a (-1)^{v(a)} T_a

and ``Q(v) = Tr(A_v rho) = (1/|V|) sum_a (-1)^{v(a)} Xi(a)``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import bitlinalg as bl
from .errors import InvariantError, SizeGuardError
from .obsset import ModuleV, ObservableSet, check_separation, separation_failures
from .pauli import circuit_unitary, to_matrix
from .quantum import QuantumState, characteristic
from .symgroup import GroupAction, check_input_group, module_matrix

MAX_PHASE_SPACE_DIM = 16
MAX_COVARIANCE_QUBITS = 8


def _require_separation(obs: ObservableSet, V: ModuleV) -> None:
    if not check_separation(obs, V):
        bad = separation_failures(obs, V)
        a, b = bad[0]
        raise InvariantError(
            f"V does not separate {obs.observables[a]} from {obs.observables[b]}; "
            "phase-point operators are not well defined"
        )


def _signs(V: ModuleV) -> np.ndarray:
    if V.dim > MAX_PHASE_SPACE_DIM:
        raise SizeGuardError(f"|V| = 2^{V.dim} exceeds the limit 2^{MAX_PHASE_SPACE_DIM}")
    return 1.0 - 2.0 * V.elements().astype(float)  # (|V|, |A|)


def phase_point(obs: ObservableSet, V: ModuleV, v) -> np.ndarray:
    """Dense ``A_v`` for a member ``v`` of V (given as a vector over the index set)."""
    _require_separation(obs, V)
    v = bl.as_bits(v, 1)
    if not V.contains(v):
        raise InvariantError("phase-space point is not in V")
    d = 1 << obs.n_qubits
    out = np.zeros((d, d), dtype=complex)
    for a, p in enumerate(obs.observables):
        out += (-1) ** int(v[a]) * to_matrix(p)
    return out / V.order


def all_phase_points(obs: ObservableSet, V: ModuleV) -> np.ndarray:
    """Stack of ``A_v`` in phase-space label order; shape ``(|V|, 2^n, 2^n)``."""
    _require_separation(obs, V)
    signs = _signs(V)
    mats = np.array([to_matrix(p) for p in obs.observables])
    return np.einsum("va,aij->vij", signs, mats) / V.order


@dataclass
class QuasiProbability:
    values: np.ndarray  # indexed by phase-space label
    V: ModuleV = field(repr=False)

    @property
    def total(self) -> float:
        return float(self.values.sum())

    def coords(self, k: int) -> np.ndarray:
        return ((k >> np.arange(self.V.dim)) & 1).astype(np.uint8)

    def distinct_values(self, decimals: int = 12) -> list[float]:
        return sorted({float(x) for x in np.round(self.values, decimals)})


def quasiprob(source, obs: ObservableSet, V: ModuleV) -> QuasiProbability:
    """Quasi-probability from a state or directly from a characteristic function."""
    _require_separation(obs, V)
    xi = characteristic(source, obs) if isinstance(source, QuantumState) else np.asarray(source, dtype=float)
    if xi.shape != (obs.size,):
        raise InvariantError("characteristic function has the wrong length")
    signs = _signs(V)
    return QuasiProbability(signs @ xi / V.order, V)


def fourier(Q: QuasiProbability) -> np.ndarray:
    """``Xi(a) = sum_v (-1)^{v(a)} Q(v)``."""
    return _signs(Q.V).T @ Q.values


def outcome_prob(Q: QuasiProbability, a: int, s_bit: int) -> float:
    """Probability of outcome ``(-1)^s`` for ``T_a``: the sum of Q over the coset ``{v : v(a) = s}``."""
    E = Q.V.elements()
    if not 0 <= a < E.shape[1]:
        raise InvariantError(f"index {a} out of range")
    return float(Q.values[E[:, a] == (s_bit & 1)].sum())


@dataclass
class CovarianceReport:
    S: dict  # group element name -> S_g (dim V x dim V)
    invertible: bool
    fixes_origin: bool
    dense_checked: bool
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.invertible and self.fixes_origin and not self.mismatches


def check_covariance(obs: ObservableSet, V: ModuleV, action: GroupAction, dense: bool = True, tol: float = 1e-9) -> CovarianceReport:
    """Verify ``u(g) A_v u(g)^dag = A_{S_g v}`` for every group element and phase point.

    The dense check needs the generator circuits of the action and at most
    ``MAX_COVARIANCE_QUBITS`` qubits; otherwise only the linear-algebra part
    (invertibility, fixed origin) is reported.
    """
    if not check_input_group(action):
        raise InvariantError("covariance requires an input group without sign flips")
    mats = {}
    invertible = True
    fixes_origin = True
    for g in range(action.order):
        S = module_matrix(action, g, V)
        mats[action.group.names[g]] = S
        if bl.rank(S) != V.dim:
            invertible = False
        if V.dim and bl.matmul(S, np.zeros(V.dim, dtype=np.uint8)).any():
            fixes_origin = False
    can_dense = dense and action.generator_circuits is not None and obs.n_qubits <= MAX_COVARIANCE_QUBITS
    mismatches = []
    if can_dense:
        A = all_phase_points(obs, V)
        coords = V.coord_table()
        weights = 1 << np.arange(V.dim)
        for g in range(action.order):
            U = circuit_unitary(action.circuit(g), obs.n_qubits)
            S = mats[action.group.names[g]]
            for k in range(V.order):
                img = bl.matmul(S, coords[k]) if V.dim else coords[k]
                j = int(img @ weights) if V.dim else 0
                if not np.allclose(U @ A[k] @ U.conj().T, A[j], atol=tol):
                    mismatches.append((action.group.names[g], k))
    return CovarianceReport(mats, invertible, fixes_origin, can_dense, mismatches)


def symmetry_map(Q: QuasiProbability, action: GroupAction, phi, g: int) -> np.ndarray:
    """Label permutation ``k -> label of S_g v_k + g(Phi_g)`` under which a G-symmetric Q is invariant."""
    V = Q.V
    S = module_matrix(action, g, V)
    shift = V.coords(np.asarray(phi[g])[list(action.inverse_element(g).perm)])
    if shift is None:
        raise InvariantError("phase function value is not in V")
    coords = V.coord_table()
    imgs = (coords @ S.T.astype(np.int64) + shift) % 2 if V.dim else coords
    return (imgs @ (1 << np.arange(V.dim))).astype(np.int64) if V.dim else np.zeros(1, dtype=np.int64)


def to_csv(Q: QuasiProbability, obs: Optional[ObservableSet] = None) -> str:
    """Rows of phase-space coordinates, flipped observables and the value of Q."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([*(f"c{i}" for i in range(Q.V.dim)), "flips", "Q"])
    E = Q.V.elements()
    for k, q in enumerate(Q.values):
        flips = ""
        if obs is not None:
            flips = " ".join(obs.observables[a].letters for a in np.flatnonzero(E[k]))
        w.writerow([*map(int, Q.coords(k)), flips, repr(float(q))])
    return buf.getvalue()
