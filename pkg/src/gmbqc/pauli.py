"""Signed multi-qubit Pauli observables.

An observable is ``(-1)^sign`` times a tensor product of ``I, X, Y, Z``; qubit
0 is the leftmost letter and the most significant tensor factor. Products of
two observables may carry a phase ``±i``, which is returned separately and
never stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

LETTERS = "IXYZ"

# (p, q) -> (power of i, letter) with p*q = i^power * letter
_MUL = {
    ("I", "I"): (0, "I"), ("I", "X"): (0, "X"), ("I", "Y"): (0, "Y"), ("I", "Z"): (0, "Z"),
    ("X", "I"): (0, "X"), ("X", "X"): (0, "I"), ("X", "Y"): (1, "Z"), ("X", "Z"): (3, "Y"),
    ("Y", "I"): (0, "Y"), ("Y", "X"): (3, "Z"), ("Y", "Y"): (0, "I"), ("Y", "Z"): (1, "X"),
    ("Z", "I"): (0, "Z"), ("Z", "X"): (1, "Y"), ("Z", "Y"): (3, "X"), ("Z", "Z"): (0, "I"),
}

# gate -> letter -> (sign bit, image letter) under P -> U P U^dagger
GATE_TABLE: dict[str, dict[str, tuple[int, str]]] = {
    "X": {"X": (0, "X"), "Y": (1, "Y"), "Z": (1, "Z")},
    "Y": {"X": (1, "X"), "Y": (0, "Y"), "Z": (1, "Z")},
    "Z": {"X": (1, "X"), "Y": (1, "Y"), "Z": (0, "Z")},
    "H": {"X": (0, "Z"), "Y": (1, "Y"), "Z": (0, "X")},
    "S": {"X": (0, "Y"), "Y": (1, "X"), "Z": (0, "Z")},
    "A": {"X": (0, "Y"), "Y": (0, "X"), "Z": (1, "Z")},
}

_S2 = 1 / np.sqrt(2)
GATE_MATRICES: dict[str, np.ndarray] = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _S2,
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "A": np.array([[0, 1 - 1j], [1 + 1j, 0]], dtype=complex) * _S2,
}

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": GATE_MATRICES["X"],
    "Y": GATE_MATRICES["Y"],
    "Z": GATE_MATRICES["Z"],
}

MAX_DENSE_QUBITS = 12


class PauliError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Pauli:
    letters: str
    sign: int = 0

    def __post_init__(self):
        if any(ch not in LETTERS for ch in self.letters):
            raise PauliError(f"invalid Pauli letters {self.letters!r}")
        if self.sign not in (0, 1):
            raise PauliError("sign must be 0 or 1")

    @classmethod
    def parse(cls, text: str) -> "Pauli":
        """Parse ``"+XXY"``, ``"-YIZ"`` or an unsigned ``"XZ"``."""
        text = text.strip()
        sign = 0
        if text[:1] in "+-":
            sign = int(text[0] == "-")
            text = text[1:]
        if not text:
            raise PauliError("empty Pauli string")
        return cls(text.upper(), sign)

    @classmethod
    def identity(cls, n: int) -> "Pauli":
        return cls("I" * n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "Pauli":
        chars = ["I"] * n
        chars[qubit] = letter
        return cls("".join(chars))

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def is_identity(self) -> bool:
        return set(self.letters) <= {"I"}

    @property
    def weight(self) -> int:
        return sum(ch != "I" for ch in self.letters)

    @property
    def unsigned(self) -> "Pauli":
        return Pauli(self.letters)

    def __neg__(self) -> "Pauli":
        return Pauli(self.letters, self.sign ^ 1)

    def __str__(self) -> str:
        return ("-" if self.sign else "+") + self.letters

    def x_bits(self) -> int:
        return sum(1 << (self.n_qubits - 1 - k) for k, ch in enumerate(self.letters) if ch in "XY")

    def z_bits(self) -> int:
        return sum(1 << (self.n_qubits - 1 - k) for k, ch in enumerate(self.letters) if ch in "ZY")


def _check_sizes(p: Pauli, q: Pauli) -> None:
    if p.n_qubits != q.n_qubits:
        raise PauliError(f"size mismatch: {p.n_qubits} vs {q.n_qubits} qubits")


def multiply(p: Pauli, q: Pauli) -> tuple[complex, Pauli]:
    """Return ``(phase, r)`` with ``p @ q == phase * r`` and ``r.sign == 0``."""
    _check_sizes(p, q)
    power = 2 * (p.sign ^ q.sign)
    out = []
    for a, b in zip(p.letters, q.letters):
        k, c = _MUL[(a, b)]
        power += k
        out.append(c)
    return 1j ** (power % 4), Pauli("".join(out))


def product(ps: Sequence[Pauli]) -> tuple[complex, Pauli]:
    """Ordered product of several observables, same convention as :func:`multiply`."""
    if not ps:
        raise PauliError("empty product")
    phase, acc = 1 + 0j, Pauli.identity(ps[0].n_qubits)
    for q in ps:
        ph, acc = multiply(acc, q)
        phase *= ph
    return phase, acc


def commutes(p: Pauli, q: Pauli) -> bool:
    _check_sizes(p, q)
    sym = bin((p.x_bits() & q.z_bits()) ^ (p.z_bits() & q.x_bits())).count("1")
    return sym % 2 == 0


def conjugate(p: Pauli, circuit: Iterable[tuple[str, int]]) -> Pauli:
    """Heisenberg image ``U p U^dagger`` for ``U = g_k ... g_1``.

    ``circuit`` lists ``(gate, qubit)`` pairs in the order they are applied.
    """
    letters = list(p.letters)
    sign = p.sign
    for gate, qubit in circuit:
        table = GATE_TABLE.get(gate)
        if table is None:
            raise PauliError(f"unknown gate {gate!r}")
        if not 0 <= qubit < len(letters):
            raise PauliError(f"qubit index {qubit} out of range for {len(letters)} qubits")
        ch = letters[qubit]
        if ch == "I":
            continue
        flip, img = table[ch]
        sign ^= flip
        letters[qubit] = img
    return Pauli("".join(letters), sign)


def to_matrix(p: Pauli) -> np.ndarray:
    if p.n_qubits > MAX_DENSE_QUBITS:
        raise PauliError(f"dense export capped at {MAX_DENSE_QUBITS} qubits")
    mat = reduce(np.kron, (PAULI_MATRICES[ch] for ch in p.letters), np.eye(1, dtype=complex))
    return -mat if p.sign else mat


def circuit_unitary(circuit: Iterable[tuple[str, int]], n: int) -> np.ndarray:
    """Dense unitary ``g_k ... g_1`` of a gate list (for verification only)."""
    if n > MAX_DENSE_QUBITS:
        raise PauliError(f"dense export capped at {MAX_DENSE_QUBITS} qubits")
    u = np.eye(1 << n, dtype=complex)
    for gate, qubit in circuit:
        mats = [np.eye(2, dtype=complex)] * n
        mats[qubit] = GATE_MATRICES[gate]
        u = reduce(np.kron, mats, np.eye(1, dtype=complex)) @ u
    return u


def apply(p: Pauli, psi: np.ndarray) -> np.ndarray:
    """Matrix-free ``p |psi>`` on a dense state vector."""
    n = p.n_qubits
    idx = np.arange(1 << n)
    x, z = p.x_bits(), p.z_bits()
    n_y = p.letters.count("Y")
    # letter-wise Y = i X Z, so P = i^{#Y} X^x Z^z
    parity = np.zeros(1 << n, dtype=np.int64)
    zz = idx & z
    while np.any(zz):
        parity ^= zz & 1
        zz >>= 1
    coeff = (1j ** n_y) * (-1 if p.sign else 1) * (1 - 2 * parity)
    out = np.empty_like(psi, dtype=complex)
    out[idx ^ x] = coeff * psi
    return out


def all_paulis(n: int) -> Iterable[Pauli]:
    """Every unsigned n-qubit Pauli string in lexicographic ``IXYZ`` order."""
    if n == 0:
        yield Pauli("")
        return
    for k in range(4 ** n):
        chars = []
        for _ in range(n):
            chars.append(LETTERS[k % 4])
            k //= 4
        yield Pauli("".join(reversed(chars)))
