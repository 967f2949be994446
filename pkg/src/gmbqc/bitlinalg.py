"""Dense linear algebra over GF(2).

Matrices are handled as 2-D ``uint8`` numpy arrays holding 0/1 entries; the
elimination routines pack each row into a Python ``int`` (bit ``j`` is column
``j``) which keeps row operations cheap at the sizes used here.

Pivoting always takes the leftmost available column and the topmost row
carrying a one in it, so every routine is deterministic.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

BitMatrix = np.ndarray
BitVector = np.ndarray


def as_bits(a, ndim: Optional[int] = None) -> np.ndarray:
    arr = np.asarray(a, dtype=np.int64) & 1
    arr = arr.astype(np.uint8)
    if ndim is not None and arr.ndim != ndim:
        if ndim == 2 and arr.ndim == 1 and arr.size == 0:
            return arr.reshape(0, 0)
        raise ValueError(f"expected a {ndim}-d bit array, got shape {arr.shape}")
    return arr


def zeros(rows: int, cols: int) -> BitMatrix:
    return np.zeros((rows, cols), dtype=np.uint8)


def identity(n: int) -> BitMatrix:
    return np.eye(n, dtype=np.uint8)


def matmul(a, b) -> np.ndarray:
    """Matrix (or matrix-vector) product reduced mod 2."""
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64) & 1).astype(np.uint8)


def _pack(row: np.ndarray) -> int:
    out = 0
    for j in np.flatnonzero(row):
        out |= 1 << int(j)
    return out


def _unpack(x: int, n: int) -> np.ndarray:
    v = np.zeros(n, dtype=np.uint8)
    j = 0
    while x:
        if x & 1:
            v[j] = 1
        x >>= 1
        j += 1
    return v


def _eliminate(rows: list[int], ncols: int, track: bool = False):
    """Reduce packed rows to RREF in place.

    Returns ``(pivots, transforms)`` where ``pivots[r]`` is the pivot column of
    reduced row ``r`` and, when ``track`` is set, ``transforms[r]`` is a packed
    mask of the original rows summed into reduced row ``r``.
    """
    m = len(rows)
    ops = [1 << i for i in range(m)] if track else None
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r >= m:
            break
        bit = 1 << c
        p = next((i for i in range(r, m) if rows[i] & bit), None)
        if p is None:
            continue
        if p != r:
            rows[r], rows[p] = rows[p], rows[r]
            if track:
                ops[r], ops[p] = ops[p], ops[r]
        for i in range(m):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
                if track:
                    ops[i] ^= ops[r]
        pivots.append(c)
        r += 1
    return pivots, ops


def rref(m) -> tuple[BitMatrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = as_bits(m, 2)
    rows = [_pack(row) for row in m]
    pivots, _ = _eliminate(rows, m.shape[1])
    out = np.array([_unpack(x, m.shape[1]) for x in rows], dtype=np.uint8).reshape(m.shape)
    return out, pivots


def rank(m) -> int:
    m = as_bits(m, 2)
    rows = [_pack(row) for row in m]
    pivots, _ = _eliminate(rows, m.shape[1])
    return len(pivots)


def kernel(m) -> list[BitVector]:
    """Basis of the right null space ``{x : m x = 0}``.

    One basis vector per free column, in increasing column order; each has a
    single one among the free columns.
    """
    m = as_bits(m, 2)
    ncols = m.shape[1]
    rows = [_pack(row) for row in m]
    pivots, _ = _eliminate(rows, ncols)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = np.zeros(ncols, dtype=np.uint8)
        v[f] = 1
        for r, pc in enumerate(pivots):
            if (rows[r] >> f) & 1:
                v[pc] = 1
        basis.append(v)
    return basis


def kernel_matrix(m) -> BitMatrix:
    """Kernel basis stacked as rows (shape ``(nullity, cols)``)."""
    m = as_bits(m, 2)
    basis = kernel(m)
    if not basis:
        return zeros(0, m.shape[1])
    return np.array(basis, dtype=np.uint8)


def left_kernel(m) -> list[BitVector]:
    """Basis of ``{y : y^T m = 0}``."""
    m = as_bits(m, 2)
    return kernel(m.T)


def solve_affine(m, b) -> Optional[tuple[BitVector, list[BitVector]]]:
    """Solve ``m x = b``.

    Returns ``(particular, kernel_basis)`` or ``None`` when the system is
    inconsistent. The particular solution has zeros on all free columns.
    """
    m = as_bits(m, 2)
    b = as_bits(b, 1)
    nrows, ncols = m.shape
    if b.shape[0] != nrows:
        raise ValueError(f"right-hand side has length {b.shape[0]}, matrix has {nrows} rows")
    rows = [_pack(row) | (int(bi) << ncols) for row, bi in zip(m, b)]
    pivots, _ = _eliminate(rows, ncols)
    mask = (1 << ncols) - 1
    for x in rows[len(pivots):]:
        if x >> ncols:
            return None
    particular = np.zeros(ncols, dtype=np.uint8)
    for r, pc in enumerate(pivots):
        particular[pc] = (rows[r] >> ncols) & 1
    # rows beyond the pivots are all zero in the coefficient part
    assert all((x & mask) == 0 for x in rows[len(pivots):])
    return particular, kernel(m)


def infeasibility_certificate(m, b) -> Optional[BitVector]:
    """Row combination ``y`` with ``y^T m = 0`` and ``y . b = 1``.

    Such a ``y`` exists exactly when ``m x = b`` has no solution. The
    combination is read off the elimination history, so it is the one that
    produced the first contradictory row.
    """
    m = as_bits(m, 2)
    b = as_bits(b, 1)
    nrows, ncols = m.shape
    if b.shape[0] != nrows:
        raise ValueError(f"right-hand side has length {b.shape[0]}, matrix has {nrows} rows")
    rows = [_pack(row) | (int(bi) << ncols) for row, bi in zip(m, b)]
    pivots, ops = _eliminate(rows, ncols, track=True)
    for x, op in zip(rows[len(pivots):], ops[len(pivots):]):
        if x >> ncols:
            return _unpack(op, nrows)
    return None


def in_span(v, basis: Sequence[BitVector]) -> bool:
    v = as_bits(v, 1)
    if len(basis) == 0:
        return not v.any()
    return solve_affine(np.array(basis, dtype=np.uint8).T, v) is not None


def coordinates(v, basis: Sequence[BitVector]) -> Optional[BitVector]:
    """Coordinates of ``v`` in ``basis`` (assumed independent), or ``None``."""
    v = as_bits(v, 1)
    if len(basis) == 0:
        return np.zeros(0, dtype=np.uint8) if not v.any() else None
    sol = solve_affine(np.array(basis, dtype=np.uint8).T, v)
    if sol is None:
        return None
    return sol[0]


def reduce_modulo(v, basis: Sequence[BitVector]) -> BitVector:
    """Canonical representative of ``v`` modulo ``span(basis)``.

    Uses the RREF of the spanning set: every pivot column of the span is
    cleared from ``v``. Two vectors are congruent iff their representatives
    are equal.
    """
    v = as_bits(v, 1).copy()
    if len(basis) == 0:
        return v
    red, pivots = rref(np.array(basis, dtype=np.uint8))
    for r, pc in enumerate(pivots):
        if v[pc]:
            v ^= red[r]
    return v


def combinations(basis: Sequence[BitVector], n: int) -> Iterator[tuple[int, BitVector]]:
    """Yield ``(k, sum of basis[i] for bits i of k)`` for ``k = 0 .. 2^len-1``."""
    basis = [as_bits(b, 1) for b in basis]
    cur = np.zeros(n, dtype=np.uint8)
    yield 0, cur.copy()
    # Gray-code walk, then report by integer label
    prev = 0
    for i in range(1, 1 << len(basis)):
        gray = i ^ (i >> 1)
        flip = (gray ^ prev).bit_length() - 1
        cur ^= basis[flip]
        prev = gray
        yield gray, cur.copy()


def span(basis: Sequence[BitVector], n: int) -> np.ndarray:
    """All ``2^k`` elements of the span, row ``k`` being the combination with bits of ``k``."""
    k = len(basis)
    if k == 0:
        return np.zeros((1, n), dtype=np.uint8)
    b = np.array([as_bits(x, 1) for x in basis], dtype=np.uint8)
    labels = np.arange(1 << k, dtype=np.int64)
    sel = ((labels[:, None] >> np.arange(k)) & 1).astype(np.int64)
    return (sel @ b.astype(np.int64) & 1).astype(np.uint8)


def from_rows(rows: Iterable[Iterable[int]], cols: int) -> BitMatrix:
    rows = [list(r) for r in rows]
    if not rows:
        return zeros(0, cols)
    return as_bits(np.array(rows), 2)
