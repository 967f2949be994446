import itertools

import numpy as np
import pytest

from gmbqc.errors import InvariantError
from gmbqc.obsset import compute_V
from gmbqc.proofs import (
    ParityCertificate,
    SymmetryCertificate,
    check_lemma4,
    constraint_row_permutation,
    find_parity_proof,
    find_symmetry_proof,
    is_consistent,
    parity_sum_shift,
    relate,
    transform_assignment,
    verify_parity,
    verify_symmetry,
)


def all_vectors(n):
    return np.array(list(itertools.product([0, 1], repeat=n)), dtype=np.uint8)


def no_solution_of_symmetry_system(obs, h):
    """Brute force: K (I + P_h) s = K v_h has no solution."""
    cs = obs.constraint_system
    P = h.perm_matrix().astype(np.int64)
    S = all_vectors(obs.size).astype(np.int64)
    lhs = ((S ^ (S @ P.T % 2)) @ cs.K.T.astype(np.int64)) % 2
    rhs = cs.K.astype(np.int64) @ np.array(h.signs) % 2
    return not (lhs == rhs).all(axis=1).any()


def test_square_parity_proof(square):
    cert = find_parity_proof(square.obs)
    assert cert is not None and verify_parity(square.obs, cert)
    assert cert.to_json()["type"] == "parity"
    # removing any row breaks it
    for r in cert.rows():
        b = cert.b.copy()
        b[r] = 0
        assert not verify_parity(square.obs, ParityCertificate(b))


def test_square_symmetry_proof(square):
    act = square.extended
    cert = find_symmetry_proof(square.obs, act)
    assert cert is not None
    assert cert.h_name == "H1"
    assert verify_symmetry(square.obs, act, cert)
    assert no_solution_of_symmetry_system(square.obs, act.elements[cert.h])
    par = relate(cert, square.obs, act)
    assert verify_parity(square.obs, par)


def test_square_sign_flip_total(square):
    h = square.extended.elements[1]
    assert parity_sum_shift(square.obs, h) == 1
    V = compute_V(square.obs)
    assert all(v.sum() % 2 == 0 for v in V.elements())


def test_star_parity_proof(star):
    cert = find_parity_proof(star.obs)
    assert verify_parity(star.obs, cert)
    assert cert.rows() == [0, 1, 2, 3, 4, 5]


def test_ghz_has_no_proofs(ghz):
    assert find_parity_proof(ghz.obs) is None
    assert check_lemma4(ghz.action)
    assert find_symmetry_proof(ghz.obs, ghz.action) is None


def test_dressed_star_symmetry_proof(dressed):
    act = dressed.extended
    assert not check_lemma4(act)
    a1a2 = act.group.names.index("g10*g01")
    cert = find_symmetry_proof(dressed.obs, act, elements=[a1a2])
    assert cert is not None and cert.h == a1a2
    assert verify_symmetry(dressed.obs, act, cert)
    assert verify_parity(dressed.obs, relate(cert, dressed.obs, act))
    assert find_symmetry_proof(dressed.obs, act) is not None


def test_tampered_certificates_fail(square):
    act = square.extended
    cert = find_symmetry_proof(square.obs, act)
    a = cert.a.copy()
    a[cert.rows()[0]] ^= 1
    assert not verify_symmetry(square.obs, act, SymmetryCertificate(a, cert.h))
    assert not verify_symmetry(square.obs, act, SymmetryCertificate(cert.a, 0))
    assert not verify_parity(square.obs, ParityCertificate(np.zeros(3, dtype=np.uint8)))


def test_row_permutation_intertwines(square):
    h = square.extended.elements[1]
    K = square.obs.constraint_system.K.astype(np.int64)
    Pp = constraint_row_permutation(square.obs, h).astype(np.int64)
    P = h.perm_matrix().astype(np.int64)
    # row r of K P^T is the indicator of h(supp r)
    assert np.array_equal(K @ P % 2, Pp @ K % 2)


def test_transform_assignment(ghz):
    from gmbqc.hvm import enumerate_assignments

    act = ghz.action
    for s in enumerate_assignments(ghz.obs).elements()[:10]:
        for g in range(4):
            t = transform_assignment(s, act.elements[g], ghz.obs)
            assert is_consistent(ghz.obs, t)
    bad = np.zeros(ghz.obs.size, dtype=np.uint8)
    bad[7] = 1
    with pytest.raises(InvariantError):
        transform_assignment(bad, act.elements[1], ghz.obs)


def test_parity_sum_shift_requires_invariant_subset(square):
    h = square.extended.elements[1]
    with pytest.raises(InvariantError):
        parity_sum_shift(square.obs, h, [square.obs.index("XI")])
    assert parity_sum_shift(square.obs, h, [square.obs.index("YY")]) == 1
