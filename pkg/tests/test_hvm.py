import itertools

import numpy as np
import pytest

from gmbqc import bitlinalg as bl
from gmbqc.errors import InvariantError, SizeGuardError
from gmbqc.hvm import (
    act_on_assignment,
    cc_coprocessor,
    check_lemma1,
    classical_reduction,
    delta,
    enumerate_assignments,
    induced_outputs,
    parity_lower_bound,
)
from gmbqc.obsset import compute_V
from gmbqc.phasefn import certify_contextuality, from_assignment
from gmbqc.quantum import ideal_output


def brute_assignments(obs):
    cs = obs.constraint_system
    allv = np.array(list(itertools.product([0, 1], repeat=obs.size)), dtype=np.uint8)
    ok = ~((allv.astype(np.int64) @ cs.K.T.astype(np.int64) + cs.c) % 2).any(axis=1)
    return allv[ok]


@pytest.mark.parametrize("fixture", ["ghz", "bell", "square", "star", "qubit"])
def test_assignment_space_matches_brute_force(fixture, request):
    obs = request.getfixturevalue(fixture).obs
    space = enumerate_assignments(obs)
    brute = {tuple(r) for r in brute_assignments(obs)}
    assert space.size == len(brute)
    assert {tuple(r) for r in space.elements()} == brute


def test_ghz_has_64_assignments(ghz):
    space = enumerate_assignments(ghz.obs)
    assert space.size == 64 and space.dim == 6
    assert all(s[0] == 0 for s in space.elements())


def test_square_and_star_are_empty(square, star):
    for fix in (square, star):
        space = enumerate_assignments(fix.obs)
        assert space.empty and space.size == 0 and space.dim == -1
        assert len(space.elements()) == 0
        assert not space.contains(np.zeros(fix.obs.size))


def test_ghz_delta(ghz):
    inst = ghz.instance
    res = delta(inst.obs, inst.action, [0, 1, 1, 1], inst.b_e)
    assert res.delta == 1 and res.classical_bound == 3 and res.assignments == 64
    # exhaustive oracle
    S = brute_assignments(inst.obs)
    dists = [(np.array([s[inst.action.act(g, inst.b_e)] for g in range(4)]) ^ [0, 1, 1, 1]).sum() for s in S]
    assert min(dists) == 1
    assert parity_lower_bound(inst.obs, inst.action, [0, 1, 1, 1], inst.b_e) == 1


def test_bell_delta(bell):
    inst = bell.instance
    o = ideal_output(inst).o
    res = delta(inst.obs, inst.action, o, inst.b_e)
    assert res.delta == 0 and res.classical_bound == 2
    assert np.array_equal(res.induced, o)


def test_delta_of_assignment_outputs_is_zero(ghz):
    inst = ghz.instance
    S = enumerate_assignments(inst.obs).elements()
    for o in induced_outputs(S, inst.action, inst.b_e)[:8]:
        assert delta(inst.obs, inst.action, o, inst.b_e).delta == 0
        assert parity_lower_bound(inst.obs, inst.action, o, inst.b_e) == 0


def test_delta_of_empty_space(square):
    res = delta(square.obs, square.action, [0], 1)
    assert res.delta is None and res.classical_bound is None


def test_delta_guard(ghz):
    with pytest.raises(SizeGuardError):
        delta(ghz.obs, ghz.action, [0, 1, 1, 1], 7, max_dim=5)
    with pytest.raises(InvariantError):
        delta(ghz.obs, ghz.action, [0, 1], 7)


@pytest.mark.parametrize("fixture", ["ghz", "bell"])
def test_lemma1(fixture, request):
    fix = request.getfixturevalue(fixture)
    space = enumerate_assignments(fix.obs)
    rep = check_lemma1(space, fix.action, compute_V(fix.obs))
    assert rep.closed_under_group and rep.differences_in_V and rep.holds
    assert rep.checked_assignments == space.size


def test_lemma1_by_hand(ghz, ghz_V):
    S = brute_assignments(ghz.obs)
    members = {tuple(s) for s in S}
    for s in S:
        for g in range(4):
            assert tuple(act_on_assignment(ghz.action, g, s)) in members
    for s, t in itertools.combinations(S[:16], 2):
        assert ghz_V.contains(s ^ t)


def test_classical_reduction(ghz):
    inst = ghz.instance
    o = np.array([0, 1, 1, 1], dtype=np.uint8)
    res = delta(inst.obs, inst.action, o, inst.b_e)
    red = classical_reduction(o, res.argmin, inst.action, inst.b_e, inst.obs)
    assert len(red.table) == res.delta == 1
    assert red.exact
    assert [red.evaluator(g) for g in range(4)] == o.tolist()


def test_coprocessor_reproduces_assignment_outputs(ghz):
    inst = ghz.instance
    grp = inst.action.group
    bound = len(inst.obs.measurable) * len(grp.generators)
    for s in enumerate_assignments(inst.obs).elements():
        phi = from_assignment(s, inst.action)
        o = induced_outputs(s[None, :], inst.action, inst.b_e)[0]
        for g in range(4):
            r = cc_coprocessor(inst.obs, inst.action, phi, grp.words[g], inst.b_e, inst.reference_context)
            assert r.output ^ int(o[0]) == o[g]
            assert r.memory_cells <= bound and r.memory_bound == bound
            assert r.element == g


def test_coprocessor_on_bell_witness(bell):
    inst = bell.instance
    o = ideal_output(inst).o
    phi = certify_contextuality(inst.obs, compute_V(inst.obs), inst.action, o, inst.b_e).witness
    for g in range(inst.action.order):
        r = cc_coprocessor(inst.obs, inst.action, phi, inst.group.words[g], inst.b_e, inst.reference_context)
        assert r.output ^ int(o[0]) == o[g]


def test_coprocessor_refuses_non_exact(ghz):
    from gmbqc.phasefn import symmetry_solutions

    inst = ghz.instance
    phi = symmetry_solutions(inst.obs, compute_V(inst.obs), inst.action, inst.xi()).member()
    with pytest.raises(InvariantError, match="not exact"):
        cc_coprocessor(inst.obs, inst.action, phi, (0,), inst.b_e, inst.reference_context)


def test_assignment_space_contains(ghz):
    space = enumerate_assignments(ghz.obs)
    s = space.elements()[5]
    assert space.contains(s)
    t = s.copy()
    t[1] ^= 1
    assert not space.contains(t)
    assert bl.matmul(ghz.obs.constraint_system.K, s).tolist() == ghz.obs.constraint_system.c.tolist()
