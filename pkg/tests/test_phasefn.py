import dataclasses
import itertools

import numpy as np
import pytest

from gmbqc.errors import InvariantError
from gmbqc.hvm import enumerate_assignments, induced_outputs
from gmbqc.obsset import compute_V
from gmbqc.phasefn import (
    PhaseFunction,
    StateNotSymmetric,
    certify_contextuality,
    coboundary,
    from_assignment,
    output_function,
    symmetry_solutions,
    verify_certificate,
)
from gmbqc.quantum import QuantumState, check_symmetry, ideal_output
from gmbqc.symgroup import trivial_action


def family_members(fam):
    """Every member of a symmetry family (small families only)."""
    dims = fam.free_dims
    for bits in itertools.product([0, 1], repeat=sum(dims)):
        choices, k = [], 0
        for d in dims:
            choices.append(np.array(bits[k:k + d], dtype=np.uint8))
            k += d
        yield fam.member(choices)


@pytest.fixture(scope="module")
def ghz_family(ghz):
    inst = ghz.instance
    V = compute_V(inst.obs)
    return symmetry_solutions(inst.obs, V, inst.action, inst.xi())


def test_zero_is_exact(ghz):
    d, exact = coboundary(PhaseFunction.zero(4, ghz.obs.size), ghz.action)
    assert exact and d.shape == (4, 4, ghz.obs.size)


@pytest.mark.parametrize("fixture", ["ghz", "bell"])
def test_assignments_give_exact_phase_functions(fixture, request):
    fix = request.getfixturevalue(fixture)
    V = compute_V(fix.obs)
    for s in enumerate_assignments(fix.obs).elements():
        phi = from_assignment(s, fix.action, fix.obs)
        assert coboundary(phi, fix.action)[1]
        assert phi.in_module(V)


def test_shifted_assignment_stays_exact(bell):
    V = compute_V(bell.obs)
    s = enumerate_assignments(bell.obs).elements()[0]
    phi = from_assignment(s, bell.action)
    for v in V.elements():
        phi2 = from_assignment(s ^ v, bell.action)
        assert coboundary(phi2, bell.action)[1]
        # difference is v(g a) + v(a)
        assert np.array_equal(phi2.values ^ phi.values, v[bell.action.perm_array()] ^ v[None, :])


def test_inconsistent_assignment_rejected(ghz):
    s = np.zeros(ghz.obs.size, dtype=np.uint8)
    s[1] = 1
    with pytest.raises(InvariantError):
        from_assignment(s, ghz.action, ghz.obs)


def test_trivial_group_phase_function():
    phi = from_assignment([0, 1, 1], trivial_action(3))
    assert phi.values.tolist() == [[0, 0, 0]]


def test_ghz_family_fixes_output_values(ghz, ghz_family):
    names = ghz.action.group.names
    g01 = names.index("g01")
    xxx, yxy = ghz.obs.index("XXX"), ghz.obs.index("YXY")
    x1, x3, y1, y3 = (ghz.obs.index(p) for p in ("XII", "IIX", "YII", "IIY"))
    count = 0
    for phi in family_members(ghz_family):
        count += 1
        assert phi[g01][xxx] == 1 and phi[g01][yxy] == 0
        assert phi[g01][x1] ^ phi[g01][x3] ^ phi[g01][y1] ^ phi[g01][y3] == 1
        d, exact = coboundary(phi, ghz.action)
        assert not exact
        g10 = names.index("g10")
        three = d[g10, g01, x1] ^ d[g01, g10, x1] ^ d[g01, g01, x3]
        # (dPhi)_{e,e} = Phi_e; the three-term identity needs Phi_e(X3) = 0
        assert three ^ d[0, 0, x3] == 1
        if not phi[0].any():
            assert three == 1
    assert count == 2 ** sum(ghz_family.free_dims)


def test_family_members_are_linear_on_products(ghz, ghz_family, rng):
    xxx = ghz.obs.index("XXX")
    xs = [ghz.obs.index(p) for p in ("XII", "IXI", "IIX")]
    for _ in range(50):
        phi = ghz_family.random_member(rng)
        for g in range(4):
            assert phi[g][xxx] == phi[g][xs[0]] ^ phi[g][xs[1]] ^ phi[g][xs[2]]
        assert check_symmetry(ghz.instance, phi)


def test_output_function(ghz, ghz_family, bell):
    phi = ghz_family.member()
    assert output_function(phi, ghz.instance.b_e, 0, ghz.obs).tolist() == [0, 1, 1, 1]
    assert output_function(PhaseFunction.zero(4, ghz.obs.size), 7, 1).tolist() == [1, 1, 1, 1]
    with pytest.raises(InvariantError):
        output_function(phi, 1, 0, ghz.obs)
    inst = bell.instance
    V = compute_V(inst.obs)
    fam = symmetry_solutions(inst.obs, V, inst.action, inst.xi())
    assert output_function(fam.member(), inst.b_e, 0).tolist() == [0, 1]


def test_product_state_breaks_symmetry(ghz):
    inst = dataclasses.replace(ghz.instance, state=QuantumState.product_plus(3))
    V = compute_V(inst.obs)
    with pytest.raises(StateNotSymmetric, match="not G-symmetric"):
        symmetry_solutions(inst.obs, V, inst.action, inst.xi())


def test_basis_state_leaves_everything_free(ghz):
    # <T_a> vanishes on every non-identity member, so no bit is constrained
    inst = dataclasses.replace(ghz.instance, state=QuantumState.basis("000"))
    V = compute_V(inst.obs)
    fam = symmetry_solutions(inst.obs, V, inst.action, inst.xi())
    assert fam.free_dims == [V.dim] * 4


def test_maximally_mixed_characteristic(ghz):
    V = compute_V(ghz.obs)
    xi = np.zeros(ghz.obs.size)
    xi[0] = 1.0
    fam = symmetry_solutions(ghz.obs, V, ghz.action, xi)
    assert fam.free_dims == [V.dim] * 4
    assert not fam.particular.any()


def test_ghz_is_contextual_with_checkable_certificate(ghz):
    inst = ghz.instance
    V = compute_V(inst.obs)
    verdict = certify_contextuality(inst.obs, V, inst.action, [0, 1, 1, 1], inst.b_e)
    assert verdict.contextual and verdict.label == "ContextualByProp1"
    assert verify_certificate(inst.obs, V, inst.action, [0, 1, 1, 1], inst.b_e, 0, verdict.certificate)
    # the same combination does not refute a constant output
    assert not verify_certificate(inst.obs, V, inst.action, [0, 0, 0, 0], inst.b_e, 0, verdict.certificate)
    assert not verify_certificate(inst.obs, V, inst.action, [0, 1, 1, 1], inst.b_e, 0, verdict.certificate[1:])


def test_bell_has_exact_witness(bell):
    inst = bell.instance
    V = compute_V(inst.obs)
    o = ideal_output(inst).o
    verdict = certify_contextuality(inst.obs, V, inst.action, o, inst.b_e)
    assert not verdict.contextual
    phi = verdict.witness
    assert coboundary(phi, inst.action)[1]
    assert phi.in_module(V)
    assert np.array_equal(output_function(phi, inst.b_e, int(o[0])), o)


def test_constant_output_has_zero_witness(ghz):
    V = compute_V(ghz.obs)
    verdict = certify_contextuality(ghz.obs, V, ghz.action, [1, 1, 1, 1], 7)
    assert not verdict.contextual


@pytest.mark.parametrize("fixture", ["ghz", "bell"])
def test_certification_consistent_with_assignments(fixture, request):
    # every output function reproduced by an assignment must admit an exact witness
    fix = request.getfixturevalue(fixture)
    inst = fix.instance
    V = compute_V(inst.obs)
    S = enumerate_assignments(inst.obs).elements()
    for o in {tuple(r) for r in induced_outputs(S, inst.action, inst.b_e)}:
        assert not certify_contextuality(inst.obs, V, inst.action, o, inst.b_e).contextual


def test_wrong_length_output_rejected(ghz):
    V = compute_V(ghz.obs)
    with pytest.raises(InvariantError):
        certify_contextuality(ghz.obs, V, ghz.action, [0, 1], 7)
