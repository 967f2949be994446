import dataclasses

import numpy as np
import pytest

from gmbqc.errors import InvariantError, SizeGuardError
from gmbqc.obsset import compute_V
from gmbqc.pauli import Pauli, all_paulis
from gmbqc.phasefn import PhaseFunction, output_function, symmetry_solutions
from gmbqc.quantum import (
    DenseStandardMBQC,
    MBQCInstance,
    QuantumState,
    characteristic,
    check_lemma2_preconditions,
    check_symmetry,
    dense_expectation,
    embed_standard_mbqc,
    expectation,
    ideal_output,
    run,
    sample_outputs,
    stabilizer_group,
    witness,
)
from gmbqc.symgroup import FiniteGroup, trivial_action

BELL = QuantumState.from_vector([1, 0, 0, 1], normalize=True)


def labels(inst, idx):
    return [inst.obs.observables[a].letters for a in idx]


def test_state_validation():
    with pytest.raises(InvariantError):
        QuantumState.from_vector([1, 1])
    with pytest.raises(InvariantError):
        QuantumState.from_vector([1, 0, 0])
    assert QuantumState.from_vector([1, 1], normalize=True).n_qubits == 1


def test_ghz_expectations():
    psi = QuantumState.ghz(3)
    assert expectation(psi, Pauli.parse("XXX")) == 1.0
    assert expectation(psi, Pauli.parse("XYY")) == -1.0
    for p in ("XII", "IXI", "IIX", "YII", "IYI", "IIY"):
        assert expectation(psi, Pauli.parse(p)) == 0.0
    assert expectation(QuantumState.basis("0"), Pauli.parse("Z")) == 1.0


def test_expectation_matches_dense(rng):
    psi = QuantumState.from_vector(rng.normal(size=8) + 1j * rng.normal(size=8), normalize=True)
    for p in all_paulis(3):
        assert abs(expectation(psi, p) - dense_expectation(psi, p)) < 1e-12


def test_stabilizer_expansion():
    psi = QuantumState.from_stabilizers(["+XXX", "-XYY", "-YXY", "-YYX"])
    assert abs(abs(np.vdot(psi.amplitudes, QuantumState.ghz(3).amplitudes)) - 1) < 1e-12
    with pytest.raises(InvariantError):
        QuantumState.from_stabilizers(["XX", "ZI"])  # anticommuting
    with pytest.raises(InvariantError):
        QuantumState.from_stabilizers(["ZZ"])  # too few generators


def test_characteristic_normalised(ghz):
    xi = characteristic(ghz.state, ghz.obs)
    assert xi[0] == 1.0 and np.all(np.abs(xi) <= 1)


def test_ghz_contexts(ghz):
    inst = ghz.instance
    names = inst.group.names
    assert labels(inst, inst.context(0)) == ["XII", "IXI", "IIX"]
    assert labels(inst, inst.context(names.index("g01"))) == ["XII", "IYI", "IIY"]
    assert labels(inst, inst.context(names.index("g10*g01"))) == ["YII", "IYI", "IIX"]


def test_instance_validation(ghz):
    inst = ghz.instance
    with pytest.raises(InvariantError, match="not measurable"):
        dataclasses.replace(inst, reference_context=(1, 2, 7))
    with pytest.raises(InvariantError, match="product"):
        dataclasses.replace(inst, reference_context=(1, 2, 6))
    with pytest.raises(InvariantError):
        dataclasses.replace(inst, state=QuantumState.basis("00"))


def test_runs_are_deterministic(ghz, bell):
    inst = ghz.instance
    for seed in range(20):
        for g, want in enumerate([0, 1, 1, 1]):
            outcomes, o = run(inst, g, seed)
            assert o == want and set(outcomes) == set(inst.context(g))
    assert run(inst, 1, 7) == run(inst, 1, 7)
    for seed in range(10):
        assert run(bell.instance, 1, seed)[1] == 1


def test_ghz_ideal_output_and_witness(ghz):
    ideal = ideal_output(ghz.instance)
    assert ideal.o.tolist() == [0, 1, 1, 1]
    assert ideal.success.tolist() == [1.0, 1.0, 1.0, 1.0]
    assert not ideal.degenerate
    assert witness(ghz.instance, ideal.o) == 4.0
    assert witness(ghz.instance, [0, 0, 0, 0]) == 1.0


def test_plus_state_ties_are_flagged(ghz):
    inst = dataclasses.replace(ghz.instance, state=QuantumState.product_plus(3))
    ideal = ideal_output(inst)
    assert ideal.o.tolist() == [0, 0, 0, 0]
    assert ideal.success[0] == 1.0 and np.allclose(ideal.success[1:], 0.5)
    assert ideal.degenerate == [1, 2, 3]
    assert 0 <= witness(inst, [1, 0, 1, 0]) <= 4


def test_sampling_within_three_sigma(ghz):
    inst = dataclasses.replace(ghz.instance, state=QuantumState.product_plus(3))
    shots = 10_000
    ev = ideal_output(inst).expectations
    for g in range(4):
        o = sample_outputs(inst, g, shots, seed=g)
        p = (1 + ev[g]) / 2  # probability of parity 0
        freq = float(np.mean(o == 0))
        sigma = np.sqrt(p * (1 - p) / shots)
        assert abs(freq - p) <= 3 * sigma + 1e-12


def test_check_symmetry(ghz):
    inst = ghz.instance
    V = compute_V(inst.obs)
    fam = symmetry_solutions(inst.obs, V, inst.action, inst.xi())
    assert check_symmetry(inst, fam.member())
    assert not check_symmetry(inst, PhaseFunction.zero(4, inst.obs.size))


def test_trivial_group_symmetry(qubit):
    inst = MBQCInstance(qubit.obs, trivial_action(qubit.obs.size), (3,), 3, QuantumState.basis("0"))
    assert check_symmetry(inst, PhaseFunction.zero(1, qubit.obs.size))


def test_output_relation(ghz):
    inst = ghz.instance
    V = compute_V(inst.obs)
    phi = symmetry_solutions(inst.obs, V, inst.action, inst.xi()).member()
    want = output_function(phi, inst.b_e, 0)
    got = [run(inst, g, seed=3)[1] for g in range(4)]
    assert got == want.tolist()


def test_uniform_success_for_symmetric_state(ghz, bell):
    for fix in (ghz, bell):
        s = ideal_output(fix.instance).success
        assert np.ptp(s) <= 1e-9


def test_stabilizer_group():
    stab = stabilizer_group(QuantumState.ghz(3))
    assert len(stab) == 8
    assert Pauli.parse("-XYY") in stab and Pauli.parse("+ZZI") in stab
    t = QuantumState.from_vector([1, np.exp(1j * np.pi / 4)], normalize=True)
    assert stabilizer_group(t) is None


def test_lemma2_ghz(ghz):
    rep = check_lemma2_preconditions(ghz.instance)
    assert rep.stabilizer_state and rep.uniform_success and rep.no_qubit_disentangled
    assert rep.preconditions_hold and rep.symmetry_holds
    assert rep.z_restriction == [True, True, True]


def test_lemma2_bell(bell):
    rep = check_lemma2_preconditions(bell.instance)
    assert rep.preconditions_hold and rep.symmetry_holds


def test_lemma2_basis_state_fails(ghz):
    inst = dataclasses.replace(ghz.instance, state=QuantumState.basis("000"))
    rep = check_lemma2_preconditions(inst)
    assert not rep.no_qubit_disentangled
    assert not rep.preconditions_hold


def test_lemma2_needs_stabilizer_state(ghz, rng):
    psi = QuantumState.from_vector(rng.normal(size=8), normalize=True)
    inst = dataclasses.replace(ghz.instance, state=psi)
    with pytest.raises(InvariantError, match="precondition check unavailable"):
        check_lemma2_preconditions(inst)


def test_embedding_reproduces_bell_fixture(bell):
    inst = embed_standard_mbqc(1, 2, [[1], [1]], np.pi / 4, BELL)
    assert labels(inst, inst.context(0)) == ["XI", "IX"]
    assert labels(inst, inst.context(1)) == ["YI", "IY"]
    assert ideal_output(inst).o.tolist() == [0, 1]
    assert np.allclose(ideal_output(inst).expectations, ideal_output(bell.instance).expectations)


def test_embedding_two_bell_pairs():
    psi = QuantumState.from_vector(np.kron(BELL.amplitudes, BELL.amplitudes))
    Q = [[1, 0], [1, 0], [0, 1], [0, 1]]
    inst = embed_standard_mbqc(2, 4, Q, np.pi / 4, psi)
    names = inst.group.names
    for g in range(4):
        bits = [int(c) for c in names[g]]
        outcomes, o = run(inst, g, seed=g)
        s = [outcomes[a] for a in inst.context(g)]
        # each pair reproduces its own input bit
        assert (s[0] ^ s[1], s[2] ^ s[3]) == (bits[0], bits[1])
        assert o == bits[0] ^ bits[1]


def test_embedding_zero_wiring():
    inst = embed_standard_mbqc(2, 2, [[0, 0], [0, 0]], np.pi / 4, BELL)
    assert all(inst.context(g) == inst.context(0) for g in range(4))


def test_embedding_flat_angle_is_trivial():
    inst = embed_standard_mbqc(1, 2, [[1], [1]], 0.0, BELL)
    assert inst.context(0) == inst.context(1)


def test_embedding_lab_frame_matches_dense(rng):
    psi = QuantumState.from_vector(rng.normal(size=8) + 1j * rng.normal(size=8), normalize=True)
    Q = np.array([[1, 0], [0, 1], [1, 1]], dtype=np.uint8)
    inst = embed_standard_mbqc(2, 3, Q, np.pi / 4, psi, frame="lab")
    dense = DenseStandardMBQC(2, 3, Q, np.pi / 4, psi, FiniteGroup.abelian([2, 2]))
    want = [dense.output_expectation(g) for g in range(4)]
    assert np.allclose(ideal_output(inst).expectations, want)


def test_generic_angle_uses_dense_fallback():
    dense = embed_standard_mbqc(1, 2, [[1], [1]], 0.3, BELL)
    assert isinstance(dense, DenseStandardMBQC)
    # <O_1[q] O_2[q]> on the Bell state is cos^2 - sin^2 (q=0) and cos 2phi as well for q=1
    assert np.isclose(dense.output_expectation(0), np.cos(0.6))
    assert np.isclose(dense.output_expectation(1), np.cos(0.6))
    assert dense.run(1, seed=4) == dense.run(1, seed=4)


def test_embedding_shape_checks():
    with pytest.raises(InvariantError):
        embed_standard_mbqc(2, 2, [[1], [1]], np.pi / 4, BELL)
    with pytest.raises(InvariantError):
        embed_standard_mbqc(1, 3, [[1], [1], [1]], np.pi / 4, BELL)


def test_size_guards():
    with pytest.raises(SizeGuardError):
        stabilizer_group(QuantumState.basis("0" * 9))


def test_stabilizer_sign_conflict():
    with pytest.raises(InvariantError, match="inconsistent"):
        QuantumState.from_stabilizers(["XX", "ZZ", "+YY"])  # XX ZZ = -YY
    bell = QuantumState.from_stabilizers(["XX", "ZZ", "-YY"])
    assert np.allclose(bell.amplitudes, BELL.amplitudes)
