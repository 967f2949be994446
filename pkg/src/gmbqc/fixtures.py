"""Built-in observable configurations used throughout the tests and the CLI.

Qubits are numbered from 0 here, so the two-qubit gate ``A_1 A_2`` of the
usual 1-based notation is ``[("A", 0), ("A", 1)]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import InvariantError
from .obsset import ObservableSet
from .quantum import MBQCInstance, QuantumState, make_instance
from .symgroup import (
    FiniteGroup,
    GroupAction,
    SignedPerm,
    action_from_circuit,
    from_homomorphism,
    generate,
    trivial_action,
)

GHZ_MEASURABLE = ["XII", "IXI", "IIX", "YII", "IYI", "IIY"]
GHZ_OUTPUTS = ["XXX", "XYY", "YXY", "YYX"]
GHZ_GENERATORS = {"g01": [("A", 1), ("A", 2)], "g10": [("A", 0), ("A", 2)]}
GHZ_STABILIZERS = ["+XXX", "-XYY", "-YXY", "-YYX"]

SQUARE_OBSERVABLES = ["II", "XI", "IX", "XX", "ZI", "IZ", "ZZ", "XZ", "ZX", "YY"]
SQUARE_CONTEXTS = [
    ["XI", "IX", "XX"],
    ["IZ", "ZI", "ZZ"],
    ["XZ", "ZX", "YY"],
    ["XI", "IZ", "XZ"],
    ["IX", "ZI", "ZX"],
    ["XX", "ZZ", "YY"],
]


@dataclass
class Fixture:
    name: str
    obs: ObservableSet
    action: GroupAction
    state: Optional[QuantumState] = None
    instance: Optional[MBQCInstance] = None
    extended: Optional[GroupAction] = None
    description: str = ""


def _ghz_instance(name="ghz-or") -> MBQCInstance:
    meas = GHZ_MEASURABLE
    obs = ObservableSet.build(["III", *meas, *GHZ_OUTPUTS], meas, GHZ_OUTPUTS)
    circuits = list(GHZ_GENERATORS.values())
    gens = [action_from_circuit(obs, c) for c in circuits]
    ref = [obs.index(p) for p in ("XII", "IXI", "IIX")]
    return make_instance(
        obs,
        gens,
        ref,
        obs.index("XXX"),
        QuantumState.ghz(3),
        name=name,
        generator_names=list(GHZ_GENERATORS),
        circuits=circuits,
    )


def ghz_or() -> Fixture:
    inst = _ghz_instance()
    return Fixture(
        "ghz-or",
        inst.obs,
        inst.action,
        inst.state,
        inst,
        inst.action,
        "three-qubit GHZ resource computing OR of two input bits",
    )


def bell_identity() -> Fixture:
    meas = ["XI", "IX", "YI", "IY"]
    outs = ["XX", "YY"]
    obs = ObservableSet.build(None, meas, outs)
    circ = [("A", 0), ("A", 1)]
    bell = QuantumState.from_vector([1, 0, 0, 1], normalize=True)
    inst = make_instance(
        obs,
        [action_from_circuit(obs, circ)],
        [obs.index("XI"), obs.index("IX")],
        obs.index("XX"),
        bell,
        name="bell-identity",
        generator_names=["g1"],
        circuits=[circ],
    )
    return Fixture("bell-identity", inst.obs, inst.action, bell, inst, inst.action, "Bell pair computing o(i) = i")


def mermin_square() -> Fixture:
    obs = ObservableSet.build(SQUARE_OBSERVABLES, SQUARE_OBSERVABLES[1:], (), SQUARE_CONTEXTS)
    ext = generate([action_from_circuit(obs, [("H", 0)])], names=["H1"], circuits=[[("H", 0)]])
    return Fixture(
        "mermin-square",
        obs,
        trivial_action(obs.size),
        None,
        None,
        ext,
        "two-qubit magic square with the Hadamard on the first qubit as extra symmetry",
    )


def mermin_star() -> Fixture:
    inst = _ghz_instance(name="mermin-star")
    # the fifth line of the star: the four outputs multiply to -I
    obs = inst.obs.with_contexts([[inst.obs.index(p) for p in GHZ_OUTPUTS]])
    return Fixture(
        "mermin-star",
        obs,
        inst.action,
        inst.state,
        None,
        inst.action,
        "state-independent star: GHZ set plus the line of the four outputs",
    )


def dressed_star() -> Fixture:
    base = _ghz_instance().obs
    obs = ObservableSet.build(
        [*base.observables, "ZZI", "ZIZ", "IZZ"],
        GHZ_MEASURABLE,
        GHZ_OUTPUTS,
        [[base.observables[i] for i in c] for c in base.contexts],
    )
    circuits = list(GHZ_GENERATORS.values())
    ext = generate(
        [action_from_circuit(obs, c) for c in circuits],
        names=list(GHZ_GENERATORS),
        circuits=circuits,
    )
    return Fixture(
        "dressed-star",
        obs,
        ext,
        QuantumState.ghz(3),
        None,
        ext,
        "GHZ set enlarged by ZZI, ZIZ, IZZ; the input group now flips signs",
    )


def one_qubit() -> Fixture:
    obs = ObservableSet.build(["I", "X", "Y", "Z"], ["X", "Y", "Z"], ())
    return Fixture(
        "one-qubit",
        obs,
        trivial_action(obs.size),
        QuantumState.basis("0"),
        None,
        None,
        "single qubit with all three Paulis",
    )


BUILTINS = {
    "ghz-or": ghz_or,
    "bell-identity": bell_identity,
    "mermin-square": mermin_square,
    "mermin-star": mermin_star,
    "dressed-star": dressed_star,
    "one-qubit": one_qubit,
}


def builtin(name: str) -> Fixture:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise InvariantError(f"unknown fixture {name!r}; choose from {sorted(BUILTINS)}") from None


# --- instance files -------------------------------------------------------

def _parse_generators(block, obs: ObservableSet):
    gens, names, circuits = [], [], []
    for i, spec in enumerate(block.get("generators", [])):
        if not isinstance(spec, dict):
            raise InvariantError("each group generator must be an object")
        names.append(str(spec.get("name", f"r{i}")))
        if "gates" in spec:
            circ = [(str(g), int(q)) for g, q in spec["gates"]]
            gens.append(action_from_circuit(obs, circ))
            circuits.append(circ)
        elif "perm" in spec:
            gens.append(SignedPerm.from_arrays(spec["perm"], spec.get("signs")))
            circuits.append(None)
        else:
            raise InvariantError("group generator needs 'gates' or 'perm'")
    if any(c is None for c in circuits):
        circuits = None
    return gens, names, circuits


def _build_action(block, obs: ObservableSet) -> GroupAction:
    if not block:
        return trivial_action(obs.size)
    gens, names, circuits = _parse_generators(block, obs)
    if "abstract" in block:
        return from_homomorphism(FiniteGroup.parse(block["abstract"]), gens, circuits)
    return generate(gens, names=names, circuits=circuits, size=obs.size)


def _parse_state(block) -> Optional[QuantumState]:
    if block is None:
        return None
    kind = block.get("type")
    if kind == "stabilizer":
        return QuantumState.from_stabilizers(block["generators"])
    if kind == "vector":
        amps = []
        for x in block["amplitudes"]:
            amps.append(complex(x[0], x[1]) if isinstance(x, (list, tuple)) else complex(x))
        return QuantumState.from_vector(amps, normalize=bool(block.get("normalize", False)))
    raise InvariantError(f"unknown state type {kind!r}")


def fixture_from_json(data: dict) -> Fixture:
    """Build a fixture from the instance-file schema (see README)."""
    if not isinstance(data, dict):
        raise InvariantError("instance file must contain a JSON object")
    if not any(data.get(k) for k in ("observables", "measurable", "outputs")):
        raise InvariantError("instance schema violation: no observables given")
    try:
        name = str(data.get("name", "instance"))
        obs = ObservableSet.build(
            data.get("observables"),
            data.get("measurable", []),
            data.get("outputs", []),
            data.get("contexts", []),
        )
        if "n_qubits" in data and int(data["n_qubits"]) != obs.n_qubits:
            raise InvariantError("n_qubits does not match the observables")
        state = _parse_state(data.get("state"))
        ext = _build_action(data["extended_group"], obs) if data.get("extended_group") else None
        if "reference_context" in data:
            block = data.get("group") or {}
            gens, names, circuits = _parse_generators(block, obs)
            group = FiniteGroup.parse(block["abstract"]) if "abstract" in block else None
            inst = make_instance(
                obs,
                gens,
                [obs.index(p) for p in data["reference_context"]],
                obs.index(data["b_e"]),
                state,
                name=name,
                generator_names=names,
                circuits=circuits,
                group=group,
            )
            return Fixture(name, inst.obs, inst.action, state, inst, ext or inst.action, str(data.get("description", "")))
        action = _build_action(data.get("group"), obs)
        return Fixture(name, obs, action, state, None, ext, str(data.get("description", "")))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvariantError):
            raise
        raise InvariantError(f"instance schema violation: {exc}") from None


def _group_json(action: GroupAction) -> dict:
    gens = []
    names = action.group.names
    for i, g in enumerate(action.group.generators):
        entry = {"name": names[g]}
        if action.generator_circuits is not None:
            entry["gates"] = [[gate, q] for gate, q in action.generator_circuits[i]]
        else:
            entry["perm"] = list(action.perm(g))
            entry["signs"] = list(action.signs(g))
        gens.append(entry)
    return {"generators": gens}


def fixture_to_json(fix: Fixture) -> dict:
    obs = fix.obs
    lab = obs.labels()
    out: dict = {"name": fix.name, "n_qubits": obs.n_qubits, "observables": lab}
    out["measurable"] = [lab[i] for i in obs.measurable]
    out["outputs"] = [lab[i] for i in obs.outputs]
    out["contexts"] = [[lab[i] for i in c] for c in obs.contexts]
    if fix.instance is not None:
        out["reference_context"] = [lab[i] for i in fix.instance.reference_context]
        out["b_e"] = lab[fix.instance.b_e]
    if fix.action.order > 1:
        out["group"] = _group_json(fix.action)
    if fix.extended is not None and fix.extended.order > 1:
        out["extended_group"] = _group_json(fix.extended)
    if fix.state is not None:
        out["state"] = {
            "type": "vector",
            "amplitudes": [[float(a.real), float(a.imag)] for a in fix.state.amplitudes],
        }
    if fix.description:
        out["description"] = fix.description
    return out
