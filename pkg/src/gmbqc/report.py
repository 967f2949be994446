"""Full analysis pipeline producing JSON-ready reports."""

from __future__ import annotations

from typing import Optional

import numpy as np

from . import ext, hvm, proofs, quantum, quasi
from .errors import InvariantError, SizeGuardError
from .fixtures import Fixture
from .obsset import check_separation, compute_V
from .phasefn import certify_contextuality, coboundary, symmetry_solutions

DEFAULT_SHOTS = 1000


def _bits(v) -> str:
    return "".join(str(int(b)) for b in v)


def _num(x: float) -> float:
    # fixed precision keeps reports byte-stable across BLAS builds
    return float(round(float(x), 12)) + 0.0


def summary(fix: Fixture) -> dict:
    obs = fix.obs
    lab = obs.labels()
    out = {
        "name": fix.name,
        "n_qubits": obs.n_qubits,
        "observables": lab,
        "measurable": [lab[i] for i in obs.measurable],
        "outputs": [lab[i] for i in obs.outputs],
        "group": {"order": fix.action.order, "elements": list(fix.action.group.names)},
    }
    if fix.instance is not None:
        inst = fix.instance
        out["contexts"] = {
            fix.action.group.names[g]: [lab[a] for a in inst.context(g)] for g in range(fix.action.order)
        }
        out["b_e"] = lab[inst.b_e]
    return out


def constraints_section(fix: Fixture) -> dict:
    V = compute_V(fix.obs)
    cs = fix.obs.constraint_system
    space = hvm.enumerate_assignments(fix.obs)
    return {
        "relations": cs.n_rows,
        "dim_V": V.dim,
        "separation": check_separation(fix.obs, V),
        "assignments": {"empty": space.empty, "dim": space.dim, "count": space.size},
    }


def proofs_section(fix: Fixture) -> dict:
    out: dict = {}
    par = proofs.find_parity_proof(fix.obs)
    out["parity"] = par.to_json() if par else None
    ext_act = fix.extended
    if ext_act is not None:
        sym = proofs.find_symmetry_proof(fix.obs, ext_act)
        out["symmetry"] = sym.to_json() if sym else None
        if sym is not None:
            out["symmetry_implies_parity"] = proofs.relate(sym, fix.obs, ext_act).to_json()
        out["sign_free_action"] = proofs.check_lemma4(ext_act)
    return out


def quasi_section(fix: Fixture) -> Optional[dict]:
    if fix.state is None:
        return None
    V = compute_V(fix.obs)
    if not check_separation(fix.obs, V):
        return {"available": False, "reason": "V does not separate the observables"}
    Q = quasi.quasiprob(fix.state, fix.obs, V)
    xi = quantum.characteristic(fix.state, fix.obs)
    return {
        "available": True,
        "points": V.order,
        "distinct_values": [_num(x) for x in Q.distinct_values()],
        "total": _num(Q.total),
        "negativity": _num(-Q.values[Q.values < 0].sum()),
        "fourier_roundtrip_error": _num(np.abs(quasi.fourier(Q) - xi).max()),
    }


def mbqc_section(fix: Fixture, seed: int, shots: int) -> Optional[dict]:
    inst = fix.instance
    if inst is None or inst.state is None:
        return None
    obs, act = inst.obs, inst.action
    names = act.group.names
    V = compute_V(obs)
    ideal = quantum.ideal_output(inst)
    o = ideal.o
    out: dict = {
        "xi": [_num(x) for x in inst.xi()],
        "ideal_output": _bits(o),
        "success": [_num(x) for x in ideal.success],
        "degenerate": [names[g] for g in ideal.degenerate],
        "witness": _num(quantum.witness(inst, o)),
        "witness_quantum_max": act.order,
    }
    rng = np.random.default_rng(seed)
    freq = {}
    for g in range(act.order):
        hits = sum(quantum._run(inst, g, rng)[1] == o[g] for _ in range(shots))
        freq[names[g]] = hits / shots
    out["sampling"] = {"seed": seed, "shots": shots, "agreement": freq}

    fam = None
    try:
        fam = symmetry_solutions(obs, V, act, inst.xi())
        sym = {"exists": fam is not None}
    except InvariantError as exc:
        sym = {"exists": False, "error": str(exc)}
    if fam is not None:
        phi = fam.member()
        _, exact = coboundary(phi, act)
        sym.update({"free_dims": fam.free_dims, "particular": phi.to_json(names), "particular_exact": exact})
    out["phase_function"] = sym

    verdict = certify_contextuality(obs, V, act, o, inst.b_e)
    cert: dict = {"verdict": verdict.label}
    if verdict.contextual:
        cert["certificate"] = verdict.certificate
    else:
        cert["witness"] = verdict.witness.to_json(names)
        runs = [
            hvm.cc_coprocessor(obs, act, verdict.witness, act.group.words[g], inst.b_e, inst.reference_context)
            for g in range(act.order)
        ]
        cert["coprocessor"] = {
            "outputs": _bits([r.output ^ int(o[act.group.identity]) for r in runs]),
            "memory_cells": max(r.memory_cells for r in runs),
            "memory_bound": runs[0].memory_bound,
        }
    out["certification"] = cert

    try:
        d = hvm.delta(obs, act, o, inst.b_e)
        dsec: dict = {"delta": d.delta, "classical_witness_max": d.classical_bound, "assignments": d.assignments}
        if d.delta is not None:
            red = hvm.classical_reduction(o, d.argmin, act, inst.b_e, obs)
            dsec["argmin"] = _bits(d.argmin)
            dsec["reduction_table"] = [names[g] for g in red.table]
            dsec["parity_bound"] = hvm.parity_lower_bound(obs, act, o, inst.b_e)
    except SizeGuardError as exc:
        dsec = {"refused": str(exc)}
    out["hvm"] = dsec

    if fam is not None:
        try:
            N = ext.compute_N(obs, V, act)
            mats = ext.module_matrices(act, N)
            lam = ext.lambda_from_phase(fam.member(), act, N)
            res = ext.h2(act.group, mats, N.dim)
            rep = ext.classify(lam, act.group, mats, res)
            out["extension"] = {"dim_N": N.dim, "dim_H2": res.dim, "lambda_class_trivial": not rep.any()}
        except (InvariantError, SizeGuardError) as exc:
            out["extension"] = {"unavailable": str(exc)}

    if obs.n_qubits <= quantum.MAX_STABILIZER_SCAN_QUBITS:
        try:
            out["stabilizer_preconditions"] = quantum.check_lemma2_preconditions(inst).to_json()
        except InvariantError as exc:
            out["stabilizer_preconditions"] = {"unavailable": str(exc)}
    return out


def analyze(fix: Fixture, seed: int = 0, shots: int = DEFAULT_SHOTS) -> dict:
    rep = {"instance": summary(fix), "constraints": constraints_section(fix), "proofs": proofs_section(fix)}
    q = quasi_section(fix)
    if q is not None:
        rep["quasiprobability"] = q
    m = mbqc_section(fix, seed, shots)
    if m is not None:
        rep["mbqc"] = m
    return rep
