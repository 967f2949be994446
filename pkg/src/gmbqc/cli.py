"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 invariant violation (including bad
instance files and certificates that fail to verify), 3 size guard.
"""

from __future__ import annotations

import argparse
import json
import platform
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__, ext, hvm, proofs, quantum, quasi, report
from .errors import InvariantError, SizeGuardError
from .fixtures import BUILTINS, Fixture, builtin, fixture_from_json
from .obsset import compute_V
from .phasefn import verify_certificate
from .symgroup import FiniteGroup

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT, EXIT_SIZE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="seed for measurement sampling")
    p.add_argument("--format", choices=["json", "text", "csv"], default="json")
    p.add_argument("--canonical", action="store_true", help="omit environment-dependent fields")


def _source(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--fixture", help=f"built-in fixture ({', '.join(BUILTINS)})")
    g.add_argument("--instance", help="path to an instance JSON file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gmbqc", description="Contextuality and cohomology toolkit for group-input MBQC")
    parser.add_argument("--version", action="version", version=f"gmbqc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("example", help="full report for a built-in fixture")
    p.add_argument("name", help=f"one of: {', '.join(BUILTINS)}")
    p.add_argument("--shots", type=int, default=report.DEFAULT_SHOTS)
    _common(p)

    p = sub.add_parser("analyze", help="full report for an instance file")
    p.add_argument("path")
    p.add_argument("--shots", type=int, default=report.DEFAULT_SHOTS)
    _common(p)

    for name, hlp in (("delta", "minimal distance to a noncontextual output function"), ("witness", "witness value")):
        p = sub.add_parser(name, help=hlp)
        _source(p)
        p.add_argument("--output", help="output function as a bit string over G (default: ideal output)")
        _common(p)

    p = sub.add_parser("proof-search", help="parity and symmetry certificates")
    _source(p)
    _common(p)

    p = sub.add_parser("quasiprob", help="quasi-probability over phase space")
    _source(p)
    p.add_argument("--csv", action="store_true", help="emit CSV rows (same as --format csv)")
    _common(p)

    p = sub.add_parser("h2", help="dimension of the second cohomology group")
    p.add_argument("--group", required=True, help="e.g. Z2xZ2, Z2^3, Z4, or fixture:<name>")
    p.add_argument("--module", required=True, help="trivial:<dim> or fixture:<name>")
    _common(p)

    p = sub.add_parser("verify-certificate", help="re-check a certificate JSON file")
    _source(p)
    p.add_argument("certificate", help="path to certificate JSON")
    _common(p)
    return parser


def _load(args) -> Fixture:
    if getattr(args, "fixture", None):
        if args.fixture not in BUILTINS:
            raise UsageError(f"unknown fixture {args.fixture!r}")
        return builtin(args.fixture)
    return _load_path(args.instance)


def _load_path(path: str) -> Fixture:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvariantError(f"{path} is not valid JSON: {exc}") from None
    return fixture_from_json(data)


def _parse_o(text: Optional[str], order: int) -> Optional[np.ndarray]:
    if text is None:
        return None
    if len(text) != order or set(text) - {"0", "1"}:
        raise UsageError(f"--output must be a {order}-character bit string")
    return np.array([int(c) for c in text], dtype=np.uint8)


def _need_instance(fix: Fixture):
    if fix.instance is None:
        raise InvariantError(f"{fix.name} is not an MBQC instance (no reference context)")
    return fix.instance


def cmd_example(args) -> dict:
    if args.name not in BUILTINS:
        raise UsageError(f"unknown fixture {args.name!r}")
    return report.analyze(builtin(args.name), args.seed, args.shots)


def cmd_analyze(args) -> dict:
    return report.analyze(_load_path(args.path), args.seed, args.shots)


def cmd_delta(args) -> dict:
    fix = _load(args)
    inst = _need_instance(fix)
    o = _parse_o(args.output, inst.action.order)
    if o is None:
        o = quantum.ideal_output(inst).o
    d = hvm.delta(inst.obs, inst.action, o, inst.b_e)
    out = {"output": report._bits(o), "delta": d.delta, "classical_witness_max": d.classical_bound, "assignments": d.assignments}
    if d.delta is not None:
        red = hvm.classical_reduction(o, d.argmin, inst.action, inst.b_e, inst.obs)
        out["argmin"] = report._bits(d.argmin)
        out["reduction_table"] = [inst.action.group.names[g] for g in red.table]
    return out


def cmd_witness(args) -> dict:
    fix = _load(args)
    inst = _need_instance(fix)
    ideal = quantum.ideal_output(inst)
    o = _parse_o(args.output, inst.action.order)
    if o is None:
        o = ideal.o
    return {
        "output": report._bits(o),
        "witness": report._num(quantum.witness(inst, o)),
        "quantum_max": inst.action.order,
        "expectations": [report._num(x) for x in ideal.expectations],
    }


def cmd_proof_search(args) -> dict:
    fix = _load(args)
    return {"name": fix.name, **report.proofs_section(fix)}


def cmd_quasiprob(args):
    fix = _load(args)
    if fix.state is None:
        raise InvariantError(f"{fix.name} has no state")
    V = compute_V(fix.obs)
    Q = quasi.quasiprob(fix.state, fix.obs, V)
    if args.csv or args.format == "csv":
        return quasi.to_csv(Q, fix.obs)
    return {
        "name": fix.name,
        "dim_V": V.dim,
        "values": [report._num(x) for x in Q.values],
        "distinct_values": [report._num(x) for x in Q.distinct_values()],
        "total": report._num(Q.total),
    }


def _group_and_module(args):
    gspec, mspec = args.group, args.module
    if gspec.startswith("fixture:") or mspec.startswith("fixture:"):
        name = (mspec if mspec.startswith("fixture:") else gspec).split(":", 1)[1]
        if name not in BUILTINS:
            raise UsageError(f"unknown fixture {name!r}")
        fix = builtin(name)
        V = compute_V(fix.obs)
        N = ext.compute_N(fix.obs, V, fix.action)
        return fix.action.group, ext.module_matrices(fix.action, N), N.dim
    try:
        group = FiniteGroup.parse(gspec)
    except InvariantError as exc:
        raise UsageError(str(exc)) from None
    mats = ext.parse_module(mspec, group)
    return group, mats, mats[0].shape[0] if mats else 0


def cmd_h2(args) -> dict:
    group, mats, m = _group_and_module(args)
    res = ext.h2(group, mats, m)
    return {
        "group_order": group.order,
        "module_dim": m,
        "dim_H2": res.dim,
        "dim_cocycles": len(res.cocycle_basis),
        "dim_coboundaries": int(res.coboundary_basis.shape[0]),
        "d2_d1_zero": not np.any(res.d2.astype(np.int64) @ res.d1.astype(np.int64) % 2),
    }


def cmd_verify(args) -> dict:
    fix = _load(args)
    try:
        with open(args.certificate, encoding="utf-8") as fh:
            cert = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {args.certificate}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvariantError(f"certificate is not valid JSON: {exc}") from None
    kind = cert.get("type") if isinstance(cert, dict) else None
    n_rows = fix.obs.constraint_system.n_rows

    def row_vec(rows):
        v = np.zeros(n_rows, dtype=np.uint8)
        for r in rows:
            if not 0 <= int(r) < n_rows:
                raise InvariantError(f"row {r} out of range")
            v[int(r)] ^= 1
        return v

    if kind == "parity":
        ok = proofs.verify_parity(fix.obs, proofs.ParityCertificate(row_vec(cert["rows"])))
    elif kind == "symmetry":
        act = fix.extended
        if act is None:
            raise InvariantError("fixture has no proof group")
        names = list(act.group.names)
        if cert.get("h") not in names:
            raise InvariantError(f"unknown group element {cert.get('h')!r}")
        sc = proofs.SymmetryCertificate(row_vec(cert["rows"]), names.index(cert["h"]))
        ok = proofs.verify_symmetry(fix.obs, act, sc)
    elif kind == "obstruction":
        inst = _need_instance(fix)
        o = np.array([int(c) for c in cert["output"]], dtype=np.uint8)
        V = compute_V(inst.obs)
        ok = verify_certificate(inst.obs, V, inst.action, o, inst.b_e, int(o[0]), cert["certificate"])
    else:
        raise InvariantError("certificate type must be 'parity', 'symmetry' or 'obstruction'")
    if not ok:
        raise InvariantError("certificate failed verification")
    return {"type": kind, "valid": True}


COMMANDS = {
    "example": cmd_example,
    "analyze": cmd_analyze,
    "delta": cmd_delta,
    "witness": cmd_witness,
    "proof-search": cmd_proof_search,
    "quasiprob": cmd_quasiprob,
    "h2": cmd_h2,
    "verify-certificate": cmd_verify,
}


def _text(obj, prefix: str = "") -> list[str]:
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            key = f"{prefix}.{k}" if prefix else str(k)
            nested = isinstance(v, dict) or (isinstance(v, list) and any(isinstance(x, (dict, list)) for x in v))
            if nested and v:
                lines.extend(_text(v, key))
            else:
                lines.append(f"{key}: {_scalar(v)}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            lines.extend(_text(v, f"{prefix}[{i}]"))
    else:
        lines.append(f"{prefix}: {_scalar(obj)}")
    return lines


def _scalar(v) -> str:
    if isinstance(v, list):
        return " ".join(str(x) for x in v)
    return json.dumps(v) if v is None or isinstance(v, bool) else str(v)


def render(result, fmt: str, canonical: bool) -> str:
    if isinstance(result, str):
        return result
    if not canonical:
        result = {
            **result,
            "environment": {
                "gmbqc": __version__,
                "python": platform.python_version(),
                "numpy": np.__version__,
            },
        }
    if fmt == "text":
        return "\n".join(_text(result)) + "\n"
    if fmt == "csv":
        raise UsageError("CSV output is only available for quasiprob")
    return json.dumps(result, indent=2) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = COMMANDS[args.command](args)
        sys.stdout.write(render(result, args.format, args.canonical))
        return EXIT_OK
    except UsageError as exc:
        print(f"gmbqc: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SizeGuardError as exc:
        print(f"gmbqc: refused: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except InvariantError as exc:
        print(f"gmbqc: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
