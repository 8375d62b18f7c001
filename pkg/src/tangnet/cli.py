"""Command-line front end: ``tangnet <command> [FILE] [options]``.

Exit status is 0 on success, 1 on a domain error (bad input file, invalid
state, failed invariant) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import json
import math
import sys

import numpy as np

from . import infometrics, states, structure, symmetry
from .errors import ArgumentError, ParseError, TangnetError
from .notation import diagrams, dsl


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False) + "\n"


def _parties(text: str) -> list[str]:
    items = [p.strip() for p in text.split(",") if p.strip()]
    if not items:
        raise ArgumentError("empty party list")
    return items


def _roles(text: str) -> dict[str, str]:
    """``S1=A,E1=B`` -> ``{"A": "S1", "B": "E1"}``; a role may be repeated."""
    out = {}
    for item in text.split(","):
        if not item.strip():
            continue
        role, sep, party = item.partition("=")
        if not sep:
            raise ArgumentError(f"bad role assignment {item!r}; use ROLE=PARTY")
        party = party.strip()
        if party in out:
            raise ArgumentError(f"party {party!r} assigned twice")
        out[party] = role.strip()
    return out


def _load(args) -> dsl.SpecDocument:
    try:
        with open(args.file, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ArgumentError(f"cannot read {args.file}: {exc.strerror}") from None
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = raw[: exc.start].count(b"\n") + 1
        col = exc.start - (raw.rfind(b"\n", 0, exc.start) + 1) + 1
        raise ParseError("input is not valid UTF-8", line, col, ["UTF-8 text"]) from None
    return dsl.parse(text, normalize=args.normalize)


def _state(args, doc) -> states.PureState:
    try:
        return doc.state(args.state)
    except KeyError as exc:
        raise ArgumentError(exc.args[0]) from None


def _model(args, doc) -> states.PartitionModel:
    if getattr(args, "roles", None):
        return states.PartitionModel.infer(_roles(args.roles))
    model = doc.partition()
    if model is None:
        raise ArgumentError("no roles given: add a roles block or pass --roles")
    return model


def _matrix(m: np.ndarray) -> dict:
    return {"re": np.real(m).tolist(), "im": np.imag(m).tolist()}


def cmd_parse(args, out):
    doc = _load(args)
    if args.format:
        model = doc.partition()
        if model is None:
            raise ArgumentError("partition diagram needs a roles block")
        out.write(diagrams.emit_partition_diagram(model, args.format).body)
        return
    text = dsl.format_document(doc)
    if args.json:
        model = doc.partition()
        out.write(_dump({"canonical": text, "states": doc.state_names(),
                         "parties": [list(p) for p in doc.parties],
                         "model_kind": model.kind if model else None}))
    else:
        out.write(text)


def cmd_entropy(args, out):
    doc = _load(args)
    psi = _state(args, doc)
    keep = _parties(args.keep) if args.keep else list(psi.space.labels)
    s = infometrics.entropy(psi, keep)
    out.write(_dump({"entropy": s, "keep": keep, "units": "bits"}) if args.json else f"{s!r}\n")


def cmd_mi(args, out):
    doc = _load(args)
    psi = _state(args, doc)
    a, b = _parties(args.a), _parties(args.b)
    given = _parties(args.given) if args.given else []
    value = infometrics.conditional_mutual_info(psi, a, b, given)
    if args.json:
        out.write(_dump({"a": a, "b": b, "given": given, "mutual_info": value, "units": "bits"}))
    else:
        out.write(f"{value!r}\n")


def cmd_mi7(args, out):
    doc = _load(args)
    report = infometrics.multiworld_mi(_state(args, doc), _model(args, doc))
    if args.json:
        out.write(report.to_json())
        return
    out.write(f"model: {report.model_kind}\n")
    for name in infometrics.TERM_NAMES:
        out.write(f"{name} = {report.terms[name]!r}\n")
    out.write(f"I_total = {report.I_total!r}\n")
    flags = ", ".join(k for k, v in sorted(report.flags.items()) if v) or "none"
    out.write(f"reduction cases: {flags}\n")


def cmd_schmidt(args, out):
    doc = _load(args)
    psi = _state(args, doc)
    left = _parties(args.left) if args.left else [psi.space.labels[0]]
    sd = states.schmidt(psi, left)
    coeffs = sd.coefficients.tolist()
    if args.json:
        out.write(_dump({"cut": [list(sd.cut[0]), list(sd.cut[1])], "coefficients": coeffs,
                         "rank": sd.rank}))
    else:
        out.write(" ".join(repr(c) for c in coeffs) + "\n")


def cmd_reduce(args, out):
    doc = _load(args)
    psi = _state(args, doc)
    model = _model(args, doc)
    target = _parties(args.target)
    rho = states.reduce(psi, model, target)
    p = states.purity(rho)
    pure = states.is_approx_pure(rho, args.tol)
    if args.json:
        out.write(_dump({"parties": list(rho.space.labels), "matrix": _matrix(rho.matrix),
                         "purity": p, "is_approx_pure": pure, "eps": args.tol}))
    else:
        out.write(f"parties: {','.join(rho.space.labels)}\n")
        out.write(np.array2string(rho.matrix, precision=6, suppress_small=True) + "\n")
        out.write(f"purity = {p!r}\nis_approx_pure(eps={args.tol:g}) = {pure}\n")


def cmd_structure(args, out):
    doc = _load(args)
    qs = structure.structure_from_state(_state(args, doc))
    if args.format:
        out.write(diagrams.emit_structure_diagram(qs, args.format).body)
    elif args.json:
        out.write(qs.to_json())
    else:
        for b in qs.branches:
            out.write(f"{b.nodes} {diagrams.branch_label(b.length, b.orientation)}\n")


def cmd_classify(args, out):
    doc = _load(args)
    cls = structure.classify(structure.structure_from_state(_state(args, doc)))
    if args.json:
        out.write(_dump(cls.to_dict()))
    else:
        out.write(f"pairing: {cls.pairing}\nweights: {list(cls.weight_profile)}\n"
                  f"phases: {list(cls.phase_class)}\n")


def cmd_symmetry(args, out):
    doc = _load(args)
    psi = _state(args, doc)
    ops = [args.op] if args.op else None
    summary = symmetry.out_in_suite(psi, args.trials, args.seed, ops, tol=args.tol,
                                    raise_on_violation=False)
    if args.json:
        out.write(summary.to_json())
    else:
        out.write(f"trials: {summary.trials} ops: {','.join(summary.operations)}\n")
        out.write(f"worst Schmidt distance: {summary.worst_schmidt_distance:.3e}\n")
        out.write(f"worst envariance residual: {summary.worst_envariance_residual:.3e}\n")
        out.write(f"class checks: {summary.class_checks} changes: {summary.class_changes}\n")
        out.write("ok\n" if summary.ok else "FAILED\n" + "\n".join(summary.violations) + "\n")
    if not summary.ok:
        return 1


def _overlap(text: str) -> complex:
    try:
        z = complex(text.replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid overlap {text!r}") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise argparse.ArgumentTypeError("overlap must be finite")
    return z


def _finite(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number {text!r}") from None
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError("value must be finite")
    return x


def cmd_demo(args, out):
    if args.demo == "rabi":
        value = infometrics.rabi_entanglement(args.gt)
        payload = {"demo": "rabi", "gt": args.gt, "entanglement": value, "units": "bits"}
    else:
        value = infometrics.slit_visibility(args.overlap)
        payload = {"demo": "slit", "overlap": [args.overlap.real, args.overlap.imag],
                   "visibility": value}
    out.write(_dump(payload) if args.json else f"{value!r}\n")


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _positive_float(text: str) -> float:
    x = _finite(text)
    if x <= 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return x


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON (sorted keys)")
    common.add_argument("--tol", type=_positive_float, default=1e-8, help="numerical tolerance")
    common.add_argument("--seed", type=_u64, default=0, help="random seed (u64)")
    common.add_argument("--format", choices=("dot", "svg"), help="emit a diagram instead")
    common.add_argument("--normalize", action="store_true",
                        help="renormalize off-norm states instead of rejecting them")

    parser = argparse.ArgumentParser(prog="tangnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help, file=True):
        p = sub.add_parser(name, parents=[common], help=help)
        if file:
            p.add_argument("file", help="input .tgn file")
            p.add_argument("--state", help="state name (default: first declared)")
        p.set_defaults(func=func)
        return p

    add("parse", cmd_parse, "echo the canonical form (or the partition diagram with --format)")
    add("entropy", cmd_entropy, "von Neumann entropy of a reduced state").add_argument(
        "--keep", help="comma-separated parties to keep")
    p = add("mi", cmd_mi, "mutual information I(a:b) or I(a:b|given)")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--given")
    add("mi7", cmd_mi7, "two-system mutual information report").add_argument(
        "--roles", help="e.g. S1=A,E1=B,S2=C,E2=D")
    add("schmidt", cmd_schmidt, "Schmidt coefficients across a cut").add_argument(
        "--left", help="comma-separated parties on the left of the cut")
    p = add("reduce", cmd_reduce, "reduce to a set of roles")
    p.add_argument("--target", required=True, help="comma-separated roles to keep")
    p.add_argument("--roles", help="e.g. S=A,E1=B,E0=C")
    add("structure", cmd_structure, "quantum structure (JSON or diagram)")
    add("classify", cmd_classify, "structure class of a two-qubit state")
    p = add("symmetry", cmd_symmetry, "out-in symmetry verification suite")
    p.add_argument("--op", choices=symmetry.OPERATIONS)
    p.add_argument("--trials", type=int, default=100)

    demo = add("demo", cmd_demo, "worked examples", file=False)
    dsub = demo.add_subparsers(dest="demo", required=True)
    dsub.add_parser("rabi", parents=[common]).add_argument("--gt", type=_finite, required=True)
    dsub.add_parser("slit", parents=[common]).add_argument("--overlap", type=_overlap, required=True)
    return parser


def run_cli(argv) -> tuple[int, str, str]:
    """Run one invocation, returning ``(exit_code, stdout, stderr)``."""
    out, err = io.StringIO(), io.StringIO()
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(err), contextlib.redirect_stdout(err):
            args = parser.parse_args(list(argv))
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
        # --help lands in the redirected stream; keep it on stdout
        if code == 0:
            return 0, err.getvalue(), ""
        return code, "", err.getvalue()
    if getattr(args, "trials", 1) < 0:
        return 2, "", f"{parser.prog}: error: --trials must be non-negative\n"
    try:
        code = args.func(args, out) or 0
    except TangnetError as exc:
        return 1, out.getvalue(), f"error: {exc}\n"
    return code, out.getvalue(), ""


def main(argv=None) -> int:
    code, stdout, stderr = run_cli(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(stdout)
    sys.stderr.write(stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
