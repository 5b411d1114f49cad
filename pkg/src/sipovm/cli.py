"""Command line interface.

Exit status: 0 on success / certified, 1 when a verification comes out
negative, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import documents as docs
from .documents import Document, DocumentError
from .povm import Povm, reconstruct_state, random_si_povm, verify_mub, verify_si
from .sic_search import Method, SearchConfig, phase_objective, search, sic_from_fiducial
from .wh_covariant import PhaseVector, constant_phases, covariant_si_povm, make_phase_vector
from .wigner import WignerFunction, state_from_wigner, wigner_function, wigner_povm

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2


class InputError(Exception):
    pass


# ----------------------------------------------------------------------------
# document <-> object conversion


def povm_document(povm: Povm, **meta) -> Document:
    return Document("povm", povm.d, {"elements": docs.complex_to_json(povm.elements)}, docs.make_metadata(**meta))


def state_document(rho, **meta) -> Document:
    rho = np.asarray(rho)
    return Document("state", rho.shape[0], {"matrix": docs.complex_to_json(rho)}, docs.make_metadata(**meta))


def fiducial_document(psi, **meta) -> Document:
    psi = np.asarray(psi)
    return Document("fiducial", psi.shape[0], {"vector": docs.complex_to_json(psi)}, docs.make_metadata(**meta))


def phases_document(phi: PhaseVector, **meta) -> Document:
    angles = [{"p1": p[0], "p2": p[1], "theta": t} for p, t in phi.items()]
    return Document("phases", phi.d, {"angles": angles}, docs.make_metadata(**meta))


def wigner_document(W: WignerFunction, **meta) -> Document:
    return Document("wigner", W.d, {"values": docs.real_to_json(W.values)}, docs.make_metadata(**meta))


def report_document(d: int, fields: dict, **meta) -> Document:
    return Document("report", d, docs.jsonable(fields), docs.make_metadata(**meta))


def load(path, *kinds) -> Document:
    try:
        doc = docs.read(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    if kinds and doc.kind not in kinds:
        raise InputError(f"{path}: expected a {' or '.join(kinds)} document, got {doc.kind!r}")
    return doc


def to_povm(doc: Document) -> Povm:
    return Povm(docs.complex_from_json(doc.payload["elements"]))


def to_phases(doc: Document) -> PhaseVector:
    angles = {(a["p1"], a["p2"]): a["theta"] for a in doc.payload["angles"]}
    return make_phase_vector(angles, doc.dimension)


# ----------------------------------------------------------------------------
# output


def _emit(args, produced: Document | None, report: Document, summary: str) -> None:
    if produced is not None and args.out:
        docs.write(produced, args.out)
    if args.json:
        sys.stdout.write(docs.encode(report).decode("utf-8"))
    else:
        print(summary)


def _si_summary(label: str, r) -> str:
    verdict = "certified SI" if r.is_si else "NOT SI"
    if r.is_rank_one_sic:
        verdict = "certified rank-one SIC"
    lines = [f"{label}: n = {r.n}, d = {r.d}, κ = {r.kappa:.12g} ({verdict})"]
    lines.append(f"  alpha = {r.alpha:.12g}, beta = {r.beta:.12g}, symmetry residual = {r.max_residual:.3e}")
    lines.extend(f"  note: {n}" for n in r.notes)
    return "\n".join(lines)


# ----------------------------------------------------------------------------
# subcommands


def cmd_wigner(args) -> int:
    povm = wigner_povm(args.dim)
    r = verify_si(povm, tol=args.tol)
    meta = dict(seed=None, method="wigner")
    _emit(args, povm_document(povm, **meta), report_document(args.dim, r.to_dict(), **meta), _si_summary("Wigner POVM", r))
    return EXIT_OK if r.is_si else EXIT_NEGATIVE


def cmd_random_si(args) -> int:
    povm = random_si_povm(args.dim, args.seed)
    r = verify_si(povm, tol=args.tol)
    meta = dict(seed=args.seed, method="random-si")
    _emit(args, povm_document(povm, **meta), report_document(args.dim, r.to_dict(), **meta), _si_summary("random SI-POVM", r))
    return EXIT_OK if r.is_si else EXIT_NEGATIVE


def cmd_covariant(args) -> int:
    if args.phases in ("zero", "pi"):
        if args.dim is None:
            raise InputError("--dim is required with --phases zero|pi")
        phi = constant_phases(args.dim, 0.0 if args.phases == "zero" else np.pi)
    else:
        phi = to_phases(load(args.phases, "phases"))
    povm = covariant_si_povm(phi)
    r = verify_si(povm, tol=args.tol)
    meta = dict(seed=None, method=f"covariant:{args.phases if args.phases in ('zero', 'pi') else 'file'}")
    fields = r.to_dict() | {"phase_objective": phase_objective(phi)}
    _emit(args, povm_document(povm, **meta), report_document(phi.d, fields, **meta), _si_summary("covariant SI-POVM", r))
    return EXIT_OK if r.is_si else EXIT_NEGATIVE


def cmd_search(args) -> int:
    cfg = SearchConfig(
        dimension=args.dim,
        method=Method(args.method),
        restarts=args.restarts,
        max_iterations=args.max_iter,
        seed=args.seed,
        tolerance=args.tol,
    )
    res = search(cfg)
    meta = dict(seed=args.seed, method=cfg.method.value)
    if cfg.method is Method.FRAME_POTENTIAL:
        produced = fiducial_document(res.best_parameters, **meta)
    else:
        produced = phases_document(res.best_parameters, **meta)
    fields = {
        "objective_value": res.objective_value,
        "bound": res.bound,
        "residual": res.residual,
        "tolerance": cfg.tol,
        "certified": res.certified,
        "iterations_used": res.iterations_used,
        "restart_index": res.restart_index,
        "restarts_used": res.restarts_used,
        "seed_used": res.seed_used,
    } | res.report.to_dict()
    summary = (
        f"{cfg.method.value} search d = {cfg.dimension}: objective = {res.objective_value:.15g} "
        f"(bound {res.bound:.15g}, residual {res.residual:.3e}), "
        f"{'certified SIC' if res.certified else 'NOT certified'} after {res.restarts_used} restart(s), "
        f"{res.iterations_used} iterations, {res.elapsed:.2f} s"
    )
    _emit(args, produced, report_document(cfg.dimension, fields, **meta), summary)
    return EXIT_OK if res.certified else EXIT_NEGATIVE


def cmd_verify(args) -> int:
    doc = load(args.input)
    meta = dict(seed=doc.metadata.get("seed"), method="verify")
    d = doc.dimension
    if doc.kind == "povm":
        r = verify_si(to_povm(doc), tol=args.tol)
        ok, fields, summary = r.is_si, r.to_dict(), _si_summary("POVM", r)
    elif doc.kind == "fiducial":
        r = verify_si(sic_from_fiducial(docs.complex_from_json(doc.payload["vector"])), tol=args.tol)
        ok, fields, summary = r.is_rank_one_sic, r.to_dict(), _si_summary("fiducial orbit", r)
    elif doc.kind == "phases":
        phi = to_phases(doc)
        r = verify_si(covariant_si_povm(phi), tol=args.tol)
        fields = r.to_dict() | {"phase_objective": phase_objective(phi)}
        ok, summary = r.is_si, _si_summary("covariant SI-POVM", r)
    elif doc.kind == "state":
        rho = docs.complex_from_json(doc.payload["matrix"])
        tol = 1e-10 if args.tol is None else args.tol
        herm = float(np.max(np.abs(rho - rho.conj().T)))
        trace = complex(np.trace(rho))
        mineig = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0])
        ok = herm <= tol and abs(trace - 1) <= tol and mineig >= -tol
        fields = {"is_density_matrix": ok, "hermiticity_error": herm, "trace": trace.real, "min_eigenvalue": mineig}
        summary = f"state d = {d}: {'valid' if ok else 'INVALID'} density matrix (min eigenvalue {mineig:.3e})"
    elif doc.kind == "wigner":
        W = WignerFunction(np.asarray(doc.payload["values"], dtype=float))
        tol = 1e-12 if args.tol is None else args.tol
        ok = abs(W.total() - 1) <= tol
        fields = {"total": W.total(), "is_normalized": ok}
        summary = f"Wigner function d = {d}: sum = {W.total():.15g} ({'ok' if ok else 'NOT normalized'})"
    elif doc.kind == "bases":
        rep = verify_mub(docs.complex_from_json(doc.payload["bases"]), **({} if args.tol is None else {"tol": args.tol}))
        ok, fields = rep.is_mub, vars(rep)
        summary = f"bases d = {d}: {'mutually unbiased' if ok else 'NOT mutually unbiased'} (max deviation {rep.max_deviation:.3e})"
    else:
        # reports and probability lists carry no certificate beyond their schema
        ok, fields, summary = True, {"schema_valid": True}, f"{doc.kind} document d = {d}: schema valid"
    _emit(args, None, report_document(d, fields, **meta), summary)
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_wigner_function(args) -> int:
    if (args.state is None) == (args.probs is None):
        raise InputError("give exactly one of --state or --probs")
    if args.state is not None:
        doc = load(args.state, "state")
        W = wigner_function(doc.dimension, rho=docs.complex_from_json(doc.payload["matrix"]))
    else:
        doc = load(args.probs, "probabilities")
        W = wigner_function(doc.dimension, probabilities=doc.payload["probabilities"])
    meta = dict(seed=None, method="wigner-function")
    fields = {"total": W.total(), "min_value": float(W.values.min()), "values": W.values}
    summary = f"Wigner function d = {W.d} (sum {W.total():.15g}):\n" + np.array2string(W.values, precision=6, suppress_small=True)
    _emit(args, wigner_document(W, **meta), report_document(W.d, fields, **meta), summary)
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    meta = dict(seed=None, method="reconstruct")
    probs_doc = load(args.probs, "probabilities", "wigner")
    if probs_doc.kind == "wigner":
        rec = state_from_wigner(WignerFunction(np.asarray(probs_doc.payload["values"], dtype=float)))
    else:
        if args.povm is None:
            raise InputError("--povm is required with a probabilities document")
        povm = to_povm(load(args.povm, "povm"))
        if probs_doc.dimension != povm.d:
            raise InputError(f"dimension mismatch: POVM d = {povm.d}, probabilities d = {probs_doc.dimension}")
        rec = reconstruct_state(povm, probs_doc.payload["probabilities"])
    fields = {"min_eigenvalue": rec.min_eigenvalue, "is_psd": rec.is_psd, "residual": rec.residual}
    summary = f"reconstructed state d = {rec.rho.shape[0]}, min eigenvalue {rec.min_eigenvalue:.3e}"
    if not rec.is_psd:
        summary += "\n  warning: estimate is not positive semidefinite"
    _emit(args, state_document(rec.rho, **meta), report_document(rec.rho.shape[0], fields, **meta), summary)
    return EXIT_OK


def cmd_mub_check(args) -> int:
    doc = load(args.bases, "bases")
    rep = verify_mub(docs.complex_from_json(doc.payload["bases"]), **({} if args.tol is None else {"tol": args.tol}))
    meta = dict(seed=None, method="mub-check")
    summary = f"{len(doc.payload['bases'])} bases in d = {doc.dimension}: " + (
        "mutually unbiased" if rep.is_mub else "NOT mutually unbiased"
    ) + f" (max deviation {rep.max_deviation:.3e})"
    _emit(args, None, report_document(doc.dimension, vars(rep), **meta), summary)
    return EXIT_OK if rep.is_mub else EXIT_NEGATIVE


# ----------------------------------------------------------------------------


def _dim(s: str) -> int:
    d = int(s)
    if d < 2:
        raise argparse.ArgumentTypeError("dimension must be >= 2")
    return d


def _positive_int(s: str) -> int:
    n = int(s)
    if n < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return n


def _positive_float(s: str) -> float:
    x = float(s)
    if not x > 0:
        raise argparse.ArgumentTypeError("expected a positive number")
    return x


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sipovm", description="Construct, search for and certify SI-POVMs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out=True):
        p.add_argument("--json", action="store_true", help="print a machine-readable report document")
        p.add_argument("--tol", type=_positive_float, default=None, help="certification tolerance (default: module default)")
        if out:
            p.add_argument("--out", help="write the produced document here")
        return p

    p = common(sub.add_parser("wigner", help="Wigner POVM (odd d)"))
    p.add_argument("--dim", type=_dim, required=True)
    p.set_defaults(func=cmd_wigner)

    p = common(sub.add_parser("random-si", help="random SI-POVM by simplex shrinking"))
    p.add_argument("--dim", type=_dim, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_random_si)

    p = common(sub.add_parser("covariant", help="WH-covariant SI-POVM from phases"))
    p.add_argument("--dim", type=_dim)
    p.add_argument("--phases", required=True, help="'zero', 'pi' or a phases document")
    p.set_defaults(func=cmd_covariant)

    p = common(sub.add_parser("search", help="numerical SIC search"))
    p.add_argument("--dim", type=_dim, required=True)
    p.add_argument("--method", choices=[m.value for m in Method], default="frame")
    p.add_argument("--restarts", type=_positive_int, default=10)
    p.add_argument("--max-iter", type=_positive_int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_search)

    p = common(sub.add_parser("verify", help="certify a document"), out=False)
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_verify)

    p = common(sub.add_parser("wigner-function", help="discrete Wigner function of a state"))
    p.add_argument("--state")
    p.add_argument("--probs", help="Wigner-POVM outcome probabilities document")
    p.set_defaults(func=cmd_wigner_function)

    p = common(sub.add_parser("reconstruct", help="linear state reconstruction"))
    p.add_argument("--povm")
    p.add_argument("--probs", required=True, help="probabilities (with --povm) or wigner document")
    p.set_defaults(func=cmd_reconstruct)

    p = common(sub.add_parser("mub-check", help="test mutual unbiasedness"), out=False)
    p.add_argument("--bases", required=True)
    p.set_defaults(func=cmd_mub_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (InputError, DocumentError, ValueError) as exc:
        print(f"sipovm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"sipovm {args.command}: error: {exc.strerror}: {exc.filename}", file=sys.stderr)
        return EXIT_USAGE


run = main
