"""Command-line surface.

Subcommands:

* ``inspect FILE`` -- spectrum, clustered multiplicities, defectiveness
  flags and class certificates of a channel document, as JSON on stdout.
* ``construct`` -- write channel documents for the built-in maps
  (``psi --dim N``, ``example --name eq1|reset|phi-mu --mu M``,
  ``remark --a A --b B``).
* ``regularize FILE --eps E`` -- simple-spectrum repair of a channel or
  generator document (detected from the document's ``kind``).
* ``markovian FILE --eps E [--product FILE2 ...]`` -- time-rescaled repair
  of one exponential or of a product of exponentials of generators.
* ``scan --from A --to B --grid G --csv OUT`` -- minimum-gap profile along
  the segment between two maps, with eigenvalue trajectories as CSV.
* ``verify FILE --class cptp|unital|gksl`` -- exit 0 iff the certificates
  pass.

Exit codes: 0 success, 1 procedure errors (reported by error name),
2 parse/validation errors. The environment variable ``SCF_SEED`` overrides
the default RNG seed 0 for all sampling.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import documents
from .channels import ClassCertificate, certify
from .config import CLUSTER_TOL, DEFAULT_SEED, ENV_SEED_VAR
from .constructions import build_psi, phi_mu_ptm, remark_ptm
from .documents import ChannelDocument, DocumentError
from .exceptions import ScfError
from .numerics import SpectrumReport, spectrum_report
from .regularize import (
    PathScanReport,
    RegularizationReport,
    regularize_channel,
    regularize_generator,
    regularize_markovian,
    regularize_markovian_product,
    scan_path,
)


def _seed() -> int:
    return int(os.environ.get(ENV_SEED_VAR, str(DEFAULT_SEED)))


def _rng() -> np.random.Generator:
    return np.random.default_rng(_seed())


def _finite(x: float):
    return float(x) if math.isfinite(x) else repr(float(x))


def _complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _sorted_eigs(vals) -> list[list[float]]:
    return [_complex_pair(z) for z in sorted(np.asarray(vals, dtype=complex),
                                             key=lambda z: (z.real, z.imag))]


def _spectrum_payload(rep: SpectrumReport) -> dict:
    return {
        "eigenvalues": _sorted_eigs(rep.eigenvalues),
        "clusters": [
            {
                "value": _complex_pair(c.value),
                "algebraic": c.algebraic,
                "geometric": c.geometric,
                "defective": c.defective,
            }
            for c in rep.clusters
        ],
        "min_gap": _finite(rep.min_gap),
        "cluster_tolerance": rep.cluster_tolerance,
        "defective": rep.defective,
    }


def _certificate_payload(cert: ClassCertificate) -> dict:
    return {
        "kind": cert.kind,
        "tp_residual": cert.tp_residual,
        "unital_residual": cert.unital_residual,
        "cp_min_eig": cert.cp_min_eig,
        "gksl_trace_residual": cert.gksl_trace_residual,
        "gksl_ccp_min_eig": cert.gksl_ccp_min_eig,
        "positivity_min_sample": cert.positivity_min_sample,
        "herm_residual": cert.herm_residual,
        "flags": cert.flags(),
    }


def _regularization_payload(rep: RegularizationReport) -> dict:
    payload = {
        "lambda": rep.lam,
        "time_factors": [float(t) for t in rep.time_factors],
        "achieved_gap": _finite(rep.achieved_gap),
        "fro_distance": rep.fro_distance,
        "diamond_upper": rep.diamond_upper,
        "attempts": rep.attempts,
    }
    if rep.input_cert is not None:
        payload["input_certificate"] = _certificate_payload(rep.input_cert)
    if rep.output_cert is not None:
        payload["output_certificate"] = _certificate_payload(rep.output_cert)
    return payload


def _scan_payload(rep: PathScanReport) -> dict:
    return {
        "grid": [float(t) for t in rep.grid],
        "gaps": [_finite(g) for g in rep.gaps],
        "exceptional_intervals": [[float(a), float(b)]
                                  for a, b in rep.exceptional_intervals],
    }


def _document_payload(doc: ChannelDocument) -> dict:
    payload = {"n": doc.n, "rep": doc.rep, "kind": doc.kind, "data": doc.data}
    if doc.meta:
        payload["meta"] = doc.meta
    return payload


def _emit(report: dict) -> None:
    sys.stdout.write(json.dumps(report, sort_keys=True) + "\n")


def _load(path: str) -> ChannelDocument:
    return documents.load(path)


def _write_doc(doc: ChannelDocument, out: str | None) -> None:
    if out:
        documents.store(doc, out)
    else:
        sys.stdout.write(documents.to_json(doc))


def _cmd_inspect(args) -> int:
    doc = _load(args.file)
    s = doc.to_superoperator()
    report = {
        "command": "inspect",
        "inputs": [args.file],
        "spectrum": _spectrum_payload(spectrum_report(s.mat, args.cluster_tol)),
        "certificates": _certificate_payload(certify(s, kind=doc.kind, rng=_rng())),
    }
    _emit(report)
    return 0


def _cmd_construct(args) -> int:
    if args.what == "psi":
        s = build_psi(args.dim).superop
        doc = documents.from_superoperator(
            s, rep="superop", kind="channel", meta={"construction": f"psi:{args.dim}"}
        )
    elif args.what == "example":
        if args.name == "eq1":
            ptm = phi_mu_ptm(1.0)
            label = "eq1"
        elif args.name == "reset":
            ptm = phi_mu_ptm(0.0)
            label = "reset"
        else:
            ptm = phi_mu_ptm(args.mu)
            label = f"phi-mu:{args.mu}"
        doc = ChannelDocument(
            n=2, rep="ptm", kind="channel",
            data=documents.matrix_to_pairs(ptm.mat.astype(complex)),
            meta={"construction": f"example:{label}"},
        )
    else:
        ptm = remark_ptm(args.a, args.b)
        doc = ChannelDocument(
            n=2, rep="ptm", kind="channel",
            data=documents.matrix_to_pairs(ptm.mat.astype(complex)),
            meta={"construction": f"remark:{args.a}:{args.b}"},
        )
    _write_doc(doc, args.out)
    return 0


_CLASS_FLAGS = {
    "cptp": lambda c: c.is_cptp,
    "unital": lambda c: c.is_cptp and c.is_unital,
    "ptp": lambda c: c.is_tp and not c.positivity_refuted,
    "gksl": lambda c: c.is_gksl,
}


def _cmd_regularize(args) -> int:
    doc = _load(args.file)
    s = doc.to_superoperator()
    budget = "fro" if args.budget == "fro" else "diamond_upper"
    if doc.kind == "channel":
        if args.klass != "auto":
            cert = certify(s, kind="channel", rng=_rng())
            if not _CLASS_FLAGS[args.klass](cert):
                print(f"error: input does not certify class {args.klass}",
                      file=sys.stderr)
                return 1
        out, rep = regularize_channel(s, args.eps, budget_norm=budget)
    else:
        out, rep = regularize_generator(s, args.eps, budget_norm=budget)
    out_doc = documents.from_superoperator(out, rep="superop", kind=doc.kind)
    report = {
        "command": "regularize",
        "inputs": [args.file],
        "regularization": _regularization_payload(rep),
        "spectrum": _spectrum_payload(spectrum_report(out.mat)),
        "output_document": _document_payload(out_doc),
    }
    if args.out:
        documents.store(out_doc, args.out)
    _emit(report)
    return 0


def _cmd_markovian(args) -> int:
    paths = [args.file] + (args.product or [])
    docs = [_load(p) for p in paths]
    for p, d in zip(paths, docs):
        if d.kind != "generator":
            raise DocumentError(f"{p}: markovian procedures need kind 'generator'")
    gens = [d.to_superoperator() for d in docs]
    if len(gens) == 1:
        out, rep = regularize_markovian(gens[0], args.eps)
    else:
        out, rep = regularize_markovian_product(gens, args.eps)
    out_doc = documents.from_superoperator(out, rep="superop", kind="channel")
    report = {
        "command": "markovian",
        "inputs": paths,
        "regularization": _regularization_payload(rep),
        "spectrum": _spectrum_payload(spectrum_report(out.mat)),
        "output_document": _document_payload(out_doc),
    }
    if args.out:
        documents.store(out_doc, args.out)
    _emit(report)
    return 0


def _cmd_scan(args) -> int:
    doc_from = _load(args.src)
    doc_to = _load(args.dst)
    X = doc_from.to_superoperator()
    Z = doc_to.to_superoperator()
    rep = scan_path(X, Z, args.grid)
    _write_scan_csv(args.csv, rep)
    report = {
        "command": "scan",
        "inputs": [args.src, args.dst],
        "scan": _scan_payload(rep),
    }
    _emit(report)
    return 0


def _write_scan_csv(path: str, rep: PathScanReport) -> None:
    d = rep.eigenvalues.shape[1]
    header = ["t"]
    for i in range(d):
        header += [f"eig{i}_re", f"eig{i}_im"]
    header.append("gap")
    lines = [",".join(header)]
    for i, t in enumerate(rep.grid):
        row = [repr(float(t))]
        for z in rep.eigenvalues[i]:
            row += [repr(float(z.real)), repr(float(z.imag))]
        row.append(repr(float(rep.gaps[i])))
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _cmd_verify(args) -> int:
    doc = _load(args.file)
    if args.klass == "gksl" and doc.kind != "generator":
        raise DocumentError("class 'gksl' requires a document of kind 'generator'")
    if args.klass in ("cptp", "unital") and doc.kind != "channel":
        raise DocumentError(f"class {args.klass!r} requires a document of kind 'channel'")
    s = doc.to_superoperator()
    cert = certify(s, kind=doc.kind, rng=_rng())
    _emit({
        "command": "verify",
        "inputs": [args.file],
        "certificates": _certificate_payload(cert),
        "class": args.klass,
        "passed": _CLASS_FLAGS[args.klass](cert),
    })
    return 0 if _CLASS_FLAGS[args.klass](cert) else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scf",
        description="Diagnose and repair non-diagonalizable quantum channels "
                    "and their generators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inspect", help="spectrum, multiplicities and certificates")
    p.add_argument("file")
    p.add_argument("--cluster-tol", type=float, default=CLUSTER_TOL)
    p.set_defaults(func=_cmd_inspect)

    p = sub.add_parser("construct", help="write documents for built-in maps")
    what = p.add_subparsers(dest="what", required=True)
    q = what.add_parser("psi", help="simple-spectrum unital CPTP perturber")
    q.add_argument("--dim", type=int, required=True)
    q.add_argument("--out")
    q = what.add_parser("example", help="named qubit example channels")
    q.add_argument("--name", choices=("eq1", "reset", "phi-mu"), required=True)
    q.add_argument("--mu", type=float, default=1.0)
    q.add_argument("--out")
    q = what.add_parser("remark", help="two-parameter defective unital family")
    q.add_argument("--a", type=float, required=True)
    q.add_argument("--b", type=float, required=True)
    q.add_argument("--out")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("regularize", help="simple-spectrum repair of a document")
    p.add_argument("file")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--budget", choices=("fro", "diamond"), default="fro")
    p.add_argument("--class", dest="klass",
                   choices=("auto", "cptp", "unital", "ptp"), default="auto")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_regularize)

    p = sub.add_parser("markovian", help="time-rescaled repair of exponentials")
    p.add_argument("file")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--product", nargs="+")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_markovian)

    p = sub.add_parser("scan", help="minimum-gap profile along a segment")
    p.add_argument("--from", dest="src", required=True)
    p.add_argument("--to", dest="dst", required=True)
    p.add_argument("--grid", type=int, required=True)
    p.add_argument("--csv", required=True)
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("verify", help="exit 0 iff certificates pass")
    p.add_argument("file")
    p.add_argument("--class", dest="klass",
                   choices=("cptp", "unital", "gksl"), required=True)
    p.set_defaults(func=_cmd_verify)

    return parser


def dispatch(argv: list[str]) -> int:
    """Run one CLI invocation; returns the exit code instead of exiting."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (DocumentError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ScfError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
