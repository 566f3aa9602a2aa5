"""Command-line front end.

All results are JSON on stdout; a short human log goes to stderr.
Exit codes: 0 success, 1 validation error (or failed assertion), 2 cap
exceeded, 3 violation / non-LHV verdict under ``--strict``.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import behaviors, forms, generators, quantum
from .errors import CapExceeded, SignalingError, ValidationError
from .scenario import (CorrelationFunctional, Document, _read_json,
                       dump_document, load_document)

log = logging.getLogger("lhvbounds")

EXIT_OK, EXIT_INVALID, EXIT_CAP, EXIT_VERDICT = 0, 1, 2, 3


def _emit(obj, args, path=None):
    text = json.dumps(obj, indent=2) + "\n"
    path = path or args.output
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _functional(doc: Document, index: int):
    if not 0 <= index < len(doc.functionals):
        raise ValidationError(f"functional index {index} out of range "
                              f"(file has {len(doc.functionals)})", "index")
    return doc.functionals[index]


def cmd_bound(args):
    doc = load_document(args.file)
    f = _functional(doc, args.index)
    report = forms.lhv_bounds(f, threads=args.threads,
                              cap=args.cap or forms.DEFAULT_CAP)
    log.info("bound: min %s max %s over %d assignments", report.min,
             report.max, report.vertices_scanned)
    _emit(report.to_dict(timing=not args.no_timing), args)
    return EXIT_OK


def _build(args):
    name = args.name
    if name == "chsh":
        return generators.chsh(args.sign_cell, args.negate)
    if name == "mk":
        return generators.mk_coefficients(args.parties)
    if name == "zohren-gill":
        return generators.zohren_gill(args.outcomes,
                                      strict=args.strict_order)
    return generators.GENERATORS[name]()


def cmd_generate(args):
    ineq = _build(args)
    f = ineq.functional
    doc = Document(f.scenario, (f,),
                   ((ineq.published_min, ineq.published_max),))
    body = dump_document(doc)
    summary = {"name": ineq.name,
               "published_min": ineq.published_min,
               "published_max": ineq.published_max}
    code = EXIT_OK
    if args.with_bound:
        report = forms.lhv_bounds(f, threads=args.threads,
                                  cap=args.cap or forms.DEFAULT_CAP)
        summary["bound"] = report.to_dict(timing=not args.no_timing)
        checks = [(ineq.published_min, report.min, "min"),
                  (ineq.published_max, report.max, "max")]
        bad = [f"{k}: published {p} != computed {c}"
               for p, c, k in checks if p is not None and p != c]
        summary["bound_matches"] = not bad
        if bad:
            log.error("bound mismatch for %s: %s", ineq.name, "; ".join(bad))
            code = EXIT_INVALID
        else:
            log.info("bound check passed for %s", ineq.name)
    if args.output:
        _emit(body, args)
        summary["output"] = args.output
        sys.stdout.write(json.dumps(summary, indent=2) + "\n")
    else:
        if args.with_bound:
            body = {"document": body, "check": summary}
        _emit(body, args)
    return code


def cmd_check_behavior(args):
    b = behaviors.load_behavior(args.file)
    ns = behaviors.check_no_signaling(b)
    results = []
    for ineq in generators.applicable_inequalities(b.scenario):
        f = ineq.functional
        bounds = forms.lhv_bounds(f, threads=args.threads,
                                  cap=args.cap or forms.DEFAULT_CAP)
        value = behaviors.evaluate_functional(b, f)
        holds = bounds.min - 1e-9 <= value <= bounds.max + 1e-9
        results.append({"name": ineq.name, "value": value,
                        "lhv_min": bounds.min, "lhv_max": bounds.max,
                        "holds": holds})
    out = {"no_signaling": ns.to_dict(), "inequalities": results}
    code = EXIT_OK
    if not ns.passed:
        out["lhv"] = {"verdict": "skipped", "reason": "signaling"}
        log.warning("behavior is signaling; membership test skipped")
        if args.strict:
            code = EXIT_VERDICT
    else:
        caps = {} if args.cap is None else {"strategy_cap": args.cap,
                                            "entry_cap": args.cap}
        verdict = behaviors.is_lhv(b, **caps)
        out["lhv"] = verdict.to_dict()
        log.info("membership verdict: %s", verdict.kind)
        if args.strict and verdict.kind != "LHV":
            code = EXIT_VERDICT
    _emit(out, args)
    return code


def cmd_quantum_eval(args):
    rho, obs = quantum.parse_quantum_document(_read_json(args.file))
    report = quantum.mk_violation_report(rho, obs)
    log.info("quantum value %s vs LHV bound %s: %s", report.value,
             report.bound, report.verdict)
    _emit(report.to_dict(), args)
    return EXIT_VERDICT if args.strict and report.verdict == "VIOLATES" \
        else EXIT_OK


def cmd_lemma1_audit(args):
    doc = load_document(args.file)
    f = _functional(doc, args.index)
    if not isinstance(f, CorrelationFunctional):
        raise ValidationError("the audit needs a correlation functional",
                              f"functionals[{args.index}]")
    bounds = forms.lhv_bounds_correlation(f, threads=args.threads,
                                          cap=args.cap or forms.DEFAULT_CAP)
    record = forms.lemma1_audit(f, args.samples, args.seed, bounds=bounds)
    _emit(record.to_dict(), args)
    if not record.passed:
        log.error("sampled point escapes the vertex bounds: %s",
                  record.escape)
        return EXIT_INVALID
    log.info("audit passed: %d samples within [%s, %s]", record.samples,
             record.bound_min, record.bound_max)
    return EXIT_OK


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap", type=_positive, default=None,
                        help="override enumeration / feasibility caps")
    common.add_argument("--threads", type=_positive, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--strict", action="store_true",
                        help="exit 3 on NotLHV / VIOLATES verdicts")
    common.add_argument("--no-timing", action="store_true",
                        help="report elapsed_ms as null")
    common.add_argument("--output", default=None,
                        help="write the JSON result to this path")

    p = argparse.ArgumentParser(prog="lhvbounds",
                                description="Exact LHV bounds for Bell-type "
                                            "functionals.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", parents=[common],
                       help="tight LHV bounds of one functional")
    b.add_argument("file")
    b.add_argument("index", nargs="?", type=int, default=0,
                   help="0-based functional index (default 0)")
    b.set_defaults(func=cmd_bound)

    g = sub.add_parser("generate", parents=[common],
                       help="write a catalog inequality as a document")
    g.add_argument("name", choices=sorted(generators.GENERATORS))
    g.add_argument("--sign-cell", type=int, default=4,
                   help="chsh: matrix cell 1..4 holding the minus sign")
    g.add_argument("--negate", action="store_true",
                   help="chsh: flip the overall sign")
    g.add_argument("--parties", type=int, default=3, help="mk: N")
    g.add_argument("--outcomes", type=int, default=2, help="zohren-gill: K")
    g.add_argument("--strict-order", action="store_true",
                   help="zohren-gill: make all four comparisons strict")
    g.add_argument("--with-bound", action="store_true",
                   help="compute the bound and assert the reference value")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("check-behavior", parents=[common],
                       help="no-signaling, inequality values, LHV membership")
    c.add_argument("file")
    c.set_defaults(func=cmd_check_behavior)

    q = sub.add_parser("quantum-eval", parents=[common],
                       help="Bell-operator expectation against 2^(N-1)")
    q.add_argument("file")
    q.set_defaults(func=cmd_quantum_eval)

    a = sub.add_parser("lemma1-audit", parents=[common],
                       help="check random interior points against the "
                            "vertex bounds")
    a.add_argument("file")
    a.add_argument("index", nargs="?", type=int, default=0)
    a.add_argument("--samples", type=_positive, default=100000)
    a.set_defaults(func=cmd_lemma1_audit)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s",
                        stream=sys.stderr)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which would read as a cap error
        return EXIT_INVALID if exc.code == 2 else exc.code
    try:
        return args.func(args)
    except CapExceeded as exc:
        log.error("%s", exc)
        return EXIT_CAP
    except SignalingError as exc:
        log.error("%s", exc)
        return EXIT_VERDICT if args.strict else EXIT_INVALID
    except (ValidationError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
