"""Command-line front end: ``idealkit <command> [options]``.

Exit codes: 0 when every report passes (SKIP counts as passing), 1 when any
report is FAIL or ERROR, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import corpus, quasi
from . import report as rep
from .algebra import AlgebraError, FiniteAlgebra, dump_algebra, load_algebra
from .audits import AuditConfig, resolve_theorems, run_suite
from .congruence import all_congruences, point_class
from .ideals import GammaSet, congruence_interval, default_gamma, enumerate_ideal_terms, ideal_lattice
from .lattice import fmt_set
from .residuated import ResiduatedView, check_residuated_axioms, filters, normal_filters, operator_filters
from .terms import TermError, load_terms

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
CLASSES = ("generic", "rl", "flw", "flew", "quasi")


class InputError(Exception):
    pass


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    if isinstance(o, tuple):
        return list(o)
    return str(o)


class Output:
    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def record(self, rec: dict, text: str):
        if self.fmt == "machine":
            self.stream.write(json.dumps(rec, default=_json_default) + "\n")
        else:
            self.stream.write(text + "\n")

    def report(self, r: rep.AuditReport):
        self.record(r.record(), r.summary())


def _resolve_algebra(spec: str, point: str | None) -> FiniteAlgebra:
    path = Path(spec)
    if path.exists():
        return load_algebra(path, point)
    bundled = corpus.data_dir() / (path.stem + ".json")
    if path.parent == Path(".") and bundled.exists():
        return load_algebra(bundled, point)
    raise InputError(f"{spec}: no such file or bundled algebra")


def _algebras(args, dual=False) -> list[FiniteAlgebra]:
    out = [_resolve_algebra(a, args.point) for a in args.algebra or []]
    if getattr(args, "corpus", False):
        for name in corpus.CORPUS_NAMES + corpus.OPERATOR_NAMES:
            out.append(corpus.bundled(name, args.point))
        if dual and args.point is None:
            for name in corpus.CORPUS_NAMES:
                alg = corpus.bundled(name)
                zero = alg.bindings.get("zero")
                if zero and zero != alg.signature.point:
                    out.append(alg.with_point(zero))
    if not out:
        raise InputError("no algebra given (use --algebra or --corpus)")
    return out


def _exit_for(reports) -> int:
    return EXIT_FAIL if any(r.status in (rep.FAIL, rep.ERROR) for r in reports) else EXIT_OK


# -- commands ------------------------------------------------------------------

def cmd_check(args, out: Output) -> int:
    reports = []
    for alg in _algebras(args):
        cls = args.klass
        if cls == "generic":
            r = rep.passed("well-formed", alg.label(), vacuous=alg.size == 1,
                           details={"size": alg.size})
            r.notes.append(f"{alg.size} elements, {len(alg.signature.symbols)} symbols")
        elif cls == "quasi":
            r = quasi.check_quasi_axioms(alg)
        else:
            r = check_residuated_axioms(alg)
            flag = {"rl": None, "flw": "FL_w", "flew": "FL_ew"}[cls]
            if r.ok and flag and not r.details["flags"][flag]:
                r = rep.failed(r.theorem, alg.label(), {"flag": flag, "flags": r.details["flags"]})
            elif r.ok:
                on = [k for k, v in r.details["flags"].items() if v]
                r.notes.append("flags: " + (", ".join(on) or "none"))
        r.theorem = f"check:{cls}"
        out.report(r)
        reports.append(r)
    return _exit_for(reports)


def cmd_audit(args, out: Output) -> int:
    theorems = resolve_theorems(args.theorem)
    terms = load_terms(args.terms) if args.terms else None
    cfg = AuditConfig(depth=args.depth, witness_depth=args.witness_depth, poly_depth=args.poly_depth, terms=terms)
    reports = run_suite(theorems, _algebras(args, dual=True), cfg)
    for r in reports:
        out.report(r)
    if out.fmt == "text":
        counts = {s: sum(r.status == s for r in reports) for s in (rep.PASS, rep.FAIL, rep.SKIP, rep.ERROR)}
        out.stream.write(" ".join(f"{k}={v}" for k, v in counts.items()) + "\n")
    return _exit_for(reports)


def _covers_text(labels, covers):
    return ", ".join(f"{labels[i]} < {labels[j]}" for i, j in covers) or "(none)"


def cmd_congruences(args, out: Output) -> int:
    for alg in _algebras(args):
        con = all_congruences(alg)
        labels = [str(c) for c in con]
        out.record({"kind": "congruences", "algebra": alg.label(), "count": len(con)},
                   f"{alg.label()}: {len(con)} congruences")
        for c in con:
            pc = point_class(alg, c)
            out.record({"kind": "congruence", "algebra": alg.label(), "blockOf": list(c.block_of),
                        "point_class": sorted(pc)}, f"  {c}   point-class {fmt_set(pc)}")
        covers = con.covers()
        out.record({"kind": "covers", "algebra": alg.label(), "covers": [[labels[i], labels[j]] for i, j in covers]},
                   "  covers: " + _covers_text(labels, covers))
    return EXIT_OK


def _gamma(args, alg):
    if args.terms:
        return GammaSet.from_file(args.terms)
    return default_gamma(alg, args.depth)


def cmd_ideals(args, out: Output) -> int:
    for alg in _algebras(args):
        gamma = _gamma(args, alg)
        lat = ideal_lattice(alg, gamma)
        con = all_congruences(alg)
        labels = [fmt_set(m) for m in lat]
        out.record({"kind": "ideals", "algebra": alg.label(), "count": len(lat), "gamma_size": len(gamma)},
                   f"{alg.label()}: {len(lat)} ideals (Gamma: {len(gamma)} terms)")
        for m in lat:
            iv = congruence_interval(alg, m, con)
            rec = {"kind": "ideal", "algebra": alg.label(), "members": sorted(m), "normal": iv is not None}
            text = f"  {fmt_set(m)}"
            if iv is not None:
                rec.update(lower=list(iv.lower.block_of), upper=list(iv.upper.block_of))
                text += f"   interval [{iv.lower}, {iv.upper}]"
            else:
                text += "   not a point-class"
            out.record(rec, text)
        covers = lat.covers()
        out.record({"kind": "covers", "algebra": alg.label(), "covers": [[labels[i], labels[j]] for i, j in covers]},
                   "  covers: " + _covers_text(labels, covers))
    return EXIT_OK


def cmd_filters(args, out: Output) -> int:
    for alg in _algebras(args):
        try:
            view = ResiduatedView.of(alg)
        except AlgebraError as exc:
            raise InputError(str(exc)) from exc
        fams = [("filters", filters(view))]
        if not view.commutative:
            fams.append(("normal filters", normal_filters(view)))
        if view.operators:
            fams.append(("operator filters", operator_filters(view)))
        for kind, fam in fams:
            labels = [fmt_set(m) for m in fam]
            out.record({"kind": kind, "algebra": alg.label(), "count": len(fam), "members": [sorted(m) for m in fam]},
                       f"{alg.label()}: {len(fam)} {kind}: " + " ".join(labels))
            covers = fam.covers()
            out.record({"kind": "covers", "family": kind, "algebra": alg.label(),
                        "covers": [[labels[i], labels[j]] for i, j in covers]},
                       "  covers: " + _covers_text(labels, covers))
    return EXIT_OK


def _write_corpus(models, size, mode, seed, outdir: Path | None):
    findings = []
    counts = {rep.PASS: 0, rep.FAIL: 0, rep.ERROR: 0, rep.SKIP: 0}
    for m in models:
        for r in quasi.audit_model(m):
            counts[r.status] += 1
            if not r.ok:
                findings.append(r.record())
    manifest = {
        "size": size, "mode": mode, "seed": seed, "count": len(models),
        "with_nonregular": sum(len(quasi.QuasiView.of(m).regular) < m.size for m in models),
        "models": [m.name for m in models], "audit_counts": counts, "findings": findings,
    }
    if outdir is not None:
        outdir.mkdir(parents=True, exist_ok=True)
        for m in models:
            dump_algebra(m, outdir / f"{m.name}.json")
        (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2, default=_json_default) + "\n")
    return manifest


def cmd_enumerate(args, out: Output) -> int:
    if args.quasi == args.ideal_terms:
        raise InputError("choose exactly one of --quasi or --ideal-terms")
    if args.quasi:
        if args.size is None:
            raise InputError("--quasi needs --size")
        if not 1 <= args.size <= 4:
            raise InputError(f"size {args.size} refused: exhaustive up to {quasi.MAX_EXHAUSTIVE}, sampled at 4")
        seed = quasi.seed_from_env(args.seed if args.seed is not None else quasi.DEFAULT_SEED)
        models = quasi.enumerate_quasi_models(args.size, seed)
        mode = "exhaustive" if args.size <= quasi.MAX_EXHAUSTIVE else "sampled"
        manifest = _write_corpus(models, args.size, mode, seed if mode == "sampled" else None,
                                 Path(args.out) if args.out else None)
        text = (f"size {args.size} ({mode}): {manifest['count']} models, "
                f"{manifest['with_nonregular']} with non-regular elements, {len(manifest['findings'])} findings")
        out.record({"kind": "manifest", **manifest}, text)
        return EXIT_OK
    algs = _algebras(args)
    gamma = enumerate_ideal_terms(algs, args.nx, args.ny, args.depth)
    out.record({"kind": "ideal-terms", "count": len(gamma), "depth": args.depth},
               f"{len(gamma)} ideal terms to depth {args.depth}")
    for t in gamma:
        out.record({"kind": "ideal-term", "term": str(t.term)}, f"  {t.term}")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="idealkit", description="Ideals, congruences and filters of finite algebras.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, corpus_flag=True):
        sp.add_argument("--algebra", action="append", help="algebra file or bundled name (repeatable)")
        if corpus_flag:
            sp.add_argument("--corpus", action="store_true", help="add the bundled corpus")
        sp.add_argument("--point", help="override the designated point constant")
        sp.add_argument("--format", choices=("text", "machine"), default="text")

    sp = sub.add_parser("check", help="axiom checks")
    common(sp)
    sp.add_argument("--class", dest="klass", choices=CLASSES, default="generic")

    sp = sub.add_parser("audit", help="theorem audits")
    common(sp)
    sp.add_argument("--theorem", default="all")
    sp.add_argument("--terms", help="term file used as T by the special-ideal audit")
    sp.add_argument("--depth", type=int, default=2, help="ideal-term depth for Gamma")
    sp.add_argument("--witness-depth", type=int, default=3)
    sp.add_argument("--poly-depth", type=int, default=4)

    for name, helptext in (("ideals", "ideal lattice"), ("congruences", "congruence lattice"),
                           ("filters", "filter lattices")):
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        if name == "ideals":
            sp.add_argument("--depth", type=int, default=2)
            sp.add_argument("--terms", help="Gamma as a term file")

    sp = sub.add_parser("enumerate", help="quasi-FL_w models or ideal terms")
    common(sp, corpus_flag=False)
    sp.add_argument("--quasi", action="store_true")
    sp.add_argument("--ideal-terms", action="store_true")
    sp.add_argument("--size", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", help="directory for the model corpus and manifest")
    sp.add_argument("--depth", type=int, default=1)
    sp.add_argument("--nx", type=int, default=1)
    sp.add_argument("--ny", type=int, default=1)
    return p


COMMANDS = {"check": cmd_check, "audit": cmd_audit, "ideals": cmd_ideals, "congruences": cmd_congruences,
            "filters": cmd_filters, "enumerate": cmd_enumerate}


def _positive(args):
    for key in ("depth", "witness_depth", "poly_depth", "nx", "ny"):
        v = getattr(args, key, None)
        if v is not None and v < (0 if key == "depth" else 1):
            raise InputError(f"--{key.replace('_', '-')} must be positive")


def main(argv=None, stream=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    out = Output(args.format, stream)
    try:
        _positive(args)
        return COMMANDS[args.command](args, out)
    except (InputError, AlgebraError, TermError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"idealkit: error: {msg}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
