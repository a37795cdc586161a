"""Command-line front end.

Each command builds one report dictionary from library calls; the table and
``--structured`` (JSON) outputs are both rendered from it. Exit status is 0
when every check passes, 1 when a check fails and 2 for input errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Callable, Sequence

from .cech import relative_complex, ses_of_pair
from .complexes import Bidegree, cohomology, cone, reindex
from .currents import compare_forms_currents, form_to_current
from .dga import validate_model
from .errors import CechDolbeaultError, FormatError, HypothesisError
from .formats import dumps, read_path, write_bundle
from .models import CORPUS, ModelBundle, named_bundle
from .morphisms import (blowup_decomposition, injectivity_certificates, projection_identity_check,
                        relative_pushforward)
from .sequences import assemble_les

__all__ = ["main", "build_parser"]


class InputError(Exception):
    """Bad names or options discovered after the files were read."""


# ---------------------------------------------------------------- helpers

def _pick(table: dict, name: str | None, what: str):
    if not table:
        raise InputError(f"the bundle contains no {what}")
    if name is None:
        return next(iter(table.values()))
    if name not in table:
        raise InputError(f"unknown {what} {name!r}; available: {', '.join(table)}")
    return table[name]


def _label(d, text: str | None):
    if text is None:
        return d.index_set[0]
    for a in d.index_set:
        if str(a) == text:
            return a
    raise InputError(f"label {text!r} is not in the index set {list(d.index_set)}")


def _diagram(b: ModelBundle, name: str | None):
    if name is None:
        for dname in b.diagram_pairings:
            return b.diagrams[dname]
    return _pick(b.diagrams, name, "diagram")


def _bidegrees(keys, p: int | None, q: int | None) -> list[Bidegree]:
    return [Bidegree(*k) for k in sorted(keys) if (p is None or k[0] == p) and (q is None or k[1] == q)]


def _table(headers: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [[str(h) for h in headers]] + [[str(x) for x in r] for r in rows]
    widths = [max(len(r[k]) for r in cells) for k in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


# ---------------------------------------------------------------- commands

def cmd_validate(b: ModelBundle, args) -> tuple[dict, str]:
    entries = []
    for m in b.models.values():
        entries.append(("model", m.name, validate_model(m, seed=args.seed)))
    for c in b.complexes.values():
        entries.append(("complex", c.name, [str(i) for i in c.issues]))
    for d in b.diagrams.values():
        issues = list(d.issues)
        if not issues:
            issues = [f"total complex: {i}" for i in d.total.issues]
        entries.append(("diagram", d.name, issues))
    for pd in b.pairings.values():
        issues = pd.issues()
        if not issues:
            try:
                form_to_current(pd)
            except CechDolbeaultError as exc:
                issues = [str(exc)]
        entries.append(("pairing", pd.name, issues))
    for m in b.morphisms.values():
        entries.append(("morphism", m.name, list(m.issues)))
    entries.extend(("bundle", b.name, [i]) for i in b.issues())
    report = {"command": "validate", "bundle": b.name, "passed": all(not e[2] for e in entries),
              "objects": [{"kind": k, "name": n, "valid": not i, "issues": i} for k, n, i in entries]}
    text = _table(["kind", "name", "valid", "issues"],
                  [(k, n, "yes" if not i else "NO", "; ".join(i)) for k, n, i in entries])
    return report, text


def _cohomology_target(b: ModelBundle, name: str | None):
    if name is not None:
        if name in b.models:
            return name, b.models[name].complex
        if name in b.complexes:
            return name, b.complexes[name]
        if name in b.diagrams:
            return name, b.diagrams[name].total
        raise InputError(f"unknown object {name!r}")
    for table, get in ((b.models, lambda m: m.complex), (b.complexes, lambda c: c),
                       (b.diagrams, lambda d: d.total)):
        for key, obj in table.items():
            return key, get(obj)
    raise InputError("the bundle contains nothing to compute cohomology of")


def cmd_cohomology(b: ModelBundle, args) -> tuple[dict, str]:
    name, c = _cohomology_target(b, args.object)
    keys = set(c.dims)
    if args.p is not None and args.q is not None:
        keys.add(Bidegree(args.p, args.q))
    rows = [(bd.p, bd.q, c.dim(*bd), cohomology(c, *bd).dim) for bd in _bidegrees(keys, args.p, args.q)]
    report = {"command": "cohomology", "object": name, "passed": True,
              "groups": [{"p": p, "q": q, "space_dim": n, "dim": h} for p, q, n, h in rows]}
    return report, f"cohomology of {name}\n" + _table(["p", "q", "space", "H"], rows)


def cmd_relative(b: ModelBundle, args) -> tuple[dict, str]:
    d = _diagram(b, args.diagram)
    omit = _label(d, args.omit)
    rel = relative_complex(d, omit)
    kept = next(a for a in d.index_set if a != omit)
    restriction = d.restriction((kept,), tuple(d.index_set))
    shifted = reindex(cone(restriction), 0, 1)
    keys = set(rel.dims) | set(shifted.dims)
    rows = []
    for bd in _bidegrees(keys, args.p, args.q):
        h_rel, h_cone = cohomology(rel, *bd).dim, cohomology(shifted, *bd).dim
        rows.append((bd.p, bd.q, h_rel, h_cone, h_rel == h_cone))
    passed = all(r[4] for r in rows)
    report = {"command": "relative", "diagram": d.name, "omit": omit, "passed": passed,
              "groups": [{"p": p, "q": q, "dim": h, "cone_dim": c, "agree": ok} for p, q, h, c, ok in rows]}
    text = f"relative cohomology of {d.name} with U0 = {omit}\n" + _table(
        ["p", "q", "H(rel)", "H(cone)", "agree"], [(p, q, h, c, "yes" if ok else "NO") for p, q, h, c, ok in rows])
    return report, text


def cmd_les(b: ModelBundle, args) -> tuple[dict, str]:
    d = _diagram(b, args.diagram)
    omit = _label(d, args.omit)
    s = ses_of_pair(d, omit)
    ps = [args.p] if args.p is not None else d.piece_ps()
    reports = [assemble_les(s, p) for p in ps]
    report = {"command": "les", "diagram": d.name, "omit": omit, "ses_issues": s.issues,
              "passed": not s.issues and all(r.all_exact for r in reports),
              "sequences": [r.to_dict() for r in reports]}
    return report, "\n\n".join(r.text() for r in reports)


def cmd_dual_compare(b: ModelBundle, args) -> tuple[dict, str]:
    d = _diagram(b, args.diagram)
    pairs = b.pairings_for(d.name)
    if pairs is None:
        raise InputError(f"diagram {d.name!r} has no pairings in this bundle")
    omit = _label(d, args.omit)
    cmp = compare_forms_currents(d, pairs, omit)
    report = {"command": "dual-compare", "diagram": d.name, "omit": omit,
              "passed": cmp.all_iso and cmp.ladders_commute, **cmp.to_dict()}
    rows = [(bd.p, bd.q, cmp.kernel_dims[bd], "yes" if ok else "NO") for bd, ok in sorted(cmp.verdicts.items())]
    text = (f"forms vs currents on {d.name}, U0 = {omit}\n"
            + _table(["p", "q", "kernel", "iso"], rows)
            + f"\nladder squares commute: {'yes' if cmp.ladders_commute else 'NO'}")
    return report, text


def cmd_morphism_check(b: ModelBundle, args) -> tuple[dict, str]:
    m = _pick(b.morphisms, args.morphism, "morphism")
    proj = projection_identity_check(m)
    push_ok = relative_pushforward(m).is_chain_map() if not m.issues else False
    hyps = [{"hypothesis": n, "holds": ok, "detail": d} for n, ok, d in m.hypotheses]
    certs, failure = [], None
    try:
        certs = injectivity_certificates(m)
    except HypothesisError as exc:
        failure = str(exc)
    passed = failure is None and proj.holds and push_ok and all(c.verdict for c in certs)
    report = {"command": "morphism-check", "morphism": m.name, "passed": passed,
              "mu": proj.to_dict()["mu"], "projection_identity": proj.to_dict(),
              "pushforward_chain_map": push_ok, "hypotheses": hyps, "failure": failure,
              "certificates": [c.to_dict() for c in certs]}
    lines = [f"morphism {m.name}", f"degree mu = {report['mu']}",
             f"projection identity: {'holds' if proj.holds else 'FAILS ' + ', '.join(proj.failures)}",
             f"pushforward commutes with D: {'yes' if push_ok else 'NO'}"]
    if failure:
        lines.append(f"no certificates issued: {failure}")
    else:
        lines.append(_table(["p", "q", "kernel", "injective"],
                            [(c.at.p, c.at.q, c.kernel_dim, "yes" if c.verdict else "NO") for c in certs]))
    return report, "\n".join(lines)


def cmd_blowup(b: ModelBundle, args) -> tuple[dict, str]:
    m = _pick(b.morphisms, args.morphism, "morphism")
    n = m.dimension
    keys = {(p, q) for p in range(n + 1) for q in range(n + 1)}
    reports = [blowup_decomposition(m, *bd) for bd in _bidegrees(keys, args.p, args.q)]
    passed = all(r.certified for r in reports)
    report = {"command": "blowup", "morphism": m.name, "passed": passed,
              "bidegrees": [r.to_dict() for r in reports]}
    rows = []
    for r in reports:
        dm = r.dims
        rows.append((r.at.p, r.at.q, dm["h_global_target"], dm["h_global_source"], dm["quotient_dim"],
                     "yes" if r.certified else "NO", "; ".join(r.failed)))
    text = f"blow-up decomposition for {m.name}\n" + _table(
        ["p", "q", "h(X)", "h(X~)", "quotient", "certified", "failed maps"], rows)
    return report, text


COMMANDS: dict[str, Callable] = {
    "validate": cmd_validate,
    "cohomology": cmd_cohomology,
    "relative": cmd_relative,
    "les": cmd_les,
    "dual-compare": cmd_dual_compare,
    "morphism-check": cmd_morphism_check,
    "blowup": cmd_blowup,
}


# ---------------------------------------------------------------- parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cechdolbeault",
                                     description="Exact Čech–Dolbeault cohomology checks on bundled models.")
    parser.add_argument("--structured", action="store_true", help="print JSON instead of tables")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, *extra):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("path", help="bundle directory, manifest or complex file")
        sp.add_argument("--structured", action="store_true", default=argparse.SUPPRESS,
                        help="print JSON instead of tables")
        for flag in extra:
            if flag in ("--p", "--q", "--seed"):
                sp.add_argument(flag, type=int, default=0 if flag == "--seed" else None)
            else:
                sp.add_argument(flag)
        return sp

    add("validate", "validate every object in a bundle", "--seed")
    add("cohomology", "cohomology dimensions of a model, complex or diagram", "--object", "--p", "--q")
    add("relative", "relative cohomology with the cone cross-check", "--diagram", "--omit", "--p", "--q")
    add("les", "long exact sequence of the pair", "--diagram", "--omit", "--p")
    add("dual-compare", "forms versus currents on relative cohomology", "--diagram", "--omit")
    add("morphism-check", "degree, projection identity and injectivity", "--morphism")
    add("blowup", "blow-up decomposition with its hypotheses", "--morphism", "--p", "--q")
    emit = sub.add_parser("emit-bundle", help="write a bundled example to a directory")
    emit.add_argument("name", nargs="?", help=f"one of: {', '.join(CORPUS)}")
    emit.add_argument("out", nargs="?", help="output directory")
    emit.add_argument("--list", action="store_true", help="list bundled examples")
    emit.add_argument("--structured", action="store_true", default=argparse.SUPPRESS)
    return parser


def _emit(args, out) -> int:
    if args.list or args.name is None:
        report = {"command": "emit-bundle", "passed": True, "bundles": sorted(CORPUS)}
        out.write(dumps(report) if args.structured else "\n".join(sorted(CORPUS)) + "\n")
        return 0
    if args.out is None:
        raise InputError("emit-bundle needs an output directory")
    try:
        b = named_bundle(args.name)
    except KeyError as exc:
        raise InputError(exc.args[0]) from None
    path = write_bundle(b, args.out)
    report = {"command": "emit-bundle", "passed": True, "bundle": args.name, "manifest": path.name}
    out.write(dumps(report) if args.structured else f"wrote {args.name} to {args.out}\n")
    return 0


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "emit-bundle":
            return _emit(args, out)
        bundle = read_path(args.path)
        report, text = COMMANDS[args.command](bundle, args)
    except FormatError as exc:
        err.write(f"input error: {exc}\n")
        return 2
    except InputError as exc:
        err.write(f"input error: {exc}\n")
        return 2
    except CechDolbeaultError as exc:
        err.write(f"check failed: {exc}\n")
        return 1
    out.write(dumps(report) if args.structured else text + "\n")
    return 0 if report["passed"] else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
