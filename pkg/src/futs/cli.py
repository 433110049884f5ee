"""``futs`` command-line tool.

Exit codes: 0 success, 1 diagnostic (syntax, guardedness, malformed model),
2 usage or I/O error, 3 not bisimilar, 4 state cap exceeded.  ``xcheck``
exits 1 when any term fails.  Every command renders its whole output before
writing, so a failure never leaves half a JSON document behind.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import iml, pepa, xcheck
from .bisim import check_homomorphism, coarsest_bisimulation, distinguish, is_bisimulation, quotient
from .errors import FutsError, ModelError, ParseError, StateCapExceeded
from .generate import format_corpus, generate_corpus
from .serialize import dumps, export_futs, export_partition, import_futs, to_dot
from .standard import DEFAULT_CAP
from .syntax import IML, PEPA, dump_ast, fmt_rate, parse_program, resolve_root, show, split_corpus_lines

EXIT_OK = 0
EXIT_DIAG = 1
EXIT_USAGE = 2
EXIT_NOT_BISIMILAR = 3
EXIT_CAP = 4

RAW = "raw"
EXTENSIONS = {".pepa": PEPA, ".iml": IML, ".json": RAW, ".futs": RAW}


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _seed(text: str) -> int:
    n = int(text)
    if not 0 <= n < 1 << 64:
        raise argparse.ArgumentTypeError("must be an unsigned 64-bit integer")
    return n


def _language(args, path: str | None) -> str:
    if args.lang:
        return args.lang
    if path:
        ext = os.path.splitext(path)[1].lower()
        if ext in EXTENSIONS:
            return EXTENSIONS[ext]
    raise UsageError("cannot infer the language from the file name; pass --lang")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return fmt_rate(v)
    return str(v)


def _name(s) -> str:
    return s if isinstance(s, str) else show(s)


# --- loading ----------------------------------------------------------------


class Loaded:
    """A model ready for exploration: language, env and resolved roots."""

    def __init__(self, language, env=None, roots=(), raw=None):
        self.language = language
        self.env = env
        self.roots = list(roots)
        self.raw = raw

    def explore(self, cap: int):
        if self.language == RAW:
            return self.raw
        if self.language == PEPA:
            return pepa.explore_pepa(self.roots, self.env, cap)
        return iml.explore_iml(self.roots, self.env, cap)


def _load(args, want_roots: int | None) -> Loaded:
    """Parse ``args.file``; ``want_roots`` is the exact number needed, ``None`` for one or more."""
    language = _language(args, args.file)
    text = _read(args.file)
    requested = args.root or []
    if language == RAW:
        model = import_futs(text)
        for r in requested:
            if r not in model.index:
                raise ModelError("schema", f"unknown state {r!r}")
        roots = requested or list(model.states[:1])
        _check_root_count(roots, want_roots)
        return Loaded(RAW, roots=roots, raw=model)
    env, root = parse_program(text, language)
    roots = []
    for r in requested:
        env, t = resolve_root(env, r)
        roots.append(t)
    if not roots and root is not None:
        roots = [root]
    _check_root_count(roots, want_roots)
    return Loaded(language, env=env, roots=roots)


def _check_root_count(roots, want):
    if not roots:
        raise UsageError("no root process: add a final expression line or pass --root")
    if want is not None and len(roots) != want:
        raise UsageError(f"expected {want} roots, got {len(roots)}")


# --- commands -----------------------------------------------------------------


def cmd_parse(args) -> tuple[int, str]:
    language = _language(args, args.file)
    if language == RAW:
        model = import_futs(_read(args.file))
        if args.format == "json":
            return EXIT_OK, dumps(export_futs(model))
        return EXIT_OK, f"model: {len(model.states)} states, {len(model.schemas)} relations\n"
    text = _read(args.file)
    programs = []
    for start, src in split_corpus_lines(text):
        try:
            programs.append(parse_program(src, language))
        except ParseError as exc:
            if exc.line:
                raise ParseError(exc.kind, exc.message, exc.line + start - 1, exc.col) from None
            raise
    if args.format == "json":
        docs = [
            {
                "language": env.language,
                "alphabet": list(env.alphabet),
                "definitions": {name: show(body) for name, body in sorted(env.definitions.items())},
                "root": show(root) if root is not None else None,
            }
            for env, root in programs
        ]
        return EXIT_OK, dumps(docs[0] if len(docs) == 1 else docs)
    out = []
    for k, (env, root) in enumerate(programs):
        if len(programs) > 1:
            out.append(f"# program {k + 1}")
        out.append(f"language: {env.language}")
        out.append(f"alphabet: {{{', '.join(env.alphabet)}}}")
        for name, body in sorted(env.definitions.items()):
            out.append(f"{name} :=")
            out.append(dump_ast(body, 1))
        if root is not None:
            out.append("root:")
            out.append(dump_ast(root, 1))
    return EXIT_OK, "\n".join(out) + "\n"


def _standard_doc(loaded: Loaded, cap: int) -> dict:
    env = loaded.env.with_terms(*loaded.roots)
    doc = {"language": loaded.language, "initial": [show(r) for r in loaded.roots]}
    if loaded.language == PEPA:
        states = pepa.standard_states(loaded.roots, env, cap)
        doc["states"] = [show(s) for s in states]
        doc["transitions"] = [
            {
                "source": show(s),
                "action": tr.action,
                "rate": fmt_rate(tr.rate),
                "target": show(tr.target),
                "multiplicity": tr.multiplicity,
            }
            for s in states
            for tr in sorted(pepa.standard_transitions(s, env), key=lambda tr: (tr.action, tr.rate, show(tr.target)))
        ]
        return doc
    states = iml.standard_states(loaded.roots, env, cap)
    doc["states"] = [show(s) for s in states]
    doc["actions"] = [
        {"source": show(s), "action": a, "target": show(t)}
        for s in states
        for a, t in sorted(iml.standard_action_transitions(s, env), key=lambda p: (p[0], show(p[1])))
    ]
    doc["delays"] = [
        {"source": show(s), "rate": fmt_rate(lam), "target": show(t), "multiplicity": m}
        for s in states
        for lam, t, m in sorted(iml.standard_delay_transitions(s, env), key=lambda p: (p[0], show(p[1])))
    ]
    return doc


def _standard_text(doc: dict) -> str:
    lines = [f"{len(doc['states'])} states"]
    for tr in doc.get("transitions", []):
        lines.append(f"{tr['source']} --({tr['action']},{tr['rate']})--> {tr['target']}  x{tr['multiplicity']}")
    for tr in doc.get("actions", []):
        lines.append(f"{tr['source']} --{tr['action']}--> {tr['target']}")
    for tr in doc.get("delays", []):
        lines.append(f"{tr['source']} --({tr['rate']})--> {tr['target']}  x{tr['multiplicity']}")
    return "\n".join(lines) + "\n"


def _standard_dot(doc: dict) -> str:
    q = json.dumps
    lines = ["digraph standard {", "  rankdir=LR;", "  node [shape=box, fontname=monospace];"]
    for s in doc["states"]:
        attrs = ", penwidth=2" if s in doc["initial"] else ""
        lines.append(f"  {q(s)} [label={q(s)}{attrs}];")
    for tr in doc.get("transitions", []):
        lab = f"({tr['action']},{tr['rate']}) x{tr['multiplicity']}"
        lines.append(f"  {q(tr['source'])} -> {q(tr['target'])} [label={q(lab)}];")
    for tr in doc.get("actions", []):
        lines.append(f"  {q(tr['source'])} -> {q(tr['target'])} [label={q(tr['action'])}];")
    for tr in doc.get("delays", []):
        lab = f"({tr['rate']}) x{tr['multiplicity']}"
        lines.append(f"  {q(tr['source'])} -> {q(tr['target'])} [label={q(lab)}, style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _model_text(model) -> str:
    lines = [f"{len(model.states)} states"]
    for sc, s, label, fn in model.rows():
        if fn:
            cont = ", ".join(f"{_name(t)} -> {_value(v)}" for t, v in fn.items())
            lines.append(f"{_name(s)} --{label}--> {{{cont}}}")
    return "\n".join(lines) + "\n"


def cmd_lts(args) -> tuple[int, str]:
    loaded = _load(args, None)
    if args.semantics == "standard":
        if loaded.language == RAW:
            raise UsageError("standard semantics needs a pepa or iml source")
        doc = _standard_doc(loaded, args.cap)
        if args.format == "dot":
            return EXIT_OK, _standard_dot(doc)
        if args.format == "text":
            return EXIT_OK, _standard_text(doc)
        return EXIT_OK, dumps(doc)
    model = loaded.explore(args.cap)
    if args.format == "dot":
        return EXIT_OK, to_dot(model, _name, initial=set(loaded.roots))
    if args.format == "text":
        return EXIT_OK, _model_text(model)
    return EXIT_OK, dumps(export_futs(model, _name))


def _witness_json(w) -> dict:
    return {
        "left": _name(w.left),
        "right": _name(w.right),
        "relation": w.relation,
        "label": str(w.label),
        "class": [_name(s) for s in w.block],
        "left_value": _value(w.left_value),
        "right_value": _value(w.right_value),
    }


def cmd_bisim(args) -> tuple[int, str]:
    loaded = _load(args, 2)
    a, b = loaded.roots
    model = loaded.explore(args.cap)
    partition = coarsest_bisimulation(model)
    if args.semantics == "standard" and loaded.language != RAW:
        env = loaded.env
        if loaded.language == PEPA:
            same = pepa.strongly_equivalent(a, b, env, args.cap)
        else:
            same = iml.strongly_bisimilar(a, b, env, args.cap)
    else:
        same = partition.same(a, b)
    chain = [] if same else distinguish(model, a, b, partition)
    verdict = "bisimilar" if same else "not-bisimilar"
    code = EXIT_OK if same else EXIT_NOT_BISIMILAR
    if args.format == "json":
        return code, dumps({"verdict": verdict, "witness": [_witness_json(w) for w in chain]})
    lines = [verdict]
    for k, w in enumerate(chain):
        lines.append(f"  {'witness' if k == 0 else 'because'}: {w.describe(_value, _name)}")
    return code, "\n".join(lines) + "\n"


def cmd_minimize(args) -> tuple[int, str]:
    loaded = _load(args, None)
    model = loaded.explore(args.cap)
    partition = coarsest_bisimulation(model)
    quot = quotient(model, partition)
    # postcondition replay: cheap relative to exploration
    if not (is_bisimulation(model, partition) and check_homomorphism(model, partition, quot)):
        raise AssertionError("quotient failed its own audit")
    if args.format == "dot":
        return EXIT_OK, to_dot(quot, _name)
    if args.format == "text":
        lines = [f"{len(model.states)} states -> {len(quot.states)} classes"]
        for block in partition.blocks:
            lines.append("  {" + ", ".join(_name(s) for s in block) + "}")
        return EXIT_OK, "\n".join(lines) + "\n" + _model_text(quot)
    return EXIT_OK, dumps({"quotient": export_futs(quot, _name), "partition": export_partition(partition, _name)})


def _xcheck_language(args) -> str:
    lang = xcheck.CHECKS[args.check]
    if args.file is None:
        if lang is None:
            return RAW
        return lang
    language = _language(args, args.file)
    if lang is not None and language != lang:
        raise UsageError(f"{args.check} applies to {lang} sources, not {language}")
    return language


def cmd_xcheck(args) -> tuple[int, str]:
    language = _xcheck_language(args)
    lines_of = {}
    if args.file is None:
        if args.check == "lemma2.1":
            results = xcheck.run_total_laws(args.seed, args.count)
        else:
            programs = xcheck.random_programs(args.check, args.seed, args.count, args.depth)
            results = xcheck.run_programs(args.check, programs, args.cap, args.jobs)
    else:
        text = _read(args.file)
        if language == RAW:
            model = import_futs(text)
            results = xcheck.run_total_laws_on_models([model])
        else:
            chunks = split_corpus_lines(text)
            programs = []
            for k, (start, src) in enumerate(chunks):
                try:
                    parse_program(src, language)
                except ParseError as exc:
                    line = exc.line + start - 1 if exc.line else start
                    raise ParseError(exc.kind, f"program {k + 1}: {exc.message}", line, exc.col) from None
                programs.append(src)
                lines_of[k] = start
            if args.check == "lemma2.1":
                results = xcheck.run_total_laws_on_programs(programs, language, args.cap)
            else:
                results = xcheck.run_programs(args.check, programs, args.cap, args.jobs)
    summary = xcheck.summarize(results)
    code = EXIT_OK if summary["fail"] == 0 else EXIT_DIAG
    if args.format == "json":
        doc = {
            "check": args.check,
            "results": [
                {
                    "index": r.index + 1,
                    "line": lines_of.get(r.index),
                    "status": r.status,
                    "detail": r.detail,
                    **({"source": r.source} if r.status == "fail" else {}),
                }
                for r in results
            ],
            "summary": summary,
        }
        return code, dumps(doc)
    out = []
    for r in results:
        where = f" (line {lines_of[r.index]})" if r.index in lines_of else ""
        out.append(f"{args.check} term {r.index + 1}{where}: {r.status}" + (f": {r.detail}" if r.detail else ""))
        if r.status == "fail":
            out.extend("    " + x for x in r.source.splitlines())
    out.append(
        f"{args.check}: {summary['pass']} passed, {summary['fail']} failed, "
        f"{summary['skipped']} skipped of {summary['total']}"
    )
    return code, "\n".join(out) + "\n"


def cmd_gen(args) -> tuple[int, str]:
    if args.lang not in (PEPA, IML):
        raise UsageError("gen needs --lang pepa or --lang iml")
    return EXIT_OK, format_corpus(generate_corpus(args.lang, args.seed, args.count, args.depth))


# --- argument parsing -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lang", choices=(PEPA, IML, RAW), help="input language (default: from the file extension)")
    common.add_argument("--cap", type=_positive, default=DEFAULT_CAP, help="state cap for exploration")
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--format", choices=("json", "dot", "text"))
    common.add_argument("-o", "--output", help="write to this file instead of stdout")

    parser = argparse.ArgumentParser(prog="futs", description="FuTS semantics and bisimulation for PEPA and IML.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="parse a program and dump its AST")
    p.add_argument("file")
    p.set_defaults(func=cmd_parse, default_format="text")

    p = sub.add_parser("lts", parents=[common], help="explore the reachable transition system")
    p.add_argument("file")
    p.add_argument("--root", action="append", help="root process (repeatable)")
    p.add_argument("--semantics", choices=("futs", "standard"), default="futs")
    p.set_defaults(func=cmd_lts, default_format="json")

    p = sub.add_parser("bisim", parents=[common], help="decide bisimilarity of two roots")
    p.add_argument("file")
    p.add_argument("--root", action="append", help="give exactly two")
    p.add_argument("--semantics", choices=("futs", "standard"), default="futs")
    p.set_defaults(func=cmd_bisim, default_format="text")

    p = sub.add_parser("minimize", parents=[common], help="quotient by the coarsest bisimulation")
    p.add_argument("file")
    p.add_argument("--root", action="append")
    p.set_defaults(func=cmd_minimize, default_format="json")

    p = sub.add_parser("xcheck", parents=[common], help="cross-check a lemma or theorem on a corpus")
    p.add_argument("check", choices=sorted(xcheck.CHECKS))
    p.add_argument("file", nargs="?", help="corpus file; omit for a random corpus")
    p.add_argument("--count", type=_positive, default=100)
    p.add_argument("--depth", type=_positive, default=5)
    p.add_argument("--jobs", type=_positive, default=1)
    p.set_defaults(func=cmd_xcheck, default_format="text")

    p = sub.add_parser("gen", parents=[common], help="generate a random corpus")
    p.add_argument("--count", type=_positive, default=10)
    p.add_argument("--depth", type=_positive, default=3)
    p.set_defaults(func=cmd_gen, default_format="text")
    return parser


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    try:
        code, text = args.func(args)
        _emit(text, args.output)
        return code
    except UsageError as exc:
        parser.exit(EXIT_USAGE, f"futs {args.command}: error: {exc}\n")
    except OSError as exc:
        print(f"futs: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnicodeDecodeError as exc:
        print(f"futs: input is not UTF-8: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StateCapExceeded as exc:
        print(f"futs: {exc}", file=sys.stderr)
        return EXIT_CAP
    except FutsError as exc:
        print(f"futs: {exc}", file=sys.stderr)
        return EXIT_DIAG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
