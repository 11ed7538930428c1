"""Command-line entry point: ``cycind <subcommand> ...``.

Exit codes: 0 when every check passes, 1 on a proof or property violation
(details go to the ``--report`` file when one is given), 2 on usage or
input errors.  Human-readable results go to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import sys
from collections import Counter
from pathlib import Path

from .report import Report


class UsageError(Exception):
    pass


class Violated(Exception):
    """Raised by a command after it has reported a violation."""


class Context:
    def __init__(self, args):
        self.args = args
        self.report = Report(args.command if args.command != "lab" else "lab " + args.lab_command)

    def say(self, text=""):
        if not self.args.quiet:
            print(text)

    def defs(self):
        from .logic.defs import load_defs

        if not self.args.defs:
            raise UsageError("--defs is required for this command")
        return load_defs(_existing(self.args.defs))

    def proof(self, defs, path=None):
        from .proofs.fileformat import load_proof

        return load_proof(_existing(path or self.args.proof), defs)


def _existing(path) -> str:
    if not Path(path).is_file():
        raise UsageError(f"no such file: {path}")
    return str(path)


def _write(path, text):
    with open(path, "w") as fh:
        fh.write(text)


def _rule_bars(ctx, title, g):
    counts = Counter(n.rule.tag for n in g.nodes.values())
    tags = sorted(counts)
    ctx.report.bar(title, tags, [counts[t] for t in tags])


def _violations(ctx, bad, what):
    for v in bad:
        print(f"{what}: {v}", file=sys.stderr)
        ctx.report.add("violation", node=v.node, rule=v.tag, message=v.message)
    raise Violated


# -- proof commands -------------------------------------------------------------------


def cmd_check(ctx):
    from .proofs.kernel import check_proof
    from .logic.text import show_sequent
    from .trace.relations import basic_relations, closure, gtc_check

    defs = ctx.defs()
    g = ctx.proof(defs)
    _rule_bars(ctx, "rule instances", g)
    bad = check_proof(g, defs, ctx.args.mode)
    if bad:
        _violations(ctx, bad, "check")
    if ctx.args.mode == "cyclic":
        r = gtc_check(closure(basic_relations(g, defs)))
        if r is not None:
            print(f"check: global trace condition fails at {r.text()}", file=sys.stderr)
            ctx.report.add("violation", node=None, rule="GTC", message=r.text())
            raise Violated
    ctx.report.add("result", mode=ctx.args.mode, nodes=len(g.nodes), buds=len(g.buds),
                   conclusion=show_sequent(g.conclusion), ok=True)
    ctx.say(f"ok: {ctx.args.mode} proof of {show_sequent(g.conclusion)} ({len(g.nodes)} nodes, {len(g.buds)} buds)")


def closure_text(g, defs) -> str:
    """Basic relations, fixpoint, closure, verdict and loop witnesses in a fixed layout."""
    from .trace.relations import basic_relations, closure, gtc_check, is_idempotent, loop_witness

    basics = sorted(set(basic_relations(g, defs)))
    cl = closure(basics)
    bad = gtc_check(cl)
    out = [f"companions {' '.join(map(str, g.companions))}", f"basics {len(basics)}"]
    out += [f"rel {r.text()}" for r in basics]
    out.append(f"fixpoint {cl.generation}")
    out.append(f"closure {len(cl.relations)}")
    out += [f"rel {r.text()}" for r in cl.relations]
    for k, r in enumerate(cl.relations):
        if r.is_loop:
            w = loop_witness(r)
            tail = "none" if w is None else f"{w[0]} {w[1]}"
            out.append(f"witness {k} {tail}{' idempotent' if is_idempotent(r) else ''}")
    out.append("verdict " + ("ok" if bad is None else "fail " + bad.text()))
    return "\n".join(out) + "\n"


def cmd_trace(ctx):
    from .proofs.kernel import check_proof
    from .trace.relations import basic_relations, closure, gtc_check

    defs = ctx.defs()
    g = ctx.proof(defs)
    bad = check_proof(g, defs, "cyclic")
    if bad:
        _violations(ctx, bad, "trace")
    text = closure_text(g, defs)
    if ctx.args.dump_closure:
        _write(ctx.args.dump_closure, text)
    basics = sorted(set(basic_relations(g, defs)))
    cl = closure(basics)
    r = gtc_check(cl)
    ctx.report.add("closure", companions=list(g.companions), basics=len(basics), fixpoint=cl.generation,
                   relations=[x.text() for x in cl.relations], ok=r is None)
    per_gen = Counter(x.source for x in cl.relations)
    ctx.report.bar("closure relations by source companion", sorted(per_gen), [per_gen[k] for k in sorted(per_gen)])
    ctx.say(text.rstrip("\n"))
    if r is not None:
        print(f"trace: global trace condition fails at {r.text()}", file=sys.stderr)
        raise Violated


def cmd_stage(ctx):
    from .proofs.fileformat import show_proof
    from .proofs.graph import fresh_supply, to_graph
    from .proofs.kernel import check_proof
    from .stage.staging import ineq_entails, stage_proof
    from .logic.text import show_sequent
    from .trace.relations import path_relation

    defs = ctx.defs()
    g = ctx.proof(defs)
    bad = check_proof(g, defs, "cyclic")
    if bad:
        _violations(ctx, bad, "stage")
    fresh = fresh_supply(g)
    starts = [ctx.args.start] if ctx.args.start is not None else list(g.companions) or [g.root]
    for s in starts:
        if s not in g.nodes:
            raise UsageError(f"no node {s}")
    index = {c: k for k, c in enumerate(g.companions)}
    lines = []
    failed = False
    staged = None
    for s in starts:
        sp = stage_proof(g, defs, start=s, fresh=fresh)
        if staged is None:
            staged = to_graph(sp.proof)
        vec = " ".join(v.name for v in sp.vec)
        lines.append(f"start {s} stages {vec or '-'} assumptions {len(sp.assumptions)}")
        for sa in sp.assumptions:
            facts = " ".join(f"{a}{op}{b}" for op, a, b in sa.ineq)
            ok = None
            if sa.node in g.buds and s in index:
                rel = path_relation(sa.path, g, defs, source=index[s], target=index[g.buds[sa.node]])
                ok = ineq_entails(sa.ineq, sp.vec, sa.vec, rel)
                failed |= not ok
            verdict = {None: "n/a", True: "entails", False: "FAILS"}[ok]
            lines.append(f"  leaf {sa.node} stages {' '.join(v.name for v in sa.vec) or '-'} "
                         f"facts {facts or '-'} {verdict}")
            ctx.report.add("assumption", start=s, leaf=sa.node, path=list(sa.path),
                           ineq=[list(t) for t in sa.ineq], entails=ok)
        ctx.report.add("staged", start=s, conclusion=show_sequent(sp.proof.seq), assumptions=len(sp.assumptions))
    text = "\n".join(lines) + "\n"
    if ctx.args.ineq_report:
        _write(ctx.args.ineq_report, text)
    if ctx.args.output:
        _write(ctx.args.output, show_proof(staged))
    _rule_bars(ctx, "rule instances (staged)", staged)
    ctx.say(text.rstrip("\n"))
    if failed:
        print("stage: stage facts do not entail a path relation", file=sys.stderr)
        raise Violated


def cmd_compile(ctx):
    from .compiler.buds import CompileError, compile_proof
    from .proofs.fileformat import show_proof
    from .logic.text import show_sequent
    from .trace.certificate import validate_certificate

    defs = ctx.defs()
    g = ctx.proof(defs)
    try:
        c = compile_proof(g, defs, lower=not ctx.args.staged)
    except CompileError as e:
        print(f"compile: {e}", file=sys.stderr)
        ctx.report.add("violation", node=None, rule="compile", message=str(e))
        raise Violated from None
    validate_certificate(c.certificate, c.cid)
    _write(ctx.args.output, show_proof(c.proof))
    cert = ctx.args.cert or str(ctx.args.output) + ".cert"
    _write(cert, c.certificate)
    ctx.report.add("compiled", conclusion=show_sequent(c.proof.conclusion), nodes=len(c.proof.nodes),
                   certificate=c.cid, paths=[[a, b, ok] for a, b, ok in c.entailments])
    _rule_bars(ctx, "rule instances (input)", g)
    _rule_bars(ctx, "rule instances (output)", c.proof)
    ctx.say(f"compiled {show_sequent(c.proof.conclusion)}: {len(c.proof.nodes)} nodes, certificate {c.cid}")


def cmd_embed(ctx):
    from .compiler.embed import EmbedError, embed_proof
    from .proofs.fileformat import show_proof
    from .proofs.kernel import check_proof
    from .logic.text import show_sequent

    defs = ctx.defs()
    g = ctx.proof(defs)
    bad = check_proof(g, defs, "ljid")
    if bad:
        _violations(ctx, bad, "embed")
    try:
        e = embed_proof(g, defs)
    except EmbedError as err:
        print(f"embed: {err}", file=sys.stderr)
        raise Violated from None
    _write(ctx.args.output, show_proof(e))
    ctx.report.add("embedded", conclusion=show_sequent(e.conclusion), nodes=len(e.nodes), buds=len(e.buds))
    _rule_bars(ctx, "rule instances (cyclic)", e)
    ctx.say(f"embedded {show_sequent(e.conclusion)}: {len(e.nodes)} nodes, {len(e.buds)} buds")


def cmd_lower(ctx):
    from .compiler.buds import base_signature
    from .compiler.lower import UnsupportedNode, lower
    from .proofs.fileformat import show_proof
    from .proofs.kernel import check_proof
    from .stage.staging import staged_defs
    from .logic.text import show_sequent

    defs = ctx.defs()
    base = base_signature(defs)
    sd = staged_defs(base)
    g = ctx.proof(sd)
    bad = check_proof(g, sd, "ljid")
    if bad:
        _violations(ctx, bad, "lower")
    try:
        out = lower(g, sd, base)
    except (UnsupportedNode, ValueError) as e:
        print(f"lower: {e}", file=sys.stderr)
        raise Violated from None
    _write(ctx.args.output, show_proof(out))
    ctx.report.add("lowered", conclusion=show_sequent(out.conclusion), nodes=len(out.nodes))
    _rule_bars(ctx, "rule instances (lowered)", out)
    ctx.say(f"lowered {show_sequent(out.conclusion)}: {len(out.nodes)} nodes")


# -- lab commands ---------------------------------------------------------------------


def _read(path):
    with open(_existing(path)) as fh:
        return fh.read()


def cmd_lab_pr_check(ctx):
    from .lab.core import pr_check
    from .lab.oracle import acyclic
    from .lab.systems import parse_system

    s = parse_system(_read(ctx.args.system))
    v = pr_check(s)
    agree = v.ok == acyclic(s.universe, s.union)
    ctx.report.add("verdict", **v.as_dict(), oracle_agrees=agree)
    ctx.report.bar("pairs per color", [f"R{i}" for i in range(1, s.k + 1)], [len(r) for r in s.colors])
    if v.ok:
        ctx.say(f"union well-founded ({len(v.steps)} steps, {v.extensions} extensions checked)")
    else:
        print(f"lab pr-check: {v.failure}", file=sys.stderr)
    if not v.ok or not agree:
        raise Violated


def cmd_lab_sweep(ctx):
    from .lab.sweeps import pr_sweep

    a = ctx.args
    if a.samples < 0 or a.max_u < 0 or a.max_k < 1:
        raise UsageError("bounds must be non-negative and --max-k at least 1")
    bad = []
    groups = pr_sweep(a.max_u, a.max_k, a.seed, a.samples, a.rand_u, a.rand_k, on_disagreement=bad.append)
    labels, counts = [], []
    for rec in groups:
        ctx.report.add("group", **rec)
        labels.append(f"{rec['part'][0]}{rec['u']},{rec['k']}")
        counts.append(rec["systems"])
        ctx.say(f"{rec['part']:10} |U|={rec['u']} k={rec['k']} systems={rec['systems']} "
                f"extensions={rec['extensions']} disagreements={rec['disagreements']} "
                f"lemma_failures={rec['lemma_failures']}")
    ctx.report.bar("systems per group (e=exhaustive, r=random)", labels, counts)
    total = sum(r["disagreements"] + r["lemma_failures"] for r in groups)
    if total:
        print(f"lab sweep: {total} failures", file=sys.stderr)
        raise Violated


def cmd_lab_kb(ctx):
    from .lab.core import kb_relation
    from .lab.oracle import acyclic
    from .lab.sweeps import kb_sweep
    from .lab.systems import parse_tree

    if ctx.args.tree:
        tree, rels = parse_tree(_read(ctx.args.tree))
        rel = kb_relation(tree, lambda u: rels.get(u, frozenset()))
        ok = acyclic(tree, rel)
        refl = sum(1 for a, b in rel if a == b)
        ctx.report.add("kb", nodes=len(tree), pairs=len(rel), acyclic=ok, reflexive=refl)
        ctx.report.bar("tree nodes by depth", *_depths(tree))
        ctx.say(f"kb relation on {len(tree)} nodes: {len(rel)} pairs, {'acyclic' if ok else 'CYCLIC'}")
        if not ok or refl:
            raise Violated
        return
    rec = kb_sweep(ctx.args.seed, ctx.args.samples)
    ctx.report.add("kb-sweep", **rec)
    ctx.say(" ".join(f"{k}={rec[k]}" for k in sorted(rec)))
    if rec["cyclic"] or rec["reflexive"] or rec["disagreements"]:
        raise Violated


def _depths(tree):
    c = Counter(len(x) for x in tree)
    keys = sorted(c)
    return keys, [c[k] for k in keys]


# -- argument parsing -----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    # SUPPRESS keeps a subcommand from resetting a global flag given before it
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--defs", help="definition set file")
    common.add_argument("--seed", type=int, help="seed for randomized sweeps (default 0)")
    common.add_argument("--quiet", action="store_true", help="suppress human-readable output")
    common.add_argument("--report", help="write JSON lines here, and a PNG figure next to it")

    p = _Parser(prog="cycind", description="Cyclic and induction proofs: checking, tracing, compiling.",
                parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", parents=[common], help="check a proof")
    c.add_argument("proof")
    c.add_argument("--mode", choices=["cyclic", "ljid"], default="cyclic")

    t = sub.add_parser("trace", parents=[common], help="path relations and the global trace condition")
    t.add_argument("proof")
    t.add_argument("--dump-closure", metavar="PATH")

    s = sub.add_parser("stage", parents=[common], help="stage a cyclic proof")
    s.add_argument("proof")
    s.add_argument("-o", "--output", help="staged proof from the first start node")
    s.add_argument("--ineq-report", metavar="PATH")
    s.add_argument("--start", type=int, help="node to stage from (default: every companion)")

    k = sub.add_parser("compile", parents=[common], help="cyclic proof to induction proof")
    k.add_argument("proof")
    k.add_argument("-o", "--output", required=True)
    k.add_argument("--cert", help="certificate path (default: OUTPUT.cert)")
    k.add_argument("--staged", action="store_true", help="keep the stage predicates in the output")

    e = sub.add_parser("embed", parents=[common], help="induction proof to cyclic proof")
    e.add_argument("proof")
    e.add_argument("-o", "--output", required=True)

    w = sub.add_parser("lower", parents=[common], help="remove stage predicates from an induction proof")
    w.add_argument("proof")
    w.add_argument("-o", "--output", required=True)

    lab = sub.add_parser("lab", parents=[common], help="finite-model laboratory")
    lsub = lab.add_subparsers(dest="lab_command", required=True, parser_class=_Parser)
    pc = lsub.add_parser("pr-check", parents=[common], help="run the disjunctive well-foundedness chain")
    pc.add_argument("--system", required=True)
    sw = lsub.add_parser("sweep", parents=[common], help="exhaustive and random pr-check sweeps")
    sw.add_argument("--max-u", type=int, default=4)
    sw.add_argument("--max-k", type=int, default=2)
    sw.add_argument("--samples", type=int, default=10000)
    sw.add_argument("--rand-u", type=int, default=6)
    sw.add_argument("--rand-k", type=int, default=3)
    kb = lsub.add_parser("kb", parents=[common], help="Kleene-Brouwer relation on a tree, or a random sweep")
    kb.add_argument("--tree")
    kb.add_argument("--samples", type=int, default=1000)
    return p


GLOBAL_DEFAULTS = {"defs": None, "seed": 0, "quiet": False, "report": None}

_COMMANDS = {
    "check": cmd_check, "trace": cmd_trace, "stage": cmd_stage, "compile": cmd_compile,
    "embed": cmd_embed, "lower": cmd_lower,
    ("lab", "pr-check"): cmd_lab_pr_check, ("lab", "sweep"): cmd_lab_sweep, ("lab", "kb"): cmd_lab_kb,
}


def main(argv=None) -> int:
    from .compiler.buds import CompileError
    from .lab.core import LabError
    from .logic.text import ParseError
    from .proofs.rules import RuleError
    from .trace.certificate import CertificateError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        for name, value in GLOBAL_DEFAULTS.items():
            if not hasattr(args, name):
                setattr(args, name, value)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"cycind: {e}", file=sys.stderr)
        return 2
    key = args.command if args.command != "lab" else ("lab", args.lab_command)
    ctx = Context(args)
    code = 0
    try:
        _COMMANDS[key](ctx)
    except UsageError as e:
        print(f"cycind: {e}", file=sys.stderr)
        return 2
    except (ParseError, RuleError, LabError) as e:
        print(f"cycind: cannot read input: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"cycind: {e}", file=sys.stderr)
        return 2
    except (Violated, CompileError, CertificateError) as e:
        if not isinstance(e, Violated):
            print(f"cycind: {e}", file=sys.stderr)
        code = 1
    if args.report:
        ctx.report.write(args.report)
    return code


if __name__ == "__main__":
    sys.exit(main())
