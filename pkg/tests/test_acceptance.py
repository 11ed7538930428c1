"""Acceptance criteria, one test each.

Every test records a ``criterion N: PASS|FAIL ...`` line; the lines are printed
in the terminal summary (see conftest.py) and also when this file is run as a
script.
"""
import random
import subprocess
import sys
import time

import pytest

from cycind.compiler.buds import base_signature, compile_proof
from cycind.compiler.embed import embed_proof
from cycind.compiler.lower import lower
from cycind.lab.core import et2_extensions
from cycind.lab.sweeps import kb_sweep, pr_sweep
from cycind.lab.systems import all_systems
from cycind.proofs.graph import fresh_supply, to_graph
from cycind.proofs.kernel import check_proof
from cycind.stage.destage import Equivalences, destage
from cycind.stage.staging import Lemmas, stage_proof, staged_defs
from cycind.trace.certificate import certify, render, validate_certificate
from cycind.trace.oracle import gtc_walk_search, random_skeleton
from cycind.trace.relations import basic_relations, closure, gtc_check

from conftest import CORPUS, CYCLIC, corpus_proof, nat_defs, record_criterion

SEED = 0


def verdict(n, ok, detail):
    record_criterion(n, ok, detail)
    assert ok, detail


@pytest.fixture(scope="module")
def sweep():
    t = time.perf_counter()
    groups = pr_sweep(max_u=4, max_k=2, seed=SEED, samples=10000, rand_u=6, rand_k=3)
    return groups, time.perf_counter() - t


@pytest.fixture(scope="module")
def compiled_corpus():
    out = {}
    for name in CYCLIC:
        t = time.perf_counter()
        c = compile_proof(corpus_proof(name), nat_defs())
        out[name] = (c, time.perf_counter() - t)
    return out


def test_criterion_1_pr_chain(sweep):
    groups, secs = sweep
    systems = sum(g["systems"] for g in groups)
    rand = sum(g["systems"] for g in groups if g["part"] == "random")
    dis = sum(g["disagreements"] for g in groups)
    lem = sum(g["lemma_failures"] for g in groups)
    covered = {(g["u"], g["k"]) for g in groups if g["part"] == "exhaustive"}
    ok = dis == 0 and lem == 0 and rand >= 10000 and covered >= {(u, k) for u in range(1, 5) for k in (1, 2)} \
        and secs < 300
    verdict(1, ok, f"{systems} systems ({rand} random), {dis} disagreements, {lem} lemma failures, {secs:.1f}s")


def test_criterion_2_kleene_brouwer():
    rec = kb_sweep(seed=SEED, samples=1000, max_nodes=25)
    ok = rec["trees"] >= 1000 and rec["max_nodes"] <= 25 and not (rec["cyclic"] or rec["reflexive"]
                                                                    or rec["disagreements"])
    verdict(2, ok, f"{rec['trees']} trees, {rec['cyclic']} cyclic, {rec['reflexive']} reflexive, "
                   f"{rec['disagreements']} oracle disagreements")


def test_criterion_3_et2_monotone(sweep):
    groups, _ = sweep
    ext = sum(g["extensions"] for g in groups)
    bad = sum(g["et_failures"] for g in groups)
    # recount the exhaustive part through the stand-alone enumeration
    direct = direct_bad = 0
    for _, _, s in all_systems(4, 2):
        for _, _, holds in et2_extensions(s):
            direct += 1
            direct_bad += not holds
    swept = sum(g["extensions"] for g in groups if g["part"] == "exhaustive")
    ok = ext > 0 and bad == 0 and direct_bad == 0 and direct == swept
    verdict(3, ok, f"{ext} extensions in the sweep, {bad} failures; exhaustive recount {direct} "
                   f"(sweep {swept}), {direct_bad} failures")


def test_criterion_4_gtc_against_walks():
    t = time.perf_counter()
    cases = [basic_relations(corpus_proof(n), nat_defs()) for n in CYCLIC]
    rng = random.Random(SEED)
    cases += [random_skeleton(rng, 6, 4) for _ in range(500)]
    dis = 0
    for basics in cases:
        cl = closure(basics)
        if (gtc_check(cl) is None) != gtc_walk_search(basics, 2 * len(cl.relations)):
            dis += 1
    secs = time.perf_counter() - t
    verdict(4, dis == 0 and secs < 120, f"{len(cases)} graphs ({len(CYCLIC)} corpus), {dis} disagreements, "
                                        f"{secs:.1f}s")


def test_criterion_5_compilation(compiled_corpus):
    base = base_signature(nat_defs())
    problems = []
    for name, (c, secs) in compiled_corpus.items():
        g = corpus_proof(name)
        if check_proof(c.proof, base, "ljid"):
            problems.append(f"{name}: output does not check")
        if c.proof.conclusion != g.conclusion:
            problems.append(f"{name}: endsequent changed")
        if g.buds:
            if c.certificate != render(certify(g, nat_defs())):
                problems.append(f"{name}: certificate differs")
            validate_certificate(c.certificate, c.cid)
        if secs >= 30:
            problems.append(f"{name}: {secs:.1f}s")
    genuine = [n for n in CYCLIC if corpus_proof(n).buds]
    two = [n for n in genuine if len(corpus_proof(n).companions) >= 2]
    case_n = "even-or-odd" in genuine
    slowest = max(s for _, s in compiled_corpus.values())
    ok = not problems and len(genuine) >= 3 and two and case_n
    verdict(5, ok, f"{len(compiled_corpus)} proofs ({len(genuine)} with buds, two companions: {','.join(two)}), "
                   f"slowest {slowest:.1f}s" + ("; " + "; ".join(problems) if problems else ""))


def test_criterion_6_decrease(compiled_corpus):
    paths = [(n, a, b, ok) for n, (c, _) in compiled_corpus.items() for a, b, ok in c.entailments]
    expected = sum(len(corpus_proof(n).buds) for n in CYCLIC)
    bad = [p for p in paths if not p[3]]
    verdict(6, not bad and len(paths) == expected, f"{len(paths)} companion-to-bud paths, {len(bad)} not entailed")


def test_criterion_7_round_trips(compiled_corpus):
    defs = nat_defs()
    base = base_signature(defs)
    sd = staged_defs(defs)
    problems = []
    for name, (c, _) in compiled_corpus.items():
        g = corpus_proof(name)
        e = embed_proof(c.proof, c.defs)
        if e.conclusion != g.conclusion or check_proof(e, c.defs, "cyclic") \
                or gtc_check(closure(basic_relations(e, c.defs))) is not None:
            problems.append(f"{name}: embed of compiled")
        fresh = fresh_supply(g)
        lem = Lemmas(sd, fresh)
        sp = stage_proof(g, defs, fresh=fresh, sd=sd, lemmas=lem)
        d = to_graph(destage(sp.proof, g.conclusion, sp.vec, Equivalences(sd, lem, fresh)))
        back = embed_proof(d, sd, fresh)
        if d.conclusion != g.conclusion or check_proof(back, sd, "cyclic") \
                or gtc_check(closure(basic_relations(back, sd))) is not None:
            problems.append(f"{name}: destage of staged")
        low = lower(c.staged, staged_defs(base), base)
        if low.conclusion != g.conclusion or check_proof(low, base, "ljid"):
            problems.append(f"{name}: lowered output")
    verdict(7, not problems, f"{len(compiled_corpus)} proofs x 3 round trips" +
            ("; " + "; ".join(problems) if problems else ", all preserved"))


def _cli_outputs(tmp, tag):
    cli = [sys.executable, "-m", "cycind.cli", "--defs", str(CORPUS / "nat.defs"), "--seed", "3", "--quiet"]
    files = []
    for name in ("even-or-odd", "two-loops"):
        out = tmp / f"{tag}-{name}.lp"
        rep = tmp / f"{tag}-{name}.jsonl"
        subprocess.run(cli + ["--report", str(rep), "compile", str(CORPUS / f"{name}.cp"), "-o", str(out)],
                       check=True)
        files += [out, tmp / f"{tag}-{name}.lp.cert", rep, rep.with_suffix(".png")]
    rep = tmp / f"{tag}-sweep.jsonl"
    subprocess.run(cli + ["--report", str(rep), "lab", "sweep", "--max-u", "3", "--samples", "200"], check=True)
    files += [rep, rep.with_suffix(".png")]
    return [p.read_bytes() for p in files]


def test_criterion_8_reproducible(tmp_path, monkeypatch):
    runs = []
    for hashseed in ("11", "12"):
        monkeypatch.setenv("PYTHONHASHSEED", hashseed)
        runs.append(_cli_outputs(tmp_path, f"run{hashseed}"))
    same = sum(a == b for a, b in zip(*runs))
    verdict(8, same == len(runs[0]), f"{same}/{len(runs[0])} output files byte-identical across two processes")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
