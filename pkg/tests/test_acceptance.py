"""The seven acceptance criteria, one test each.

Run alone with ``pytest tests/test_acceptance.py``; the terminal summary
prints one PASS/FAIL line per criterion.
"""

import random
import time

from helpers import StepAudit, duplicates, generated_battery, random_battery

from bfeq.bench import STRATEGIES, compare
from bfeq.engine import materialise_axiomatised, rmaterialise
from bfeq.generators import clique, deletion_sample
from bfeq.incremental import bf_delete
from bfeq.oracle import naive_materialisation


def _report(number, ok, detail=""):
    print(f"\nACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())


def test_criterion_1_worked_example(ex):
    start = time.perf_counter()
    rs = rmaterialise(ex.E, ex.program)
    I0 = rs.I.as_set()
    pi0 = rs.pi.as_dict()
    bf_delete(rs, ex.deletions)
    elapsed = time.perf_counter() - start

    listed_I = ex.facts(":a :R :b .\n:a owl:sameAs :a .\n:R owl:sameAs :R .\n:b owl:sameAs :b .\n"
                        "owl:sameAs owl:sameAs owl:sameAs .\n")
    listed_I_new = listed_I | ex.facts(":c :R :d .\n:c owl:sameAs :c .\n:d owl:sameAs :d .\n")
    ok = (I0 == listed_I and pi0 == {ex.c: ex.a, ex.dd: ex.b}
          and rs.I == listed_I_new and rs.pi.is_identity() and elapsed < 1.0)
    _report(1, ok, f"|I|={len(I0)} |I'|={len(rs.I)} {elapsed * 1000:.1f} ms")
    assert I0 == listed_I
    assert pi0 == {ex.c: ex.a, ex.dd: ex.b}
    assert rs.I == listed_I_new
    assert rs.pi.is_identity()
    assert elapsed < 1.0


def test_criterion_2_oracle_equivalence():
    start = time.perf_counter()
    failures = []
    count = 0
    for inst in random_battery(1000):
        count += 1
        gone = set(inst.deletions)
        rest = [f for f in inst.facts if f not in gone]
        rs = rmaterialise(inst.facts, inst.program)
        bf_delete(rs, inst.deletions)
        ref = rmaterialise(rest, inst.program)
        if rs.pi != ref.pi or rs.I != ref.I:
            failures.append((count, "differs from rematerialisation"))
        if rs.expand_all() != naive_materialisation(rest, inst.program):
            failures.append((count, "differs from naive fixpoint"))
    elapsed = time.perf_counter() - start
    _report(2, not failures and elapsed < 300, f"{count} instances, {len(failures)} failures, {elapsed:.1f} s")
    assert count >= 1000
    assert not failures
    assert elapsed < 300


def test_criterion_3_non_repetition():
    instances = list(random_battery(1000)) + generated_battery()
    bad = []
    for inst in instances:
        rs = rmaterialise(inst.facts, inst.program)
        report = bf_delete(rs, inst.deletions, audit=True)
        forward = [(r, k) for site, r, k in report.firings if site in ("forward", "rewrite")]
        backward = [(r, k) for site, r, k in report.firings if site == "delete"]
        if duplicates(forward) or duplicates(backward):
            bad.append(inst.name)
    _report(3, not bad, f"{len(instances)} instances, {len(bad)} with repeated firings")
    assert not bad


def test_criterion_4_step_invariants():
    checked = 0
    failures = []
    for inst in random_battery(400, offset=5000):
        if not inst.deletions:
            continue
        audit = StepAudit(inst.facts, inst.deletions, inst.program)
        rs = rmaterialise(inst.facts, inst.program)
        bf_delete(rs, inst.deletions, observer=audit)
        assert audit.events["main_loop_done"] == 1
        failures += audit.failures
        checked += 1
        if checked == 150:
            break
    _report(4, not failures and checked >= 100, f"{checked} instances, {len(failures)} violations")
    assert checked >= 100
    assert not failures, failures[:5]


def test_criterion_5_strategy_agreement():
    instances = list(random_battery(300, offset=9000)) + generated_battery()
    disagree = [inst.name for inst in instances
                if not compare(inst.facts, inst.program, inst.deletions).agree]
    _report(5, not disagree, f"{len(instances)} instances x {len(STRATEGIES)} strategies")
    assert not disagree


def test_criterion_6_clique_derivations():
    start = time.perf_counter()
    inst = clique(500, 10, seed=0)
    base = rmaterialise(inst.facts, inst.program)

    few = deletion_sample(inst.facts, count=10, seed=0)
    gone = set(few)
    bfeq_few = bf_delete(base.copy(), few).counter.total
    remat_few = rmaterialise([f for f in inst.facts if f not in gone], inst.program).counter.total

    bfeq_all = bf_delete(base.copy(), inst.facts).counter.total
    remat_all = rmaterialise([], inst.program).counter.total
    elapsed = time.perf_counter() - start

    ok = bfeq_few < remat_few and remat_all <= bfeq_all and elapsed < 60
    _report(6, ok, f"|E-|=10: D {bfeq_few} vs {remat_few}; |E-|=|E|: D {bfeq_all} vs {remat_all}; {elapsed:.1f} s")
    assert bfeq_few < remat_few
    assert remat_all <= bfeq_all
    assert elapsed < 60


def test_criterion_7_monotonicity():
    rng = random.Random(77)
    violations = 0
    for inst in random_battery(100, offset=20000):
        subset = [f for f in inst.facts if rng.random() < 0.5]
        small = materialise_axiomatised(subset, inst.program).as_set()
        large = materialise_axiomatised(inst.facts, inst.program).as_set()
        violations += not small <= large
    _report(7, violations == 0, f"100 pairs, {violations} violations")
    assert violations == 0
