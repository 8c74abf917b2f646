"""Shared test machinery: instance batteries and an invariant-checking observer."""

import collections
import random

from bfeq.core import SAMEAS, triple_voc, with_sameas_axioms
from bfeq.engine import rewriting_of
from bfeq.generators import bijective, chain, clique, deletion_sample, random_instance
from bfeq.oracle import naive_materialisation, restricted_fixpoint


def random_battery(n, offset=0):
    for seed in range(offset, offset + n):
        yield random_instance(random.Random(seed))


def generated_battery():
    out = []
    for n, g, dens in ((200, 10, 0.3), (120, 6, 0.2), (40, 1, 0.1), (30, 30, 0.0), (60, 3, 0.5)):
        inst = clique(n, g, density=dens, seed=n + g)
        inst.deletions = deletion_sample(inst.facts, fraction=0.15, seed=g)
        out.append(inst)
    for k, extra in ((1, 1.0), (10, 0.5), (50, 0.7)):
        inst = bijective(k, extra, seed=k)
        inst.deletions = deletion_sample(inst.facts, fraction=0.4, seed=k)
        out.append(inst)
    sameas = clique(40, 4, density=0.2, seed=5, relation="owl:sameAs")
    sameas.deletions = deletion_sample(sameas.facts, fraction=0.3, seed=5)
    out.append(sameas)
    path = chain(25)
    path.deletions = deletion_sample(path.facts, count=3, seed=1)
    out.append(path)
    return out


def duplicates(log):
    return [k for k, n in collections.Counter(log).items() if n > 1]


class StepAudit:
    """Observer for ``bf_delete`` checking the loop invariants at each checkpoint.

    Needs the original explicit facts, the deletions and the program, from
    which it computes ``J`` and ``J'`` with the naive oracle.
    """

    def __init__(self, E, deletions, program):
        self.program = program
        self.full = with_sameas_axioms(program)
        gone = set(deletions)
        self.J = naive_materialisation(E, program)
        self.J_new = naive_materialisation([f for f in E if f not in gone], program)
        self.events = collections.Counter()
        self.failures = []

    def fail(self, event, what):
        self.failures.append(f"{event}: {what}")

    def __call__(self, event, algo):
        self.events[event] += 1
        if event == "saturated":
            self.check_saturate(algo)
        elif event in ("checked", "disproved", "iteration"):
            self.status_exact(event, algo)
            if event != "checked":
                self.disproved_sound(event, algo)
            if not set(algo.extracted()) <= algo.C.as_set():
                self.fail(event, "an extracted doubtful fact is not checked")
        elif event == "main_loop_done":
            self.status_exact(event, algo)
            self.disproved_sound(event, algo)
            if not algo.D.as_set() <= algo.C.as_set():
                self.fail(event, "D is not a subset of C")
            self.doubt_complete(algo)

    def check_saturate(self, algo):
        pi, C = algo.pi, algo.C
        K = {(d, SAMEAS, d) for f in algo.E for d in triple_voc(f)}
        L = restricted_fixpoint(K | algo.E.as_set(), self.full,
                                lambda f: pi.normalize_triple(f) in C)
        gamma_L, _ = rewriting_of(L)
        if gamma_L != algo.gamma:
            self.fail("saturated", f"gamma {algo.gamma} differs from the classes of L {gamma_L}")
        if set(algo.proved()) != {algo.gamma.normalize_triple(f) for f in L}:
            self.fail("saturated", "P minus merged differs from gamma(L)")

    def status_exact(self, event, algo):
        lhs = algo.gamma.expand_all(algo.proved())
        rhs = algo.pi.expand_all(algo.C) & self.J_new
        if lhs != rhs:
            self.fail(event, "proved facts differ from the surviving checked facts")

    def disproved_sound(self, event, algo):
        if algo.pi.expand_all(algo.S) & self.J_new:
            self.fail(event, "a disproved fact survives")

    def doubt_complete(self, algo):
        pi, D, I = algo.pi, algo.D, algo.I
        for f in self.J - self.J_new:
            if pi.normalize_triple(f) not in D:
                self.fail("main_loop_done", f"doubt missed {f}")
            s, p, o = f
            if p == SAMEAS and s != o:
                rep = pi(s)
                for g in I.mentioning(rep):
                    if not pi.expand_all([g]) <= self.J_new and g not in D:
                        self.fail("main_loop_done", f"doubt missed {g} mentioning {rep}")
