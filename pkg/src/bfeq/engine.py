"""Initial materialisation, with equality axiomatised or handled by rewriting."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .core import SAMEAS, SAMEAS_AXIOMS, Atom, Program, Triple, Var, ground, triple_voc
from .equality import RepMap
from .forward import DerivationCounter, Saturator
from .rules import AnnotatedQuery, evaluate, match_body, subst_key
from .store import FactSet


@dataclass
class RStore:
    """An r-materialisation ``(pi, I)`` together with the explicit facts and rules."""

    pi: RepMap
    I: FactSet
    E: FactSet
    program: Program
    counter: DerivationCounter = field(default_factory=DerivationCounter)
    voc_counts: Counter = field(default_factory=Counter)
    # rule firings and merges, recorded only when audited
    firings: list | None = field(default=None, repr=False, compare=False)
    rewrites: list | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.voc_counts and len(self.E):
            self.voc_counts = explicit_voc_counts(self.E)

    def copy(self) -> RStore:
        return RStore(self.pi.copy(), self.I.copy(), self.E.copy(), self.program,
                      DerivationCounter(), Counter(self.voc_counts))

    def expand_all(self) -> set[Triple]:
        """The dataset this store represents."""
        return self.pi.expand_all(self.I)


@dataclass
class AxiomStore:
    """A materialisation computed with equality axiomatised."""

    J: FactSet
    E: FactSet
    program: Program
    counter: DerivationCounter = field(default_factory=DerivationCounter)

    def copy(self) -> AxiomStore:
        return AxiomStore(self.J.copy(), self.E.copy(), self.program)


def explicit_voc_counts(facts: Iterable[Triple]) -> Counter:
    counts: Counter = Counter()
    for f in facts:
        counts.update(triple_voc(f))
    return counts


def seminaive(
    facts: Iterable[Triple],
    program: Program,
    *,
    counter: DerivationCounter | None = None,
    firings: list | None = None,
) -> FactSet:
    """Least fixpoint of ``program`` over ``facts``; no rule instance fires twice."""
    out = FactSet(facts)
    processed = FactSet()
    cursor = out.cursor()
    while (fact := cursor.next()) is not None:
        processed.add(fact)
        delta = (fact,)
        for m in match_body(program, fact):
            head = m.rule.head
            for tau in evaluate(processed, m.query, delta, m.sigma):
                if counter is not None:
                    counter.seminaive += 1
                if firings is not None:
                    firings.append((m.rule, subst_key(tau)))
                out.add(ground(head, tau))
    return out


def materialise_axiomatised(
    E: Iterable[Triple],
    program: Program,
    *,
    counter: DerivationCounter | None = None,
    firings: list | None = None,
) -> FactSet:
    """``(program ∪ sameAs axioms)^∞(E)`` with ``owl:sameAs`` as an ordinary predicate."""
    return seminaive(E, program + SAMEAS_AXIOMS, counter=counter, firings=firings)


def axiom_store(E: Iterable[Triple], program: Program) -> AxiomStore:
    explicit = FactSet(E)
    counter = DerivationCounter()
    J = materialise_axiomatised(explicit, program, counter=counter)
    return AxiomStore(J, explicit, program, counter)


def rmaterialise(E: Iterable[Triple], program: Program, *, audit: bool = False) -> RStore:
    """The r-materialisation of ``E`` w.r.t. ``program``.

    Runs the same forward loop as incremental saturation with every fact
    admitted; the final ``gamma`` becomes ``pi`` and the up-to-date proved
    facts become ``I``.
    """
    explicit = FactSet(E)
    sat = Saturator(program, audit=audit)
    for fact in explicit:
        sat.P.add(fact)
    sat.run()
    rs = RStore(sat.gamma, FactSet(sat.proved()), explicit, program, sat.counter)
    if audit:
        rs.firings = sat.firings
        rs.rewrites = sat.rewrites
    return rs


def rewriting_of(U: Iterable[Triple]) -> tuple[RepMap, FactSet]:
    """The rewriting ``(pi, I)`` of a dataset by its equality facts.

    ``pi`` sends each constant to the minimum of its class, classes being
    the connected components of the equality facts in ``U``.
    """
    facts = list(U)
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(x, x) != root:
            parent[x], x = root, parent[x]
        return root

    for s, p, o in facts:
        if p == SAMEAS and s != o:
            a, b = find(s), find(o)
            if a != b:
                parent[max(a, b)] = min(a, b)
    pi = RepMap.from_pairs((c, find(c)) for c in list(parent))
    return pi, FactSet(dict.fromkeys(pi.normalize_triple(f) for f in facts))


def answer_pattern(rs: RStore, pattern: Atom) -> Iterator[dict]:
    """Answers of a single-atom query over the dataset that ``rs`` represents."""
    pi = rs.pi
    normal = tuple(t if isinstance(t, Var) else pi(t) for t in pattern)
    query = AnnotatedQuery.plain([normal])
    for tau in evaluate(rs.I, query):
        rep_fact = ground(normal, tau)
        choices = [
            pi.class_of(c) if isinstance(t, Var) else [t]
            for t, c in zip(pattern, rep_fact)
        ]
        for s in choices[0]:
            for p in choices[1]:
                for o in choices[2]:
                    answer: dict = {}
                    for t, c in zip(pattern, (s, p, o)):
                        if isinstance(t, Var) and answer.setdefault(t, c) != c:
                            break
                    else:
                        yield answer
