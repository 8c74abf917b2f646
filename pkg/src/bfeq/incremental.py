"""Incremental deletion from a materialisation by backward/forward chaining.

:func:`bf_delete` updates an r-materialisation in place; it seeds a set of
doubtful facts with the deleted explicit facts, checks each doubtful fact
for provability (backward chaining to collect candidate proofs, forward
chaining restricted to checked facts to prove them), propagates doubt from
facts that lost support, and finally patches ``pi`` and ``I``.
:func:`bf_delete_axiomatised` is the same procedure for a materialisation
where ``owl:sameAs`` is an ordinary predicate governed by the congruence
axioms.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from .core import SAMEAS, SAMEAS_AXIOMS, Rule, Triple, ground, is_reflexive, triple_voc
from .engine import AxiomStore, RStore
from .equality import RepMap
from .forward import DerivationCounter, Saturator
from .rules import Difference, evaluate, match_body, match_head, subst_key
from .store import FactSet

Observer = Callable[[str, object], None]


@dataclass
class UpdateReport:
    strategy: str
    requested: int
    deleted_explicit: int
    size_before: int
    size_after: int
    added: int
    removed: int
    counter: DerivationCounter
    seconds: float
    peak: dict[str, int] = field(default_factory=dict)
    # audit trail, filled only when requested
    firings: list = field(default_factory=list, repr=False)
    rewrites: list = field(default_factory=list, repr=False)

    @property
    def delta(self) -> int:
        return self.size_after - self.size_before

    def as_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "|E⁻|": self.requested,
            "deleted_explicit": self.deleted_explicit,
            "|I|_before": self.size_before,
            "|I|_after": self.size_after,
            "ΔI": self.delta,
            "added": self.added,
            "removed": self.removed,
            "derivations": self.counter.as_dict(),
            "T_ms": round(self.seconds * 1000, 3),
            "peak": dict(self.peak),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.as_dict(), ensure_ascii=False, **kwargs)


def _drive(root: Iterator[Triple], steps: Callable[[Triple], Iterator[Triple]]) -> None:
    # depth-first over nested provability checks without Python recursion
    stack = [root]
    while stack:
        try:
            child = next(stack[-1])
        except StopIteration:
            stack.pop()
            continue
        stack.append(steps(child))


class BFEquality(Saturator):
    """State and procedures of one incremental deletion run over an RStore.

    Sets follow the usual naming: ``D`` doubtful facts, ``O`` processed
    doubtful facts, ``C`` checked facts, ``P``/``merged``/``V`` from
    :class:`Saturator`, ``Y`` delayed facts and ``S`` disproved facts.
    """

    def __init__(self, rs: RStore, *, bookkeeping: bool = False,
                 observer: Observer | None = None, audit: bool = False):
        super().__init__(rs.program, counter=DerivationCounter(), audit=audit)
        self.rs = rs
        self.pi: RepMap = rs.pi
        self.I: FactSet = rs.I
        self.E: FactSet = rs.E
        self.pi_program = rs.pi.normalize(rs.program)
        self.D = FactSet(indexed=False)
        self.O = FactSet(indexed=False)
        self.C = FactSet(indexed=False)
        self.Y = FactSet(indexed=False)
        self.S = FactSet(indexed=False)
        self._delayed: dict[Triple, list[Triple]] = {}
        self._d_cursor = self.D.cursor()
        self._c_cursor = self.C.cursor()
        self._c_scan = self.C.cursor()
        self.bookkeeping = bookkeeping
        self._explicit_by_rep: dict[Triple, list[Triple]] | None = None
        self.observer = observer
        self.deletion_firings: list | None = [] if audit else None

    def _notify(self, event: str) -> None:
        if self.observer is not None:
            self.observer(event, self)

    # auxiliary predicates ------------------------------------------------

    def all_proved(self, fact: Triple) -> bool:
        if fact in self.S:
            return False
        P, merged, norm = self.P, self.merged, self.gamma.normalize_triple
        for g in self.pi.expand(fact):
            h = norm(g)
            if h not in P or h in merged:
                return False
        return True

    def all_disproved(self, fact: Triple) -> bool:
        P, merged, norm = self.P, self.merged, self.gamma.normalize_triple
        for g in self.pi.expand(fact):
            h = norm(g)
            if h in P and h not in merged:
                return False
        return True

    # forward chaining ----------------------------------------------------

    def prove(self, fact: Triple) -> None:
        self.counter.forward += 1
        rep = self.pi.normalize_triple(fact)
        if rep in self.C:
            self.P.add(fact)
        elif self.Y.add(fact):
            self._delayed.setdefault(rep, []).append(fact)

    def _explicit_in(self, fact: Triple) -> Iterable[Triple]:
        E = self.E
        if self.bookkeeping:
            if self._explicit_by_rep is None:
                index: dict[Triple, list[Triple]] = {}
                norm = self.pi.normalize_triple
                for g in E:
                    index.setdefault(norm(g), []).append(g)
                self._explicit_by_rep = index
            return [g for g in self._explicit_by_rep.get(fact, ()) if g in E]
        return [g for g in self.pi.expand(fact) if g in E]

    def saturate(self) -> None:
        P, gamma, pi = self.P, self.gamma, self.pi
        voc_counts = self.rs.voc_counts
        while (fact := self._c_cursor.next()) is not None:
            if is_reflexive(fact):
                for d in pi.class_of(fact[0]):
                    if voc_counts.get(d):
                        g = gamma(d)
                        P.add((g, SAMEAS, g))
            for g in self._explicit_in(fact):
                P.add(gamma.normalize_triple(g))
            for g in self._delayed.get(fact, ()):
                P.add(gamma.normalize_triple(g))
        self.run()

    # backward chaining ---------------------------------------------------

    def _check_steps(self, fact: Triple) -> Iterator[Triple]:
        """Body of the provability check; yields each fact to check recursively."""
        if not self.C.add(fact):
            return
        self.saturate()
        self._notify("saturated")
        if self.all_proved(fact):
            return
        counter, S, pi = self.counter, self.S, self.pi
        if is_reflexive(fact):
            for g in self.I.mentioning(fact[0]):
                if g in S:
                    continue
                counter.backward += 1
                yield g
                if self.all_proved(fact):
                    return
        for c in triple_voc(fact):
            cc = (c, SAMEAS, c)
            if cc not in S and pi.class_size(c) > 1:
                counter.backward += 1
                yield cc
                if self.all_proved(fact):
                    return
        view = Difference(self.I, S)
        for m in match_head(self.pi_program, fact):
            body = m.rule.body
            for tau in evaluate(view, m.query, (), m.sigma):
                for atom in body:
                    counter.backward += 1
                    yield ground(atom, tau)
                    if self.all_proved(fact):
                        return

    def check_provability(self, fact: Triple) -> None:
        _drive(self._check_steps(fact), self._check_steps)

    # main procedure ------------------------------------------------------

    def delete(self, deletions: Iterable[Triple]) -> int:
        deleted = 0
        E, D, norm, voc_counts = self.E, self.D, self.pi.normalize_triple, self.rs.voc_counts
        for fact in deletions:
            if E.delete(fact):
                deleted += 1
                voc_counts.subtract(triple_voc(fact))
                D.add(norm(fact))
        for c in [c for c, n in voc_counts.items() if n <= 0]:
            del voc_counts[c]

        I, O, S, counter, pi = self.I, self.O, self.S, self.counter, self.pi
        while (fact := self._d_cursor.next()) is not None:
            self.check_provability(fact)
            self._notify("checked")
            # a checked fact's disproved status is settled once checked
            while (g := self._c_scan.next()) is not None:
                if self.all_disproved(g):
                    S.add(g)
            self._notify("disproved")
            if not self.all_proved(fact):
                if is_reflexive(fact) and pi.class_size(fact[0]) > 1:
                    for g in I.mentioning(fact[0]):
                        if g not in O:
                            counter.doubtful += 1
                            D.add(g)
                for c in triple_voc(fact):
                    counter.doubtful += 1
                    D.add((c, SAMEAS, c))
                view = Difference(I, O)
                delta = (fact,)
                for m in match_body(self.pi_program, fact):
                    head = m.rule.head
                    for tau in evaluate(view, m.query, delta, m.sigma):
                        if self.deletion_firings is not None:
                            self.deletion_firings.append((m.rule, subst_key(tau)))
                        counter.doubtful += 1
                        D.add(ground(head, tau))
                O.add(fact)
            self._notify("iteration")
        self._notify("main_loop_done")
        return deleted

    def propagate_changes(self) -> tuple[int, int]:
        pi, gamma, I, P, merged = self.pi, self.gamma, self.I, self.P, self.merged
        for fact in self.C:
            if is_reflexive(fact):
                pi.reassign(fact[0], gamma)
        removed = added = 0
        for fact in self.D:
            if fact not in P or fact in merged:
                removed += I.delete(fact)
        for fact in P:
            if fact not in merged:
                added += I.add(pi.normalize_triple(fact))
        return added, removed

    def extracted(self) -> list[Triple]:
        """Doubtful facts the main loop has taken so far."""
        return [f for f in self.D._seq[:self._d_cursor.position] if f is not None]

    def sizes(self) -> dict[str, int]:
        return {name: len(getattr(self, name)) for name in ("D", "O", "C", "P", "merged", "Y", "V", "S")}


def bf_delete(
    rs: RStore,
    deletions: Iterable[Triple],
    *,
    bookkeeping: bool = False,
    observer: Observer | None = None,
    audit: bool = False,
) -> UpdateReport:
    """Remove ``deletions`` from ``rs.E`` and update ``(rs.pi, rs.I)`` in place.

    Facts absent from ``rs.E`` are ignored. With ``audit=True`` the report
    carries every rule firing: ``("forward", rule, tau)`` and
    ``("rewrite", rule, tau)`` from forward chaining and
    ``("delete", rule, tau)`` from doubt propagation.
    """
    deletions = list(deletions)
    start = time.perf_counter()
    size_before = len(rs.I)
    algo = BFEquality(rs, bookkeeping=bookkeeping, observer=observer, audit=audit)
    deleted = algo.delete(deletions)
    added, removed = algo.propagate_changes()
    seconds = time.perf_counter() - start
    report = UpdateReport("bfeq", len(deletions), deleted, size_before, len(rs.I),
                          added, removed, algo.counter, seconds, algo.sizes())
    if audit:
        report.firings = [*algo.firings, *(("delete", r, k) for r, k in algo.deletion_firings)]
        report.rewrites = list(algo.rewrites)
    return report


class BFAxiomatised:
    """Backward/forward deletion with ``owl:sameAs`` axiomatised; no rewriting."""

    def __init__(self, store: AxiomStore, *, observer: Observer | None = None, audit: bool = False):
        self.store = store
        self.J = store.J
        self.E = store.E
        self.program = store.program + SAMEAS_AXIOMS
        self.counter = DerivationCounter()
        self.D = FactSet(indexed=False)
        self.O = FactSet(indexed=False)
        self.C = FactSet(indexed=False)
        self.P = FactSet(indexed=False)
        self.Y = FactSet(indexed=False)
        self.V = FactSet()
        self.S = FactSet(indexed=False)
        self._d_cursor = self.D.cursor()
        self._c_cursor = self.C.cursor()
        self._c_scan = self.C.cursor()
        self._p_cursor = self.P.cursor()
        self.observer = observer
        self.firings: list | None = [] if audit else None

    def all_proved(self, fact: Triple) -> bool:
        return fact not in self.S and fact in self.P

    def prove(self, fact: Triple) -> None:
        self.counter.forward += 1
        if fact in self.C:
            self.P.add(fact)
        else:
            self.Y.add(fact)

    def saturate(self) -> None:
        E, Y, P, V = self.E, self.Y, self.P, self.V
        while (fact := self._c_cursor.next()) is not None:
            if fact in E or fact in Y:
                P.add(fact)
        while (fact := self._p_cursor.next()) is not None:
            if not V.add(fact):
                continue
            delta = (fact,)
            for m in match_body(self.program, fact):
                for tau in evaluate(V, m.query, delta, m.sigma):
                    if self.firings is not None:
                        self.firings.append(("forward", m.rule, subst_key(tau)))
                    self.prove(ground(m.rule.head, tau))

    def _check_steps(self, fact: Triple) -> Iterator[Triple]:
        if not self.C.add(fact):
            return
        self.saturate()
        if self.all_proved(fact):
            return
        view = Difference(self.J, self.S)
        for m in match_head(self.program, fact):
            for tau in evaluate(view, m.query, (), m.sigma):
                for atom in m.rule.body:
                    self.counter.backward += 1
                    yield ground(atom, tau)
                    if self.all_proved(fact):
                        return

    def delete(self, deletions: Iterable[Triple]) -> int:
        deleted = 0
        for fact in deletions:
            if self.E.delete(fact):
                deleted += 1
                self.D.add(fact)
        J, O, D, P, S = self.J, self.O, self.D, self.P, self.S
        while (fact := self._d_cursor.next()) is not None:
            _drive(self._check_steps(fact), self._check_steps)
            while (g := self._c_scan.next()) is not None:
                if g not in P:
                    S.add(g)
            if not self.all_proved(fact):
                view = Difference(J, O)
                delta = (fact,)
                for m in match_body(self.program, fact):
                    for tau in evaluate(view, m.query, delta, m.sigma):
                        if self.firings is not None:
                            self.firings.append(("delete", m.rule, subst_key(tau)))
                        self.counter.doubtful += 1
                        D.add(ground(m.rule.head, tau))
                O.add(fact)
            if self.observer is not None:
                self.observer("iteration", self)
        removed = 0
        for fact in D:
            if fact not in P:
                removed += J.delete(fact)
        return deleted, removed

    def sizes(self) -> dict[str, int]:
        return {name: len(getattr(self, name)) for name in ("D", "O", "C", "P", "Y", "V", "S")}


def bf_delete_axiomatised(
    store: AxiomStore,
    deletions: Iterable[Triple],
    *,
    observer: Observer | None = None,
    audit: bool = False,
) -> UpdateReport:
    """Remove ``deletions`` from ``store.E`` and update ``store.J`` in place."""
    deletions = list(deletions)
    start = time.perf_counter()
    size_before = len(store.J)
    algo = BFAxiomatised(store, observer=observer, audit=audit)
    deleted, removed = algo.delete(deletions)
    seconds = time.perf_counter() - start
    report = UpdateReport("bf-axiom", len(deletions), deleted, size_before, len(store.J),
                          0, removed, algo.counter, seconds, algo.sizes())
    if audit:
        report.firings = list(algo.firings)
    return report
