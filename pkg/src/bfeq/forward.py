"""Forward chaining with equality rewriting.

:class:`Saturator` owns the proved set ``P``, the set of rewritten-away
facts (``merged``), the processed set ``V`` and the mapping ``gamma``. Its
:meth:`Saturator.run` loop fires rules semi-naively over ``V \\ merged``;
an equality ``a ≈ b`` triggers :meth:`Saturator.rewrite`, which merges the
two classes and re-normalizes stale facts and rules. Initial
r-materialisation uses it as is; the incremental algorithm subclasses it to
gate :meth:`Saturator.prove` on the checked set.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterable

from .core import SAMEAS, Program, Rule, Triple, ground, triple_voc
from .equality import RepMap
from .rules import AnnotatedQuery, Difference, evaluate, match_body, subst_key
from .store import FactSet


@dataclass
class DerivationCounter:
    doubtful: int = 0
    backward: int = 0
    forward: int = 0
    seminaive: int = 0

    @property
    def total(self) -> int:
        return self.doubtful + self.backward + self.forward + self.seminaive

    def as_dict(self) -> dict[str, int]:
        return {**asdict(self), "total": self.total}


class Saturator:
    def __init__(
        self,
        rules: Iterable[Rule],
        *,
        gamma: RepMap | None = None,
        counter: DerivationCounter | None = None,
        audit: bool = False,
    ):
        self.gamma = gamma if gamma is not None else RepMap()
        self.rules: list[Rule] = list(dict.fromkeys(rules))
        self.program = Program(self.rules)
        self.counter = counter if counter is not None else DerivationCounter()
        self.P = FactSet()
        self.merged = FactSet(indexed=False)
        self.V = FactSet()
        self._p_cursor = self.P.cursor()
        # (site, rule, substitution) for every rule firing; sites are
        # "forward" (rule applied to a fresh fact) and "rewrite" (rule
        # re-applied after normalization)
        self.firings: list[tuple[str, Rule, tuple]] | None = [] if audit else None
        self.rewrites: list[tuple[int, int]] | None = [] if audit else None

    def prove(self, fact: Triple) -> None:
        self.counter.forward += 1
        self.P.add(fact)

    def proved(self) -> list[Triple]:
        """The up-to-date proved facts, ``P \\ merged``."""
        merged = self.merged
        return [f for f in self.P if f not in merged]

    def run(self) -> None:
        P, V, merged, gamma = self.P, self.V, self.merged, self.gamma
        view = Difference(V, merged)
        while (fact := self._p_cursor.next()) is not None:
            if fact in merged or not V.add(fact):
                continue
            g = gamma.normalize_triple(fact)
            if fact != g:
                merged.add(fact)
                P.add(g)
            elif g[1] == SAMEAS and g[0] != g[2]:
                self.rewrite(g[0], g[2])
            else:
                for c in triple_voc(g):
                    self.prove((c, SAMEAS, c))
                delta = (g,)
                for m in match_body(self.program, g):
                    head = m.rule.head
                    for tau in evaluate(view, m.query, delta, m.sigma):
                        if self.firings is not None:
                            self.firings.append(("forward", m.rule, subst_key(tau)))
                        self.prove(ground(head, tau))

    def rewrite(self, a: int, b: int) -> None:
        c, d = (a, b) if a < b else (b, a)
        if self.rewrites is not None:
            self.rewrites.append((a, b))
        gamma, P, merged = self.gamma, self.P, self.merged
        gamma.merge_into(d, c)
        for fact in P.mentioning(d):
            if fact not in merged:
                merged.add(fact)
                P.add(gamma.normalize_triple(fact))
        present = set(self.rules)
        view = Difference(self.V, merged)
        for i, rule in enumerate(self.rules):
            normal = gamma.normalize(rule)
            if normal == rule:
                continue
            present.discard(rule)
            if normal in present:
                # an identical rule is already in the program and has seen every fact
                self.rules[i] = None
                continue
            present.add(normal)
            self.rules[i] = normal
            for tau in evaluate(view, AnnotatedQuery.plain(normal.body)):
                if self.firings is not None:
                    self.firings.append(("rewrite", normal, subst_key(tau)))
                self.prove(ground(normal.head, tau))
        self.rules = [r for r in self.rules if r is not None]
        if self.rules != self.program.rules:
            self.program = Program(self.rules)
