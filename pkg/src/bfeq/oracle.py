"""Brute-force reference semantics for tests.

Nothing here is indexed or incremental: every round re-derives everything
from scratch over plain Python sets. Only use on small inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from .core import SAMEAS_AXIOMS, Program, Rule, Triple, Var, with_sameas_axioms

_REPLACEMENT = {rule: i for i, rule in enumerate(SAMEAS_AXIOMS[:3])}


def _unify(atom, fact, sigma):
    out = dict(sigma)
    for t, c in zip(atom, fact):
        if isinstance(t, Var):
            if out.setdefault(t, c) != c:
                return None
        elif t != c:
            return None
    return out


def _instantiate(atom, sigma) -> Triple:
    return tuple(sigma[t] if isinstance(t, Var) else t for t in atom)


def substitutions(rule: Rule, facts: Iterable[Triple]) -> Iterator[dict]:
    """Every substitution mapping the body of ``rule`` into ``facts``."""
    facts = list(facts)

    def consts_ok(atom, fact):
        return all(isinstance(t, Var) or t == c for t, c in zip(atom, fact))

    candidates = [[f for f in facts if consts_ok(a, f)] for a in rule.body]

    def walk(i, sigma):
        if i == len(rule.body):
            yield sigma
            return
        for fact in candidates[i]:
            tau = _unify(rule.body[i], fact, sigma)
            if tau is not None:
                yield from walk(i + 1, tau)

    return walk(0, {})


def consequences(facts: set[Triple], program: Iterable[Rule]) -> set[Triple]:
    """One round of immediate consequences (heads only)."""
    out = set()
    for rule in program:
        for sigma in substitutions(rule, facts):
            out.add(_instantiate(rule.head, sigma))
    return out


def fixpoint_rounds(E: Iterable[Triple], program: Iterable[Rule],
                    allowed: Callable[[Triple], bool] | None = None) -> list[set[Triple]]:
    """Successive strata: round ``k`` holds the facts first derived at height ``k``."""
    rules = list(program)
    current = {f for f in E if allowed is None or allowed(f)}
    rounds = [set(current)]
    while True:
        new = consequences(current, rules) - current
        if allowed is not None:
            new = {f for f in new if allowed(f)}
        if not new:
            return rounds
        rounds.append(new)
        current |= new


def naive_fixpoint(E: Iterable[Triple], program: Iterable[Rule]) -> set[Triple]:
    out: set[Triple] = set()
    for layer in fixpoint_rounds(E, program):
        out |= layer
    return out


def naive_materialisation(E: Iterable[Triple], program: Program) -> set[Triple]:
    """``(program ∪ sameAs axioms)^∞(E)``."""
    return naive_fixpoint(E, with_sameas_axioms(program))


def restricted_fixpoint(base: Iterable[Triple], program: Iterable[Rule],
                        allowed: Callable[[Triple], bool]) -> set[Triple]:
    """Facts with a derivation tree from ``base`` in which every node satisfies ``allowed``."""
    out: set[Triple] = set()
    for layer in fixpoint_rounds(base, program, allowed):
        out |= layer
    return out


def heights(E: Iterable[Triple], program: Iterable[Rule]) -> dict[Triple, int]:
    return {f: h for h, layer in enumerate(fixpoint_rounds(E, program)) for f in layer}


def height_of(F: Triple, E: Iterable[Triple], program: Iterable[Rule]) -> int:
    h = heights(E, program).get(F)
    if h is None:
        raise ValueError(f"{F} is not derivable")
    return h


@dataclass
class DerivationTree:
    fact: Triple
    rule: Rule | None = None
    sigma: dict = field(default_factory=dict)
    children: list[DerivationTree] = field(default_factory=list)

    @property
    def height(self) -> int:
        return 1 + max(c.height for c in self.children) if self.children else 0

    def nodes(self) -> Iterator[DerivationTree]:
        yield self
        for c in self.children:
            yield from c.nodes()


def build_tree(F: Triple, E: Iterable[Triple], program: Iterable[Rule],
               height: dict[Triple, int] | None = None) -> DerivationTree:
    """A minimum-height derivation tree for ``F``; children strictly lower."""
    rules = list(program)
    h = height if height is not None else heights(E, rules)
    if F not in h:
        raise ValueError(f"{F} is not derivable")
    if h[F] == 0:
        return DerivationTree(F)
    lower = {f for f, k in h.items() if k < h[F]}
    for rule in rules:
        head = _unify(rule.head, F, {})
        if head is None:
            continue
        for sigma in substitutions(rule, lower):
            if _instantiate(rule.head, sigma) == F:
                kids = [build_tree(_instantiate(b, sigma), E, rules, h) for b in rule.body]
                return DerivationTree(F, rule, sigma, kids)
    raise AssertionError(f"no lower derivation for {F}")


def self_replacement(node: DerivationTree) -> bool:
    """True when a replacement-rule node swaps a constant for itself."""
    i = _REPLACEMENT.get(node.rule)
    if i is None:
        return False
    src, dst = node.rule.body[1][0], node.rule.body[1][2]
    return node.sigma[src] == node.sigma[dst]


def verify_tree(tree: DerivationTree, F: Triple, E: Iterable[Triple],
                program: Iterable[Rule]) -> list[str]:
    """Violations of the tree conditions (root, leaves, rule nodes and no self-replacement)."""
    base, rules = set(E), set(program)
    problems = []
    if tree.fact != F:
        problems.append(f"root is {tree.fact}, not {F}")
    for node in tree.nodes():
        if not node.children:
            if node.fact not in base:
                problems.append(f"leaf {node.fact} not explicit")
            continue
        if node.rule not in rules:
            problems.append(f"rule {node.rule} not in program")
            continue
        if _instantiate(node.rule.head, node.sigma) != node.fact:
            problems.append(f"head mismatch at {node.fact}")
        body = [_instantiate(b, node.sigma) for b in node.rule.body]
        if body != [c.fact for c in node.children]:
            problems.append(f"body mismatch at {node.fact}")
        if self_replacement(node):
            problems.append(f"self-replacement at {node.fact}")
    return problems
