"""Synthetic instances: bijective blocks, cliques, chains and small random programs.

Every generator is deterministic given its seed and returns an
:class:`Instance` whose dictionary assigns ids in the order constants first
appear, so the representative choices are reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .core import SAMEAS, Dictionary, Program, Rule, Triple, Var, eq
from .rules import format_program, parse_program
from .store import format_triples

GENERATORS = ("bijective", "clique", "chain")


@dataclass
class GenSpec:
    generator: str
    size: int = 1
    groups: int = 1
    density: float = 0.3
    extra: float = 1.0
    relation: str = ":sameHomeTown"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.generator not in GENERATORS:
            raise ValueError(f"unknown generator {self.generator!r}; pick one of {', '.join(GENERATORS)}")
        if self.size < 1 or self.groups < 1:
            raise ValueError("sizes must be at least 1")
        if self.generator == "clique" and self.groups > self.size:
            raise ValueError("more cliques than constants")
        if not 0.0 <= self.density <= 1.0 or not 0.0 <= self.extra <= 1.0:
            raise ValueError("probabilities must lie in [0, 1]")


@dataclass
class Instance:
    name: str
    dictionary: Dictionary
    program: Program
    facts: list[Triple]
    deletions: list[Triple] = field(default_factory=list)

    def facts_text(self) -> str:
        return format_triples(self.facts, self.dictionary, sort=False)

    def rules_text(self) -> str:
        return format_program(self.program, self.dictionary)


def _build(name: str, rules: str, triples: Sequence[tuple[str, str, str]]) -> Instance:
    d = Dictionary()
    facts = [tuple(d.intern(t) for t in spo) for spo in triples]
    program = parse_program(rules, d)
    return Instance(name, d, program, list(dict.fromkeys(facts)))


BIJECTIVE_RULES = """\
?y1 == ?y2 :- [?y1, :R, ?x], [?y2, :R, ?x] .
?y1 == ?y2 :- [?x, :R, ?y1], [?x, :R, ?y2] .
"""


def bijective(blocks: int, extra: float = 1.0, seed: int = 0) -> Instance:
    """Blocks ``aRb, cRd`` each bridged by ``aRd`` with probability ``extra``.

    Under the two-rule program a bridge merges ``a`` with ``c`` and ``b``
    with ``d``; one block with its bridge is the standard small example.
    """
    rng = random.Random(seed)
    triples = []
    for i in range(blocks):
        a, b, c, d = (f":{x}{i or ''}" for x in "abcd")
        triples += [(a, ":R", b), (c, ":R", d)]
        if rng.random() < extra:
            triples.append((a, ":R", d))
    return _build(f"bijective-{blocks}", BIJECTIVE_RULES, triples)


def clique(n: int, groups: int, density: float = 0.3, seed: int = 0,
           relation: str = ":sameHomeTown") -> Instance:
    """``n`` constants split into ``groups`` cliques of a symmetric, transitive relation.

    Each group is a directed cycle (a self-loop for a single constant) plus
    random chords; the closure is the full ``g x g`` square per group.
    """
    rng = random.Random(seed)
    names = [f":m{i}" for i in range(n)]
    rng.shuffle(names)
    triples = []
    for k in range(groups):
        members = names[k::groups]
        g = len(members)
        for i in range(g):
            triples.append((members[i], relation, members[(i + 1) % g]))
        for x in members:
            for y in members:
                if x != y and rng.random() < density:
                    triples.append((x, relation, y))
    if relation in ("owl:sameAs", "<http://www.w3.org/2002/07/owl#sameAs>"):
        rules = ""
    else:
        rules = (f"[?y, {relation}, ?x] :- [?x, {relation}, ?y] .\n"
                 f"[?x, {relation}, ?z] :- [?x, {relation}, ?y], [?y, {relation}, ?z] .\n")
    return _build(f"clique-{n}-{groups}", rules, triples)


def chain(n: int, seed: int = 0) -> Instance:
    """A path of ``n`` R-edges closed under transitivity."""
    triples = [(f":n{i}", ":R", f":n{i + 1}") for i in range(n)]
    rules = "[?x, :R, ?z] :- [?x, :R, ?y], [?y, :R, ?z] .\n"
    return _build(f"chain-{n}", rules, triples)


def generate(spec: GenSpec) -> Instance:
    if spec.generator == "bijective":
        return bijective(spec.size, spec.extra, spec.seed)
    if spec.generator == "clique":
        return clique(spec.size, spec.groups, spec.density, spec.seed, spec.relation)
    return chain(spec.size, spec.seed)


def deletion_sample(facts: Sequence[Triple], *, seed: int, fraction: float | None = None,
                    count: int | None = None) -> list[Triple]:
    """A random subset of ``facts``: the prefix of a seeded Fisher-Yates shuffle."""
    if (fraction is None) == (count is None):
        raise ValueError("give exactly one of fraction or count")
    n = len(facts)
    if fraction is not None:
        if not 0.0 < fraction <= 1.0:
            raise ValueError("fraction must lie in (0, 1]")
        count = max(1, round(fraction * n)) if n else 0
    count = min(count, n)
    rng = random.Random(seed)
    pool = list(facts)
    for i in range(count):
        j = rng.randrange(i, n)
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:count]


# small random instances for oracle checks ------------------------------------

_VARS = tuple(Var(v) for v in "xyzw")


def random_instance(rng: random.Random, *, max_facts: int = 20, max_rules: int = 4,
                    max_body: int = 3) -> Instance:
    """At most 8 constants besides ``owl:sameAs``; random deletion fraction in [0, 1]."""
    d = Dictionary()
    individuals = [d.intern(f":i{k}") for k in range(rng.randint(2, 5))]
    predicates = [d.intern(f":p{k}") for k in range(rng.randint(1, 3))]
    everything = individuals + predicates

    def pick_pred():
        return SAMEAS if rng.random() < 0.15 else rng.choice(predicates)

    def pick_node():
        return rng.choice(everything) if rng.random() < 0.05 else rng.choice(individuals)

    facts = list(dict.fromkeys(
        (pick_node(), pick_pred(), pick_node()) for _ in range(rng.randint(0, max_facts))
    ))

    rules = []
    for _ in range(rng.randint(0, max_rules)):
        body = []
        for _ in range(rng.randint(1, max_body)):
            s = rng.choice(_VARS[:3]) if rng.random() < 0.85 else rng.choice(individuals)
            o = rng.choice(_VARS) if rng.random() < 0.85 else rng.choice(individuals)
            p = pick_pred() if rng.random() < 0.93 else _VARS[3]
            body.append((s, p, o))
        bound = sorted({t for a in body for t in a if isinstance(t, Var)}, key=lambda v: v.name)
        pool = bound + individuals[:1]

        def term():
            return rng.choice(pool) if rng.random() < 0.9 else rng.choice(individuals)

        if rng.random() < 0.3:
            head = eq(term(), term())
        else:
            head = (term(), rng.choice(predicates), term())
        rules.append(Rule(head, tuple(body)))

    inst = Instance("random", d, Program(rules), facts)
    fraction = rng.random()
    inst.deletions = [f for f in facts if rng.random() < fraction]
    return inst
