"""Rule parsing, annotated queries and their evaluation over fact sets.

Rule syntax, one rule per line::

    [?y1, owl:sameAs, ?y2] :- [?y1, :R, ?x], [?y2, :R, ?x] .
    ?x == ?y :- [?x, :sameHomeTown, ?y] .

Blank lines and lines starting with ``#`` are ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Container, Iterable, Iterator, NamedTuple, Sequence

from .core import (
    SAMEAS, TOKEN_RE, Atom, Dictionary, ParseError, Program, Rule, Substitution,
    Triple, Var,
)
from .store import FactSet


@dataclass(frozen=True)
class AnnotatedQuery:
    """A conjunction of atoms; atoms flagged ``neq`` must avoid the delta set."""

    atoms: tuple[Atom, ...]
    neq: tuple[bool, ...]

    @classmethod
    def plain(cls, atoms: Sequence[Atom]) -> AnnotatedQuery:
        return cls(tuple(atoms), (False,) * len(atoms))

    def __len__(self) -> int:
        return len(self.atoms)

    def __repr__(self) -> str:
        parts = [repr(a) + ("≠" if n else "") for a, n in zip(self.atoms, self.neq)]
        return " ∧ ".join(parts) or "⊤"


@dataclass(frozen=True)
class BodyMatch:
    rule: Rule
    query: AnnotatedQuery
    sigma: dict
    index: int  # position of the matched body atom, 0-based


class HeadMatch(NamedTuple):
    rule: Rule
    query: AnnotatedQuery
    sigma: dict


class Difference(NamedTuple):
    """The set ``base \\ minus`` evaluated lazily."""

    base: FactSet
    minus: Container[Triple]


def match_atom(atom: Atom, fact: Triple, sigma: Substitution | None = None) -> dict | None:
    """Most general extension of ``sigma`` mapping ``atom`` onto ``fact``."""
    out = dict(sigma) if sigma else {}
    for t, c in zip(atom, fact):
        if isinstance(t, Var):
            b = out.get(t)
            if b is None:
                out[t] = c
            elif b != c:
                return None
        elif t != c:
            return None
    return out


def seminaive_query(rule: Rule, i: int) -> AnnotatedQuery:
    """Body of ``rule`` without atom ``i``; atoms before ``i`` carry ≠."""
    body = rule.body
    atoms = body[:i] + body[i + 1:]
    return AnnotatedQuery(atoms, (True,) * i + (False,) * (len(body) - i - 1))


class _ProgramIndex:
    __slots__ = ("body", "body_any", "head", "head_any")

    def __init__(self, rules: Iterable[Rule]):
        self.body: dict[int, list] = {}
        self.body_any: list = []
        self.head: dict[int, list] = {}
        self.head_any: list = []
        for rule in rules:
            for i, atom in enumerate(rule.body):
                entry = (rule, i, atom, seminaive_query(rule, i))
                p = atom[1]
                (self.body_any if isinstance(p, Var) else self.body.setdefault(p, [])).append(entry)
            entry = (rule, rule.head, AnnotatedQuery.plain(rule.body))
            p = rule.head[1]
            (self.head_any if isinstance(p, Var) else self.head.setdefault(p, [])).append(entry)


def _index(program: Program) -> _ProgramIndex:
    idx = getattr(program, "_match_index", None)
    if idx is None or idx[0] != len(program.rules):
        idx = (len(program.rules), _ProgramIndex(program.rules))
        program._match_index = idx
    return idx[1]


def _ordered(candidates: list, wildcard: list, key) -> list:
    if not wildcard:
        return candidates
    # keep rule order, then body position, so match order is deterministic
    return sorted(candidates + wildcard, key=key)


def match_body(program: Program, fact: Triple) -> list[BodyMatch]:
    idx = _index(program)
    entries = idx.body.get(fact[1], [])
    if idx.body_any:
        order = {r: n for n, r in enumerate(program.rules)}
        entries = _ordered(entries, idx.body_any, lambda e: (order[e[0]], e[1]))
    out = []
    for rule, i, atom, query in entries:
        sigma = match_atom(atom, fact)
        if sigma is not None:
            out.append(BodyMatch(rule, query, sigma, i))
    return out


def match_head(program: Program, fact: Triple) -> list[HeadMatch]:
    idx = _index(program)
    entries = idx.head.get(fact[1], [])
    if idx.head_any:
        order = {r: n for n, r in enumerate(program.rules)}
        entries = _ordered(entries, idx.head_any, lambda e: order[e[0]])
    out = []
    for rule, head, query in entries:
        sigma = match_atom(head, fact)
        if sigma is not None:
            out.append(HeadMatch(rule, query, sigma))
    return out


def evaluate(
    source: FactSet | Difference,
    query: AnnotatedQuery,
    delta: Container[Triple] = (),
    sigma: Substitution | None = None,
) -> Iterator[dict]:
    """Each smallest ``tau ⊇ sigma`` grounding every atom of ``query`` in
    ``source``; atoms flagged ``neq`` must additionally land outside ``delta``.

    Atoms are joined left to right, each served by an index lookup on the
    positions already bound.
    """
    if isinstance(source, Difference):
        base, minus = source
    else:
        base, minus = source, None
    binding = dict(sigma) if sigma else {}
    if not query.atoms:
        yield binding
        return
    yield from _join(query.atoms, query.neq, 0, binding, base, minus, delta)


def _join(atoms, neq, i, binding, base, minus, delta):
    s, p, o = atoms[i]
    ks = binding.get(s) if type(s) is Var else s
    kp = binding.get(p) if type(p) is Var else p
    ko = binding.get(o) if type(o) is Var else o
    last = i + 1 == len(atoms)
    excl = neq[i]
    for fact in base.lookup(ks, kp, ko):
        if minus is not None and fact in minus:
            continue
        if excl and fact in delta:
            continue
        newly = []
        ok = True
        if ks is None:
            binding[s] = fact[0]
            newly.append(s)
        if kp is None:
            b = binding.get(p)
            if b is None:
                binding[p] = fact[1]
                newly.append(p)
            elif b != fact[1]:
                ok = False
        if ok and ko is None:
            b = binding.get(o)
            if b is None:
                binding[o] = fact[2]
                newly.append(o)
            elif b != fact[2]:
                ok = False
        if ok:
            if last:
                yield dict(binding)
            else:
                yield from _join(atoms, neq, i + 1, binding, base, minus, delta)
        for v in newly:
            del binding[v]


def subst_key(tau: Substitution) -> tuple:
    """Hashable, order-independent form of a substitution (for firing logs)."""
    return tuple(sorted(((v.name, c) for v, c in tau.items())))


# Parsing ------------------------------------------------------------------

_RULE_TOKEN = re.compile(
    r"\s*(?:(?P<imp>:-)|(?P<eq>==)|(?P<punct>[\[\],])|(?P<var>\?[A-Za-z_][\w-]*)"
    rf"|(?P<const>{TOKEN_RE.pattern})|(?P<dot>\.))"
)


def _tokenize_rule(line: str, lineno: int) -> list[tuple[str, str]]:
    out = []
    pos = 0
    text = line.rstrip()
    while pos < len(text):
        m = _RULE_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected input at column {pos + 1}: {text[pos:pos + 20]!r}", lineno)
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        pos = m.end()
    return out


class _RuleParser:
    def __init__(self, tokens, dictionary: Dictionary, lineno: int):
        self.tokens = tokens
        self.pos = 0
        self.dictionary = dictionary
        self.lineno = lineno

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, kind: str | None = None, value: str | None = None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind or "token"
            raise ParseError(f"expected {want!r}, found {tok[1]!r}", self.lineno)
        self.pos += 1
        return tok

    def term(self):
        kind, text = self.peek()
        if kind == "var":
            self.pos += 1
            return Var(text[1:])
        if kind == "const":
            self.pos += 1
            return self.dictionary.intern(text)
        raise ParseError(f"expected a term, found {text!r}", self.lineno)

    def atom(self) -> Atom:
        if self.peek() == ("punct", "["):
            self.pos += 1
            s = self.term()
            self.take("punct", ",")
            p = self.term()
            self.take("punct", ",")
            o = self.term()
            self.take("punct", "]")
            return (s, p, o)
        left = self.term()
        self.take("eq")
        return (left, SAMEAS, self.term())

    def rule(self) -> Rule:
        head = self.atom()
        self.take("imp")
        if self.peek()[0] == "dot":
            raise ParseError("rule body must contain at least one atom", self.lineno)
        body = [self.atom()]
        while self.peek() == ("punct", ","):
            self.pos += 1
            body.append(self.atom())
        self.take("dot")
        if self.pos != len(self.tokens):
            raise ParseError(f"trailing input {self.peek()[1]!r}", self.lineno)
        try:
            return Rule(head, tuple(body))
        except ParseError as exc:
            raise type(exc)(str(exc), self.lineno) from None


def parse_rule(text: str, dictionary: Dictionary, lineno: int = 1) -> Rule:
    return _RuleParser(_tokenize_rule(text, lineno), dictionary, lineno).rule()


def parse_program(text: str, dictionary: Dictionary) -> Program:
    rules = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        rules.append(parse_rule(stripped, dictionary, lineno))
    return Program(rules)


def format_program(program: Program, dictionary: Dictionary) -> str:
    return "".join(dictionary.format_rule(r) + "\n" for r in program)
