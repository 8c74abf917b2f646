"""Terms, triples, rules and the constant dictionary.

Constants are plain non-negative ints handed out by a :class:`Dictionary`;
``owl:sameAs`` is pre-registered as 0, which makes it the smallest constant
of the total order (the order is simply the integer order). Variables are
:class:`Var` instances. An atom is a 3-tuple of terms and a triple is an atom
made only of constants.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Tuple, Union

SAMEAS = 0
SAMEAS_CURIE = "owl:sameAs"
SAMEAS_IRI = "<http://www.w3.org/2002/07/owl#sameAs>"


class ParseError(ValueError):
    """Malformed token, rule or fact line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SafetyError(ParseError):
    """A head variable does not occur in the rule body."""


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return f"?{self.name}"


Term = Union[int, Var]
Atom = Tuple[Term, Term, Term]
Triple = Tuple[int, int, int]
Substitution = Mapping[Var, int]


_IRI = r"<[^<>\"{}|^`\\\s]*>"
_LITERAL = r'"(?:[^"\\\n]|\\.)*"(?:@[A-Za-z]+(?:-[A-Za-z0-9]+)*|\^\^(?:<[^<>\s]*>|[A-Za-z_][\w-]*:[\w-]*))?'
_CURIE = r"(?:[A-Za-z_][\w-]*)?:[\w-]*(?:\.[\w-]+)*"
TOKEN_RE = re.compile(f"{_IRI}|{_LITERAL}|{_CURIE}")


class Dictionary:
    """Bijection between lexical forms and dense constant ids.

    Ids are assigned in first-encounter order; ``owl:sameAs`` (in CURIE or
    full IRI form) is always 0.
    """

    def __init__(self) -> None:
        self._ids: dict[str, int] = {SAMEAS_CURIE: SAMEAS, SAMEAS_IRI: SAMEAS}
        self._lexical: list[str] = [SAMEAS_CURIE]
        self._lock = threading.Lock()

    def intern(self, lexical: str) -> int:
        code = self._ids.get(lexical)
        if code is not None:
            return code
        if not TOKEN_RE.fullmatch(lexical):
            raise ParseError(f"malformed constant {lexical!r}")
        with self._lock:
            code = self._ids.get(lexical)
            if code is None:
                code = len(self._lexical)
                self._lexical.append(lexical)
                self._ids[lexical] = code
        return code

    def lookup(self, lexical: str) -> int | None:
        """Id of an already interned constant, without interning."""
        return self._ids.get(lexical)

    def decode(self, code: int) -> str:
        return self._lexical[code]

    def __len__(self) -> int:
        return len(self._lexical)

    def __iter__(self) -> Iterator[str]:
        return iter(self._lexical)

    def format_term(self, term: Term) -> str:
        return repr(term) if isinstance(term, Var) else self._lexical[term]

    def format_triple(self, atom: Atom) -> str:
        return " ".join(self.format_term(t) for t in atom) + " ."

    def format_rule(self, rule: Rule) -> str:
        def atom(a: Atom) -> str:
            return "[" + ", ".join(self.format_term(t) for t in a) + "]"

        return f"{atom(rule.head)} :- {', '.join(atom(b) for b in rule.body)} ."

    @classmethod
    def from_lexical(cls, forms: Iterable[str]) -> Dictionary:
        """Rebuild a dictionary from forms listed in id order."""
        d = cls()
        for i, form in enumerate(forms):
            if i == 0:
                if form != SAMEAS_CURIE:
                    raise ParseError(f"dictionary must start with {SAMEAS_CURIE}")
                continue
            if d.intern(form) != i:
                raise ParseError(f"duplicate dictionary entry {form!r}")
        return d


def is_var(term: Term) -> bool:
    return isinstance(term, Var)


def eq(s: Term, t: Term) -> Atom:
    """The atom ``s ≈ t``."""
    return (s, SAMEAS, t)


def is_equality(fact: Atom) -> bool:
    return fact[1] == SAMEAS


def is_reflexive(fact: Triple) -> bool:
    """True for facts of the form ``c ≈ c``."""
    return fact[1] == SAMEAS and fact[0] == fact[2]


def atom_vars(atom: Atom) -> list[Var]:
    seen: list[Var] = []
    for t in atom:
        if isinstance(t, Var) and t not in seen:
            seen.append(t)
    return seen


@dataclass(frozen=True)
class Rule:
    head: Atom
    body: Tuple[Atom, ...]

    def __post_init__(self) -> None:
        if not self.body:
            raise ParseError("rule body must contain at least one atom")
        bound = {t for atom in self.body for t in atom if isinstance(t, Var)}
        for t in self.head:
            if isinstance(t, Var) and t not in bound:
                raise SafetyError(f"unsafe rule: head variable {t!r} does not occur in the body")

    def variables(self) -> list[Var]:
        out: list[Var] = []
        for atom in (self.head, *self.body):
            for v in atom_vars(atom):
                if v not in out:
                    out.append(v)
        return out

    def __repr__(self) -> str:
        body = " ∧ ".join(map(_fmt_atom, self.body))
        return f"{_fmt_atom(self.head)} ← {body}"


def _fmt_atom(atom: Atom) -> str:
    return "⟨" + ",".join(map(repr, atom)) + "⟩"


class Program:
    """An ordered, duplicate-free list of rules."""

    def __init__(self, rules: Iterable[Rule] = ()):
        self.rules: list[Rule] = list(dict.fromkeys(rules))

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Program) and self.rules == other.rules

    def __add__(self, other: Iterable[Rule]) -> Program:
        return Program([*self.rules, *other])

    def __repr__(self) -> str:
        return f"Program({self.rules!r})"


def apply(alpha, sigma: Substitution):
    """Apply a substitution to a term, atom, rule, program or set of these."""
    if isinstance(alpha, Var):
        return sigma.get(alpha, alpha)
    if isinstance(alpha, int):
        return alpha
    if isinstance(alpha, tuple):
        return tuple(apply(t, sigma) for t in alpha)
    if isinstance(alpha, Rule):
        return Rule(apply(alpha.head, sigma), tuple(apply(b, sigma) for b in alpha.body))
    if isinstance(alpha, Program):
        return Program(apply(r, sigma) for r in alpha)
    if isinstance(alpha, (set, frozenset)):
        return type(alpha)(apply(a, sigma) for a in alpha)
    if isinstance(alpha, list):
        return [apply(a, sigma) for a in alpha]
    raise TypeError(f"cannot apply a substitution to {type(alpha).__name__}")


def ground(atom: Atom, sigma: Substitution) -> Triple:
    s, p, o = atom
    return (
        sigma[s] if isinstance(s, Var) else s,
        sigma[p] if isinstance(p, Var) else p,
        sigma[o] if isinstance(o, Var) else o,
    )


def voc(alpha) -> set[int]:
    """All constants occurring in a term, atom, rule, program or collection."""
    if isinstance(alpha, Var):
        return set()
    if isinstance(alpha, int):
        return {alpha}
    if isinstance(alpha, tuple) and len(alpha) == 3 and not isinstance(alpha[0], (tuple, Rule)):
        return {t for t in alpha if not isinstance(t, Var)}
    if isinstance(alpha, Rule):
        return voc(alpha.head).union(*(voc(b) for b in alpha.body))
    out: set[int] = set()
    for item in alpha:
        out |= voc(item)
    return out


def triple_voc(fact: Triple) -> tuple[int, ...]:
    """Distinct constants of a triple in position order."""
    s, p, o = fact
    if s == p:
        return (s,) if p == o else (s, o)
    if o == s or o == p:
        return (s, p)
    return (s, p, o)


_X1, _X2, _X3 = Var("x1"), Var("x2"), Var("x3")
_X1P, _X2P, _X3P = Var("x1'"), Var("x2'"), Var("x3'")

SAMEAS_AXIOMS: tuple[Rule, ...] = (
    Rule((_X1P, _X2, _X3), ((_X1, _X2, _X3), eq(_X1, _X1P))),
    Rule((_X1, _X2P, _X3), ((_X1, _X2, _X3), eq(_X2, _X2P))),
    Rule((_X1, _X2, _X3P), ((_X1, _X2, _X3), eq(_X3, _X3P))),
    Rule(eq(_X1, _X1), ((_X1, _X2, _X3),)),
    Rule(eq(_X2, _X2), ((_X1, _X2, _X3),)),
    Rule(eq(_X3, _X3), ((_X1, _X2, _X3),)),
)
"""Rules axiomatising ``owl:sameAs`` as a congruence: three replacement
rules (one per position) followed by the three reflexivity rules."""


def with_sameas_axioms(program: Program) -> Program:
    return program + SAMEAS_AXIOMS
