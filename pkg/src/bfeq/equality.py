"""Representative mappings: each constant maps to the minimum of its class."""

from __future__ import annotations

import bisect
import itertools
from typing import Callable, Iterable, Iterator

from .core import Atom, Rule, Triple, Var
from .core import Program


class RepMap:
    """A flat representative array over dense constant ids.

    Constants never touched map to themselves. ``classes`` holds the sorted
    member list of every class with more than one member, keyed by its
    representative; singleton classes are implicit.
    """

    __slots__ = ("rep", "classes")

    def __init__(self) -> None:
        self.rep: list[int] = []
        self.classes: dict[int, list[int]] = {}

    def copy(self) -> RepMap:
        out = RepMap()
        out.rep = list(self.rep)
        out.classes = {c: list(m) for c, m in self.classes.items()}
        return out

    def __call__(self, c: int) -> int:
        rep = self.rep
        return rep[c] if c < len(rep) else c

    find = __call__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RepMap):
            return NotImplemented
        return self.classes == other.classes

    def is_identity(self) -> bool:
        return not self.classes

    def _grow(self, c: int) -> None:
        rep = self.rep
        if c >= len(rep):
            rep.extend(range(len(rep), c + 1))

    def class_of(self, c: int) -> list[int]:
        """Members represented by ``c``; empty when ``c`` is not a representative."""
        members = self.classes.get(c)
        if members is not None:
            return members
        return [c] if self(c) == c else []

    def class_size(self, c: int) -> int:
        members = self.classes.get(c)
        if members is not None:
            return len(members)
        return 1 if self(c) == c else 0

    def merge_into(self, d: int, c: int) -> None:
        """Make ``c`` the representative of everything ``d`` represented."""
        assert c < d, f"merge_into needs c < d, got c={c}, d={d}"
        assert self(c) == c and self(d) == d, "merge_into works on representatives"
        self._grow(d)
        moved = self.classes.pop(d, [d])
        for e in moved:
            self.rep[e] = c
        target = self.classes.get(c)
        if target is None:
            self.classes[c] = sorted([c, *moved])
        else:
            for e in moved:
                bisect.insort(target, e)

    def reassign(self, c: int, new_rep: Callable[[int], int]) -> None:
        """Split the class of representative ``c``: member ``d`` now maps to ``new_rep(d)``.

        ``new_rep`` must map each member to the minimum of its new class.
        """
        members = self.classes.pop(c, None)
        if members is None:
            return
        groups: dict[int, list[int]] = {}
        for d in members:
            r = new_rep(d)
            self.rep[d] = r
            groups.setdefault(r, []).append(d)
        for r, group in groups.items():
            assert group[0] == r, "reassign must keep classes min-represented"
            if len(group) > 1:
                self.classes[r] = group

    # normalisation ------------------------------------------------------

    def normalize_triple(self, fact: Triple) -> Triple:
        rep = self.rep
        n = len(rep)
        s, p, o = fact
        return (rep[s] if s < n else s, rep[p] if p < n else p, rep[o] if o < n else o)

    def normalize(self, alpha):
        """Replace every constant in a constant, atom, rule, program or substitution."""
        if isinstance(alpha, int):
            return self(alpha)
        if isinstance(alpha, Var):
            return alpha
        if isinstance(alpha, tuple):
            return tuple(t if isinstance(t, Var) else self(t) for t in alpha)
        if isinstance(alpha, Rule):
            return Rule(self.normalize(alpha.head), tuple(self.normalize(b) for b in alpha.body))
        if isinstance(alpha, Program):
            return Program(self.normalize(r) for r in alpha)
        if isinstance(alpha, dict):
            return {k: self(v) for k, v in alpha.items()}
        if isinstance(alpha, (set, frozenset, list)):
            return type(alpha)(self.normalize(a) for a in alpha)
        raise TypeError(f"cannot normalize {type(alpha).__name__}")

    def is_normal(self, fact: Atom) -> bool:
        return all(isinstance(t, Var) or self(t) == t for t in fact)

    def expand(self, fact: Triple) -> Iterator[Triple]:
        """Stream every triple whose normalization equals that of ``fact``."""
        s, p, o = self.normalize_triple(fact)
        return itertools.product(self.class_of(s), self.class_of(p), self.class_of(o))

    def expansion_size(self, fact: Triple) -> int:
        s, p, o = self.normalize_triple(fact)
        return self.class_size(s) * self.class_size(p) * self.class_size(o)

    def expand_all(self, facts: Iterable[Triple]) -> set[Triple]:
        out: set[Triple] = set()
        for f in facts:
            out.update(self.expand(f))
        return out

    def items(self) -> Iterator[tuple[int, int]]:
        """Non-trivial ``(member, representative)`` pairs in member order."""
        for c, r in enumerate(self.rep):
            if c != r:
                yield c, r

    def as_dict(self) -> dict[int, int]:
        return dict(self.items())

    def dump(self, decode: Callable[[int], str] = str) -> str:
        lines = sorted(f"{decode(m)} -> {decode(r)}" for m, r in self.items())
        return "".join(line + "\n" for line in lines)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> RepMap:
        """Build from ``(member, representative)`` pairs; representatives must be class minima."""
        out = cls()
        groups: dict[int, list[int]] = {}
        for m, r in pairs:
            if m == r:
                continue
            out._grow(max(m, r))
            out.rep[m] = r
            groups.setdefault(r, [r]).append(m)
        for r, members in groups.items():
            members.sort()
            if members[0] != r or out(r) != r:
                raise ValueError(f"{r} is not the minimum of its class")
            out.classes[r] = members
        return out

    def __repr__(self) -> str:
        return f"RepMap({self.as_dict()!r})"
