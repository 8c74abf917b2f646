"""Indexed fact sets with insertion-ordered cursors, plus N-Triples I/O."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Iterator, TextIO

from .core import Atom, Dictionary, ParseError, Substitution, TOKEN_RE, Triple, Var

_EMPTY: dict = {}


class FactSet:
    """A set of triples that remembers insertion order.

    Deleting a fact leaves a tombstone in the insertion sequence, so cursors
    stay valid; re-adding a deleted fact appends it again. With
    ``indexed=True`` the set also keeps lookups by every bound subset of
    positions.
    """

    __slots__ = ("_seq", "_pos", "indexed", "_idx")

    def __init__(self, facts: Iterable[Triple] = (), *, indexed: bool = True):
        self._seq: list[Triple | None] = []
        self._pos: dict[Triple, int] = {}
        self.indexed = indexed
        # keyed by (s, p, o) with None for unbound positions
        self._idx: dict[tuple, dict[Triple, None]] = {}
        for f in facts:
            self.add(f)

    def add(self, fact: Triple) -> bool:
        if fact in self._pos:
            return False
        self._pos[fact] = len(self._seq)
        self._seq.append(fact)
        if self.indexed:
            s, p, o = fact
            idx = self._idx
            for key in ((s, None, None), (None, p, None), (None, None, o),
                        (s, p, None), (s, None, o), (None, p, o)):
                bucket = idx.get(key)
                if bucket is None:
                    idx[key] = {fact: None}
                else:
                    bucket[fact] = None
        return True

    def delete(self, fact: Triple) -> bool:
        i = self._pos.pop(fact, None)
        if i is None:
            return False
        self._seq[i] = None
        if self.indexed:
            s, p, o = fact
            idx = self._idx
            for key in ((s, None, None), (None, p, None), (None, None, o),
                        (s, p, None), (s, None, o), (None, p, o)):
                bucket = idx[key]
                del bucket[fact]
                if not bucket:
                    del idx[key]
        return True

    def __contains__(self, fact: object) -> bool:
        return fact in self._pos

    def __len__(self) -> int:
        return len(self._pos)

    def __iter__(self) -> Iterator[Triple]:
        return iter(list(self._pos))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FactSet):
            return self._pos.keys() == other._pos.keys()
        if isinstance(other, (set, frozenset)):
            return self._pos.keys() == other
        return NotImplemented

    def __repr__(self) -> str:
        return f"FactSet({list(self._pos)!r})"

    def as_set(self) -> set[Triple]:
        return set(self._pos)

    def copy(self) -> FactSet:
        return FactSet(self._pos, indexed=self.indexed)

    def cursor(self, start: int = 0) -> Cursor:
        return Cursor(self, start)

    def end(self) -> int:
        """Current length of the insertion sequence (tombstones included)."""
        return len(self._seq)

    def lookup(self, s: int | None, p: int | None, o: int | None) -> Iterable[Triple]:
        """Facts agreeing with every bound (non-None) position."""
        if s is not None and p is not None and o is not None:
            f = (s, p, o)
            return (f,) if f in self._pos else ()
        if s is None and p is None and o is None:
            return list(self._pos)
        if not self.indexed:
            return [f for f in self._pos
                    if (s is None or f[0] == s) and (p is None or f[1] == p) and (o is None or f[2] == o)]
        return self._idx.get((s, p, o), _EMPTY)

    def mentioning(self, c: int) -> list[Triple]:
        """Facts with ``c`` in some position, in index order, without repeats."""
        found = dict.fromkeys(self.lookup(c, None, None))
        found.update(dict.fromkeys(self.lookup(None, c, None)))
        found.update(dict.fromkeys(self.lookup(None, None, c)))
        return list(found)


class Cursor:
    """Walks a FactSet's insertion sequence, seeing facts added meanwhile."""

    __slots__ = ("facts", "position")

    def __init__(self, facts: FactSet, position: int = 0):
        self.facts = facts
        self.position = position

    def next(self) -> Triple | None:
        seq = self.facts._seq
        while self.position < len(seq):
            f = seq[self.position]
            self.position += 1
            if f is not None:
                return f
        return None

    def __iter__(self) -> Iterator[Triple]:
        while (f := self.next()) is not None:
            yield f


def match_pattern(facts: FactSet, pattern: Atom, sigma: Substitution | None = None) -> Iterator[dict]:
    """Every extension of ``sigma`` grounding ``pattern`` to a member of ``facts``."""
    sigma = dict(sigma or {})
    key = [sigma.get(t) if isinstance(t, Var) else t for t in pattern]
    for fact in list(facts.lookup(*key)):
        tau = dict(sigma)
        for t, c in zip(pattern, fact):
            if isinstance(t, Var):
                bound = tau.setdefault(t, c)
                if bound != c:
                    break
            elif t != c:
                break
        else:
            yield tau


# N-Triples subset ---------------------------------------------------------

def tokenize_line(line: str, lineno: int | None = None) -> list[str]:
    tokens = []
    pos = 0
    n = len(line)
    while pos < n:
        if line[pos].isspace():
            pos += 1
            continue
        m = TOKEN_RE.match(line, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected input at column {pos + 1}: {line[pos:pos + 20]!r}", lineno)
        tokens.append(m.group())
        pos = m.end()
    return tokens


def parse_triple_line(line: str, dictionary: Dictionary, lineno: int | None = None) -> Triple | None:
    text = line.strip()
    if not text or text.startswith("#"):
        return None
    if not text.endswith("."):
        raise ParseError("fact must end with '.'", lineno)
    tokens = tokenize_line(text[:-1], lineno)
    if len(tokens) != 3:
        raise ParseError(f"expected 3 terms, found {len(tokens)}", lineno)
    s, p, o = (dictionary.intern(t) for t in tokens)
    return (s, p, o)


def read_triples(source: TextIO | str | Path, dictionary: Dictionary) -> FactSet:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            return read_triples(fh, dictionary)
    out = FactSet()
    for lineno, line in enumerate(source, 1):
        fact = parse_triple_line(line, dictionary, lineno)
        if fact is not None:
            out.add(fact)
    return out


def parse_triples(text: str, dictionary: Dictionary) -> FactSet:
    return read_triples(text.splitlines(), dictionary)


def format_triples(facts: Iterable[Triple], dictionary: Dictionary, *, sort: bool = True) -> str:
    lines = [dictionary.format_triple(f) for f in facts]
    if sort:
        lines.sort()
    return "".join(line + "\n" for line in lines)


def write_triples(path: str | Path, facts: Iterable[Triple], dictionary: Dictionary, *, sort: bool = True) -> None:
    Path(path).write_text(format_triples(facts, dictionary, sort=sort), encoding="utf-8")
