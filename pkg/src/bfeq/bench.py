"""Update strategies, snapshots and report emission for the command line.

Four strategies delete a set of explicit facts from a materialised store:

* ``bfeq``        incremental backward/forward chaining over ``(pi, I)``;
* ``bf-axiom``    the same idea over the axiomatised materialisation ``J``;
* ``remat-eq``    recompute ``(pi, I)`` from the remaining explicit facts;
* ``remat-axiom`` recompute ``J`` from the remaining explicit facts.

The derivation count ``D`` is the sum of all counter sites of a run.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .core import TOKEN_RE, Dictionary, ParseError, Program, Triple
from .engine import AxiomStore, RStore, axiom_store, rmaterialise
from .equality import RepMap
from .forward import DerivationCounter
from .incremental import UpdateReport, bf_delete, bf_delete_axiomatised
from .rules import format_program, parse_program
from .store import FactSet, format_triples, read_triples

log = logging.getLogger(__name__)

MODES = ("rewrite", "axiom")
STRATEGIES = {"bfeq": "rewrite", "remat-eq": "rewrite", "bf-axiom": "axiom", "remat-axiom": "axiom"}
CSV_HEADER = ("dataset", "strategy", "|E|", "|Π|", "|E⁻|", "|I|", "ΔI", "D", "T_ms")

Store = RStore | AxiomStore


class UsageError(ValueError):
    """Inconsistent command-line configuration."""


def check_strategy(strategy: str, mode: str) -> None:
    if strategy not in STRATEGIES:
        raise UsageError(f"unknown strategy {strategy!r}; pick one of {', '.join(STRATEGIES)}")
    if STRATEGIES[strategy] != mode:
        raise UsageError(f"strategy {strategy} needs a {STRATEGIES[strategy]}-mode snapshot, got {mode}")


def materialise(facts: Iterable[Triple], program: Program, mode: str) -> tuple[Store, float]:
    start = time.perf_counter()
    if mode == "rewrite":
        store: Store = rmaterialise(facts, program)
    elif mode == "axiom":
        store = axiom_store(facts, program)
    else:
        raise UsageError(f"unknown mode {mode!r}")
    return store, time.perf_counter() - start


def store_facts(store: Store) -> FactSet:
    return store.I if isinstance(store, RStore) else store.J


def expanded(store: Store) -> set[Triple]:
    """The full materialisation a store stands for."""
    return store.expand_all() if isinstance(store, RStore) else store.J.as_set()


def _remat_eq(rs: RStore, deletions: Sequence[Triple]) -> UpdateReport:
    start = time.perf_counter()
    before = rs.I.as_set()
    deleted = sum(rs.E.delete(f) for f in deletions)
    fresh = rmaterialise(rs.E, rs.program)
    rs.pi, rs.I, rs.voc_counts = fresh.pi, fresh.I, fresh.voc_counts
    after = rs.I.as_set()
    return UpdateReport("remat-eq", len(deletions), deleted, len(before), len(after),
                        len(after - before), len(before - after), fresh.counter,
                        time.perf_counter() - start)


def _remat_axiom(store: AxiomStore, deletions: Sequence[Triple]) -> UpdateReport:
    start = time.perf_counter()
    before = store.J.as_set()
    deleted = sum(store.E.delete(f) for f in deletions)
    fresh = axiom_store(store.E, store.program)
    store.J = fresh.J
    after = store.J.as_set()
    return UpdateReport("remat-axiom", len(deletions), deleted, len(before), len(after),
                        len(after - before), len(before - after), fresh.counter,
                        time.perf_counter() - start)


def run_update(store: Store, strategy: str, deletions: Sequence[Triple], *,
               bookkeeping: bool = False) -> UpdateReport:
    """Apply one strategy in place."""
    mode = "rewrite" if isinstance(store, RStore) else "axiom"
    check_strategy(strategy, mode)
    deletions = list(deletions)
    if strategy == "bfeq":
        report = bf_delete(store, deletions, bookkeeping=bookkeeping)
    elif strategy == "bf-axiom":
        report = bf_delete_axiomatised(store, deletions)
    elif strategy == "remat-eq":
        report = _remat_eq(store, deletions)
    else:
        report = _remat_axiom(store, deletions)
    log.info("%s: |E-|=%d D=%d %.1f ms", strategy, len(deletions), report.counter.total,
             report.seconds * 1000)
    return report


@dataclass
class Comparison:
    reports: dict[str, UpdateReport]
    stores: dict[str, Store]
    agree: bool


def compare(facts: Sequence[Triple], program: Program, deletions: Sequence[Triple], *,
            strategies: Sequence[str] = tuple(STRATEGIES), bookkeeping: bool = False,
            workers: int = 1) -> Comparison:
    """Run each strategy on its own freshly materialised store and compare the results."""

    def one(strategy: str) -> tuple[str, UpdateReport, Store]:
        store, _ = materialise(facts, program, STRATEGIES[strategy])
        return strategy, run_update(store, strategy, deletions, bookkeeping=bookkeeping), store

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, strategies))
    else:
        results = [one(s) for s in strategies]
    reports = {s: r for s, r, _ in results}
    stores = {s: st for s, _, st in results}
    views = [expanded(st) for st in stores.values()]
    agree = all(v == views[0] for v in views[1:])
    return Comparison(reports, stores, agree)


# reports ---------------------------------------------------------------------

def csv_row(dataset: str, report: UpdateReport, explicit: int, rules: int) -> dict:
    return {
        "dataset": dataset,
        "strategy": report.strategy,
        "|E|": explicit,
        "|Π|": rules,
        "|E⁻|": report.requested,
        "|I|": report.size_after,
        "ΔI": report.delta,
        "D": report.counter.total,
        "T_ms": f"{report.seconds * 1000:.3f}",
    }


def write_csv(path: str | Path | None, rows: Sequence[dict], *, append: bool = False) -> str:
    """Write rows (with the header unless appending to a non-empty file); returns the text."""
    buf = io.StringIO()
    target = Path(path) if path else None
    header = not (append and target is not None and target.exists() and target.stat().st_size)
    writer = csv.DictWriter(buf, fieldnames=CSV_HEADER, lineterminator="\n")
    if header:
        writer.writeheader()
    writer.writerows(rows)
    text = buf.getvalue()
    if target is not None:
        with open(target, "a" if append else "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def stats(store: Store, seconds: float) -> dict:
    counter: DerivationCounter = store.counter
    if isinstance(store, RStore):
        size = {"|I|": len(store.I), "classes": len(store.pi.classes)}
    else:
        size = {"|J|": len(store.J)}
    return {
        "mode": "rewrite" if isinstance(store, RStore) else "axiom",
        "|E|": len(store.E),
        "|Π|": len(store.program),
        **size,
        "D": counter.total,
        "derivations": counter.as_dict(),
        "T_ms": round(seconds * 1000, 3),
    }


# snapshots ------------------------------------------------------------------

def save_snapshot(directory: str | Path, dictionary: Dictionary, store: Store, *,
                  dataset: str = "") -> None:
    """Persist a store as plain text: dictionary, explicit facts, rules, stored facts."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    mode = "rewrite" if isinstance(store, RStore) else "axiom"
    (out / "dictionary.txt").write_text("".join(f + "\n" for f in dictionary), encoding="utf-8")
    (out / "explicit.nt").write_text(format_triples(store.E, dictionary, sort=False), encoding="utf-8")
    (out / "rules.dlog").write_text(format_program(store.program, dictionary), encoding="utf-8")
    (out / "store.nt").write_text(format_triples(store_facts(store), dictionary), encoding="utf-8")
    if isinstance(store, RStore):
        (out / "repmap.txt").write_text(store.pi.dump(dictionary.decode), encoding="utf-8")
    meta = {"mode": mode, "dataset": dataset or out.name}
    (out / "meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")


def _parse_repmap(text: str, dictionary: Dictionary) -> RepMap:
    pairs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        m = TOKEN_RE.match(line)
        rest = line[m.end():] if m else ""
        if not m or not rest.startswith(" -> "):
            raise ParseError("expected 'member -> representative'", lineno)
        target = rest[4:].strip()
        if not TOKEN_RE.fullmatch(target):
            raise ParseError(f"malformed representative {target!r}", lineno)
        pairs.append((dictionary.intern(m.group()), dictionary.intern(target)))
    return RepMap.from_pairs(pairs)


def load_snapshot(directory: str | Path) -> tuple[Dictionary, Store, dict]:
    src = Path(directory)
    meta = json.loads((src / "meta.json").read_text(encoding="utf-8"))
    lines = (src / "dictionary.txt").read_text(encoding="utf-8").splitlines()
    dictionary = Dictionary.from_lexical(lines)
    E = read_triples(src / "explicit.nt", dictionary)
    program = parse_program((src / "rules.dlog").read_text(encoding="utf-8"), dictionary)
    facts = read_triples(src / "store.nt", dictionary)
    if meta["mode"] == "rewrite":
        pi = _parse_repmap((src / "repmap.txt").read_text(encoding="utf-8"), dictionary)
        store: Store = RStore(pi, facts, E, program)
    elif meta["mode"] == "axiom":
        store = AxiomStore(facts, E, program)
    else:
        raise ParseError(f"unknown snapshot mode {meta['mode']!r}")
    return dictionary, store, meta
