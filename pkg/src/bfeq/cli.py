"""Command-line entry point: ``bfeq {materialise,update,generate,verify,compare}``.

Set ``BFEQ_LOG_LEVEL`` (e.g. ``INFO``) to see progress on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
from pathlib import Path

from . import bench
from .core import Dictionary, ParseError
from .engine import rewriting_of, rmaterialise
from .generators import GENERATORS, GenSpec, deletion_sample, generate, random_instance
from .incremental import bf_delete
from .oracle import naive_materialisation
from .rules import parse_program
from .store import read_triples

log = logging.getLogger("bfeq")


def _load_input(facts: str, rules: str):
    d = Dictionary()
    E = read_triples(facts, d)
    program = parse_program(Path(rules).read_text(encoding="utf-8"), d)
    return d, E, program


def _fractions(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None
    if not values or any(not 0.0 < v <= 1.0 for v in values):
        raise argparse.ArgumentTypeError("fractions must lie in (0, 1]")
    return values


def _fraction(text: str) -> float:
    values = _fractions(text)
    if len(values) != 1:
        raise argparse.ArgumentTypeError("give a single fraction (use --sweep for several)")
    return values[0]


def _add_deletion_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("facts to delete (one of)")
    g.add_argument("--delete", metavar="FILE", help="N-Triples file of facts to delete")
    g.add_argument("--fraction", type=_fraction, help="delete a random fraction of E (needs --seed)")
    g.add_argument("--count", type=int, help="delete this many random facts of E (needs --seed)")
    g.add_argument("--seed", type=int, help="seed for random deletion")


def _deletions(args, dictionary: Dictionary, E, fraction: float | None = None) -> list:
    fraction = fraction if fraction is not None else args.fraction
    chosen = [x for x in (args.delete, fraction, args.count) if x is not None]
    if len(chosen) > 1:
        raise bench.UsageError("give only one of --delete, --fraction, --count")
    if args.delete is not None:
        return list(read_triples(args.delete, dictionary))
    if fraction is None and args.count is None:
        return []
    if args.seed is None:
        raise bench.UsageError("random deletion needs --seed")
    if fraction is not None:
        return deletion_sample(list(E), fraction=fraction, seed=args.seed)
    return deletion_sample(list(E), count=args.count, seed=args.seed)


def _dataset_name(facts: str) -> str:
    path = Path(facts)
    # generated instances are <dir>/facts.nt; the directory names the dataset
    return path.resolve().parent.name if path.stem == "facts" else path.stem


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# verbs ------------------------------------------------------------------------

def cmd_materialise(args) -> int:
    d, E, program = _load_input(args.facts, args.rules)
    store, seconds = bench.materialise(E, program, args.mode)
    bench.save_snapshot(args.out, d, store, dataset=args.dataset or _dataset_name(args.facts))
    _emit(json.dumps(bench.stats(store, seconds), ensure_ascii=False, indent=2) + "\n", args.report)
    return 0


def cmd_update(args) -> int:
    d, store, meta = bench.load_snapshot(args.snapshot)
    bench.check_strategy(args.strategy, meta["mode"])
    dataset = args.dataset or meta.get("dataset", "")
    runs = []
    for fraction in args.sweep or [None]:
        if args.sweep:
            d, store, meta = bench.load_snapshot(args.snapshot)
        explicit = len(store.E)
        deletions = _deletions(args, d, store.E, fraction)
        report = bench.run_update(store, args.strategy, deletions, bookkeeping=args.bookkeeping)
        runs.append((report, bench.csv_row(dataset, report, explicit, len(store.program))))
    if not args.sweep and not args.no_save:
        bench.save_snapshot(args.out or args.snapshot, d, store, dataset=dataset)
    rows = [row for _, row in runs]
    if args.csv:
        bench.write_csv(args.csv, rows, append=args.append)
    payload = [r.as_dict() for r, _ in runs]
    _emit(json.dumps(payload if args.sweep else payload[0], ensure_ascii=False, indent=2) + "\n",
          args.report)
    if not args.report and not args.csv:
        sys.stdout.write(bench.write_csv(None, rows))
    return 0


def cmd_generate(args) -> int:
    spec = GenSpec(args.kind, size=args.size, groups=args.groups, density=args.density,
                   extra=args.extra, relation=args.relation, seed=args.seed)
    inst = generate(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "facts.nt").write_text(inst.facts_text(), encoding="utf-8")
    (out / "rules.dlog").write_text(inst.rules_text(), encoding="utf-8")
    print(f"{inst.name}: {len(inst.facts)} facts, {len(inst.program)} rules -> {out}")
    return 0


def _verify_one(E, program, deletions) -> list[str]:
    problems = []
    J = naive_materialisation(E, program)
    rs = rmaterialise(E, program)
    pi, I = rewriting_of(J)
    if rs.pi != pi or rs.I != I:
        problems.append("materialisation differs from the rewriting of the naive fixpoint")
    dropped = set(deletions)
    rest = [f for f in E if f not in dropped]
    bf_delete(rs, deletions)
    ref = rmaterialise(rest, program)
    if rs.pi != ref.pi or rs.I != ref.I:
        problems.append("incremental deletion differs from rematerialisation")
    if rs.expand_all() != naive_materialisation(rest, program):
        problems.append("updated store does not expand to the naive fixpoint")
    if not bench.compare(list(E), program, deletions).agree:
        problems.append("update strategies disagree")
    return problems


def cmd_verify(args) -> int:
    failures = 0
    if args.random:
        rng = random.Random(args.seed or 0)
        for k in range(args.random):
            inst = random_instance(rng)
            problems = _verify_one(inst.facts, inst.program, inst.deletions)
            for p in problems:
                print(f"instance {k}: {p}")
            failures += bool(problems)
        print(f"{args.random - failures}/{args.random} random instances verified")
        return 1 if failures else 0
    if not args.facts or not args.rules:
        raise bench.UsageError("verify needs --facts and --rules, or --random N")
    d, E, program = _load_input(args.facts, args.rules)
    if len(E) > args.max_facts:
        raise bench.UsageError(f"{len(E)} facts exceed --max-facts {args.max_facts}; the oracle is brute force")
    deletions = _deletions(args, d, E)
    problems = _verify_one(list(E), program, deletions)
    for p in problems:
        print(p)
    print("ok" if not problems else "FAILED")
    return 1 if problems else 0


def cmd_compare(args) -> int:
    d, E, program = _load_input(args.facts, args.rules)
    dataset = args.dataset or _dataset_name(args.facts)
    rows = []
    for fraction in args.sweep or [None]:
        deletions = _deletions(args, d, E, fraction)
        result = bench.compare(list(E), program, deletions, bookkeeping=args.bookkeeping,
                               workers=args.workers)
        if not result.agree:
            print("strategies disagree on the final store", file=sys.stderr)
            return 1
        rows += [bench.csv_row(dataset, r, len(E), len(program)) for r in result.reports.values()]
    text = bench.write_csv(args.csv, rows, append=args.append)
    if not args.csv:
        sys.stdout.write(text)
    return 0


# parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bfeq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("materialise", help="materialise facts under rules and save a snapshot")
    p.add_argument("--facts", required=True)
    p.add_argument("--rules", required=True)
    p.add_argument("--mode", choices=bench.MODES, default="rewrite")
    p.add_argument("--out", required=True, help="snapshot directory")
    p.add_argument("--report", help="write JSON stats here instead of stdout")
    p.add_argument("--dataset", help="dataset label (default: facts file stem)")
    p.set_defaults(func=cmd_materialise)

    p = sub.add_parser("update", help="delete facts from a snapshot with one strategy")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--strategy", choices=list(bench.STRATEGIES), default="bfeq")
    _add_deletion_args(p)
    p.add_argument("--sweep", type=_fractions, help="comma-separated fractions; each run starts from the snapshot")
    p.add_argument("--bookkeeping", action="store_true", help="index explicit facts by representative")
    p.add_argument("--out", help="save the updated snapshot here (default: in place)")
    p.add_argument("--no-save", action="store_true", help="leave the snapshot untouched")
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    p.add_argument("--csv", help="write CSV rows here")
    p.add_argument("--append", action="store_true", help="append to an existing CSV")
    p.add_argument("--dataset")
    p.set_defaults(func=cmd_update)

    p = sub.add_parser("generate", help="write a synthetic facts/rules pair")
    p.add_argument("--kind", choices=GENERATORS, required=True)
    p.add_argument("--size", type=int, default=10, help="blocks, constants or path length")
    p.add_argument("--groups", type=int, default=1, help="number of cliques")
    p.add_argument("--density", type=float, default=0.3, help="chord probability inside a clique")
    p.add_argument("--extra", type=float, default=1.0, help="bridge probability per bijective block")
    p.add_argument("--relation", default=":sameHomeTown", help="clique relation")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="check against the brute-force oracle (small inputs)")
    p.add_argument("--facts")
    p.add_argument("--rules")
    _add_deletion_args(p)
    p.add_argument("--random", type=int, metavar="N", help="check N random instances instead")
    p.add_argument("--max-facts", type=int, default=200)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare", help="run all four strategies and emit CSV")
    p.add_argument("--facts", required=True)
    p.add_argument("--rules", required=True)
    _add_deletion_args(p)
    p.add_argument("--sweep", type=_fractions)
    p.add_argument("--bookkeeping", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv")
    p.add_argument("--append", action="store_true")
    p.add_argument("--dataset")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("BFEQ_LOG_LEVEL", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except bench.UsageError as exc:
        parser.error(str(exc))
    except (ParseError, OSError, ValueError) as exc:
        print(f"bfeq: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
