"""Datalog materialisation with owl:sameAs rewriting and incremental deletion."""

from .core import SAMEAS, Dictionary, ParseError, Program, Rule, SafetyError, Var
from .engine import AxiomStore, RStore, answer_pattern, axiom_store, materialise_axiomatised, rmaterialise, rewriting_of
from .equality import RepMap
from .incremental import UpdateReport, bf_delete, bf_delete_axiomatised
from .rules import parse_program
from .store import FactSet, parse_triples, read_triples

__all__ = [
    "SAMEAS", "AxiomStore", "Dictionary", "FactSet", "ParseError", "Program", "RStore",
    "RepMap", "Rule", "SafetyError", "UpdateReport", "Var", "answer_pattern", "axiom_store",
    "bf_delete", "bf_delete_axiomatised", "materialise_axiomatised", "parse_program",
    "parse_triples", "read_triples", "rewriting_of", "rmaterialise",
]

__version__ = "0.1.0"
