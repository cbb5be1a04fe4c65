"""Partial combinatory algebras on a register machine.

Models: Kleene's first model K1, the effective second model K2 and its
binary variant K201, the partial-function model B, and the graph model E.
Alongside them: a term calculus with bracket abstraction, candidate
embeddings between models, and probes that hunt for refutation witnesses.
"""

# import order matters: each module registers short program codes on import
from .machine import Budget, CODES, Halted, OracleUndefined, OutOfFuel, Program, evaluate, phi
from . import streams
from .k2 import K201Element, K201Pca, K2Element, K2Pca
from .bmodel import BElement, BPca
from .k1 import K1Element, K1Pca
from .terms import abstract_all, eval_term, normalize, parse, show
from .graph import FiniteSet, GraphPca, g_apply
from .embeddings import EmbeddingCandidate, RefutationWitness, check_embedding
from . import probes
from . import planted

__version__ = "0.1.0"

__all__ = [
    "BElement", "BPca", "Budget", "CODES", "EmbeddingCandidate", "FiniteSet", "GraphPca",
    "Halted", "K1Element", "K1Pca", "K201Element", "K201Pca", "K2Element", "K2Pca",
    "OracleUndefined", "OutOfFuel", "Program", "RefutationWitness", "abstract_all",
    "check_embedding", "eval_term", "evaluate", "g_apply", "normalize", "parse", "phi",
    "planted", "probes", "show", "streams",
]
