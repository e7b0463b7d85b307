"""Text-command understanding: chart parsing, correspondence-graph
construction, factor training, and grounding inference."""
from .grammar import Grammar, GrammarError, load_grammar
from .cyk import ParseTree, ParseFailure, parse, tokenize
from .dcg import (
    DcgGraph,
    PhraseNode,
    FactorModel,
    build_dcg,
    infer,
    NoGroundingError,
    AmbiguousGroundingError,
    GroundingError,
)
from .factors import AnnotatedExample, CorpusParseError, load_corpus, train_factors
from .ground import Grounder, GroundingResult, data_path

__all__ = [
    "Grammar", "GrammarError", "load_grammar",
    "ParseTree", "ParseFailure", "parse", "tokenize",
    "DcgGraph", "PhraseNode", "FactorModel", "build_dcg", "infer",
    "NoGroundingError", "AmbiguousGroundingError", "GroundingError",
    "AnnotatedExample", "CorpusParseError", "load_corpus", "train_factors",
    "Grounder", "GroundingResult", "data_path",
]
