"""End-to-end text grounding: tokenize, parse, build the graph, infer."""
from __future__ import annotations

import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..actions import HandAction
from .cyk import parse, tokenize
from .dcg import FactorModel, build_dcg, infer
from .factors import load_corpus, train_factors
from .grammar import Grammar


def data_path(name: str) -> Path:
    """Path of a packaged data file (grammars, corpus, suites)."""
    return Path(resources.files("grasplab") / "data" / name)


def load_default_grammar(which: str = "extended") -> Grammar:
    if which not in ("base", "extended"):
        raise ValueError("grammar must be 'base' or 'extended'")
    return Grammar.load(data_path(f"{which}.grammar"))


def load_default_corpus():
    return load_corpus(data_path("corpus.tsv"))


@dataclass
class GroundingResult:
    action: HandAction
    latency_ms: int
    root_probs: dict[str, float]


class Grounder:
    """A trained grammar+factor pair that turns text into hand actions."""

    def __init__(self, grammar: Grammar, model: FactorModel):
        self.grammar = grammar
        self.model = model

    @classmethod
    def default(cls, which: str = "extended") -> "Grounder":
        grammar = load_default_grammar(which)
        corpus = load_default_corpus()
        if which == "base":
            # the base grammar predates the "n finger grasp" pattern; train
            # on the sentences it can parse, as the full system did
            usable = []
            for ex in corpus:
                try:
                    parse(grammar, tokenize(ex.sentence))
                    usable.append(ex)
                except Exception:
                    pass
            corpus = usable
        return cls(grammar, train_factors(corpus, grammar))

    def ground(self, text: str, force: bool = False) -> GroundingResult:
        """Raises ParseFailure, NoGroundingError or AmbiguousGroundingError."""
        t0 = time.perf_counter()
        tree = parse(self.grammar, tokenize(text))
        graph = build_dcg(tree)
        result = infer(self.model, graph, force=force)
        latency_ms = int(round((time.perf_counter() - t0) * 1000.0))
        return GroundingResult(result.action, latency_ms, result.root_probs)
