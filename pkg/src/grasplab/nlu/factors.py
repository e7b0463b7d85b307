"""Training the grounding factors from an annotated command corpus.

Each corpus line pairs a sentence with the action it should ground to.
Gold correspondence assignments are constructed structurally: the root
phrase activates exactly the annotated grounding, and noun phrases inside
grasp commands inherit the grasp (that is the child evidence the root
factors learn to trust).  The resulting maximum-likelihood problem is a
plain L2-regularized logistic regression over the factor features, solved
deterministically.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

from ..actions import GROUNDINGS, ActionKind, HandAction
from .cyk import ParseFailure, parse, tokenize
from .dcg import DcgGraph, FactorModel, build_dcg
from .grammar import Grammar


@dataclass(frozen=True)
class AnnotatedExample:
    sentence: str
    action: HandAction


class CorpusParseError(Exception):
    def __init__(self, failures: list[tuple[str, str]]):
        lines = "; ".join(f"{s!r}: {why}" for s, why in failures)
        super().__init__(f"corpus sentences failed to parse: {lines}")
        self.failures = failures


def load_corpus(path: str | Path) -> list[AnnotatedExample]:
    out = []
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        sentence, action = line.split("\t")
        out.append(AnnotatedExample(sentence, HandAction.parse(action)))
    return out


def gold_assignment(graph: DcgGraph, action: HandAction):
    """Per-phrasal-node gold active grounding sets for one sentence."""
    gold: dict[int, tuple[str, ...]] = {}
    for node in graph.nodes:
        if not node.phrasal:
            continue
        if node.idx == graph.root.idx:
            gold[node.idx] = (action.name,)
        elif action.kind is ActionKind.GRASP:
            gold[node.idx] = (action.name,)   # noun phrases inherit the grasp
        else:
            gold[node.idx] = ()
    return gold


def _training_rows(corpus, grammar):
    rows = []  # (feature names, label)
    failures = []
    for ex in corpus:
        try:
            tree = parse(grammar, tokenize(ex.sentence))
        except ParseFailure as err:
            failures.append((ex.sentence, err.detail))
            continue
        graph = build_dcg(tree)
        gold = gold_assignment(graph, ex.action)
        for node in graph.nodes:
            if not node.phrasal:
                continue
            child_active = []
            for ci in node.child_idxs:
                child_active.extend(gold.get(ci, ()))
            child_active = tuple(dict.fromkeys(child_active))
            for g in GROUNDINGS:
                feats = FactorModel.features(node, g, child_active)
                rows.append((feats, 1.0 if g.name in gold[node.idx] else 0.0))
    if failures:
        raise CorpusParseError(failures)
    return rows


def train_factors(corpus, grammar: Grammar, l2: float = 0.05) -> FactorModel:
    """Maximize the regularized likelihood of the gold assignments."""
    rows = _training_rows(corpus, grammar)
    names = sorted({f for feats, _ in rows for f in feats})
    index = {f: i for i, f in enumerate(names)}
    x = np.zeros((len(rows), len(names)))
    y = np.empty(len(rows))
    for r, (feats, label) in enumerate(rows):
        y[r] = label
        for f in feats:
            x[r, index[f]] += 1.0

    def objective(w):
        z = x @ w
        # softplus(-z) + (1-y) z is the per-row negative log-likelihood
        nll = np.logaddexp(0.0, -z) + (1.0 - y) * z
        p = 1.0 / (1.0 + np.exp(-z))
        grad = x.T @ (p - y) + l2 * w
        return float(nll.sum() + 0.5 * l2 * (w @ w)), grad

    res = minimize(objective, np.zeros(len(names)), jac=True, method="L-BFGS-B",
                   options={"maxiter": 1000, "ftol": 1e-12, "gtol": 1e-9})
    return FactorModel(index, res.x, l2)
