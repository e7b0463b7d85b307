"""Correspondence-graph grounding over parse trees.

Every tree node gets one phrase variable and, per candidate grounding, one
binary correspondence variable with exactly one factor.  Phrasal nodes
(those with non-lexical children, e.g. VP and NP) carry learned log-linear
factors; part-of-speech nodes carry a fixed uninformative factor, so they
never activate and never influence the argmax.  A parent's factor is
conditioned on the groundings its phrasal descendants chose, which is what
lets a verb phrase inherit the grasp its noun phrase expressed.

Inference is one bottom-up pass: given the children's chosen assignment,
each correspondence variable is independent, so per-variable argmax
maximizes the product of factors under the bottom-up factorization.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from ..actions import GROUNDINGS, HandAction
from .cyk import ParseTree
from .grammar import is_introduced


class GroundingError(Exception):
    pass


class NoGroundingError(GroundingError):
    """Understanding error: nothing at the root grounded with p > 0.5."""


class AmbiguousGroundingError(GroundingError):
    def __init__(self, actions):
        super().__init__("ambiguous grounding: "
                         + ", ".join(a.name for a, _ in actions))
        self.actions = actions


@dataclass
class PhraseNode:
    idx: int                       # position in bottom-up order
    label: str
    words: tuple[str, ...]
    head_tag: str
    phrasal: bool
    child_idxs: tuple[int, ...]    # nearest phrasal descendants


@dataclass
class DcgGraph:
    nodes: list[PhraseNode]
    tokens: tuple[str, ...]

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_factors(self) -> int:
        return len(self.nodes) * len(GROUNDINGS)

    @property
    def root(self) -> PhraseNode:
        return self.nodes[-1]

    def phrasal_nodes(self) -> list[PhraseNode]:
        return [n for n in self.nodes if n.phrasal]


def _head_tag(node: ParseTree) -> str:
    """Deterministic head rule: a VP is headed by its first tag, anything
    else by its last (NP heads are their nouns)."""
    leaves = [n for n in _walk(node) if n.is_leaf]
    tags = [n.label for n in leaves if n.label is not None]
    if not tags:
        return "?"
    return tags[0] if node.label == "VP" else tags[-1]


def _walk(node: ParseTree):
    yield node
    for c in node.children:
        yield from _walk(c)


def build_dcg(tree: ParseTree) -> DcgGraph:
    """One phrase variable per tree node, in bottom-up (post-order) order.

    Lexical (part-of-speech) nodes and introduced binarization symbols are
    non-phrasal: their factors are fixed and their phrasal descendants pass
    straight through to the parent, so a binarized tree grounds identically
    to its n-ary original.
    """
    nodes: list[PhraseNode] = []

    def visit(t: ParseTree) -> int:
        phrasal_kids = []
        for c in t.children:
            ci = visit(c)
            if nodes[ci].phrasal:
                phrasal_kids.append(ci)
            else:
                phrasal_kids.extend(nodes[ci].child_idxs)
        introduced = t.label is not None and is_introduced(t.label)
        node = PhraseNode(
            idx=len(nodes),
            label=t.label or "?",
            words=tuple(t.words()),
            head_tag=_head_tag(t),
            phrasal=not t.is_leaf and not introduced,
            child_idxs=tuple(phrasal_kids),
        )
        nodes.append(node)
        return node.idx

    visit(tree)
    return DcgGraph(nodes, tuple(tree.words()))


class FactorModel:
    """Log-linear factors p(correspondence | grounding, phrase, children).

    Feature templates: word-in-phrase x grounding, head-tag x grounding,
    and active-child-grounding x grounding.  Features fire for the True
    outcome only; the two outcomes of every factor therefore normalize by
    construction, and a phrase with no known evidence sits exactly at
    p = 0.5 and stays inactive.
    """

    def __init__(self, feature_index: dict[str, int], weights,
                 l2: float = 0.0):
        self.feature_index = feature_index
        self.weights = weights
        self.l2 = l2

    @staticmethod
    def features(node: PhraseNode, grounding: HandAction,
                 child_active: tuple[str, ...]) -> list[str]:
        g = grounding.name
        feats = [f"word={w}|g={g}" for w in node.words]
        feats.append(f"head={node.head_tag}|g={g}")
        feats.extend(f"child={c}|g={g}" for c in child_active)
        return feats

    def score(self, node: PhraseNode, grounding: HandAction,
              child_active: tuple[str, ...]) -> float:
        s = 0.0
        for f in self.features(node, grounding, child_active):
            i = self.feature_index.get(f)
            if i is not None:
                s += float(self.weights[i])
        return s

    def prob_true(self, node: PhraseNode, grounding: HandAction,
                  child_active: tuple[str, ...]) -> float:
        if not node.phrasal:
            return 0.5  # fixed uninformative factor for POS nodes
        return 1.0 / (1.0 + math.exp(-self.score(node, grounding, child_active)))

    def save(self, path: str | Path) -> None:
        lines = [f"# factor-model l2={self.l2!r}"]
        for feat, i in sorted(self.feature_index.items()):
            lines.append(f"{feat}\t{float(self.weights[i])!r}")
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "FactorModel":
        import numpy as np
        lines = Path(path).read_text().splitlines()
        l2 = 0.0
        if lines and lines[0].startswith("# factor-model"):
            l2 = float(lines[0].split("l2=", 1)[1])
            lines = lines[1:]
        index, values = {}, []
        for line in lines:
            if not line.strip():
                continue
            feat, val = line.rsplit("\t", 1)
            index[feat] = len(values)
            values.append(float(val))
        return cls(index, np.array(values), l2)


@dataclass
class InferenceResult:
    action: HandAction
    root_probs: dict[str, float]            # grounding name -> p(True)
    active: list[tuple[HandAction, float]]  # root groundings with p > 0.5
    assignment: dict[tuple[int, int], bool]


def _bottom_up(model: FactorModel, graph: DcgGraph):
    """Chosen correspondence assignment and per-node activation sets."""
    assignment: dict[tuple[int, int], bool] = {}
    active_of: dict[int, tuple[str, ...]] = {}
    probs_of: dict[int, dict[str, float]] = {}
    for node in graph.nodes:  # already bottom-up
        child_active: list[str] = []
        for ci in node.child_idxs:
            child_active.extend(active_of[ci])
        child_active_t = tuple(dict.fromkeys(child_active))
        actives = []
        probs = {}
        for j, g in enumerate(GROUNDINGS):
            p = model.prob_true(node, g, child_active_t)
            on = p > 0.5
            assignment[(node.idx, j)] = on
            probs[g.name] = p
            if on:
                actives.append(g.name)
        active_of[node.idx] = tuple(actives)
        probs_of[node.idx] = probs
    return assignment, active_of, probs_of


def infer(model: FactorModel, graph: DcgGraph, force: bool = False) -> InferenceResult:
    """Most probable root grounding; errors when none or several activate."""
    assignment, active_of, probs_of = _bottom_up(model, graph)
    root = graph.root
    root_probs = probs_of[root.idx]
    active = [(g, root_probs[g.name]) for j, g in enumerate(GROUNDINGS)
              if assignment[(root.idx, j)]]
    if not active:
        raise NoGroundingError(
            f"no grounding for {' '.join(graph.tokens)!r}: "
            "no root correspondence exceeded 0.5")
    if len(active) > 1 and not force:
        raise AmbiguousGroundingError(active)
    best = max(active, key=lambda ap: ap[1])
    return InferenceResult(best[0], root_probs, active, assignment)
