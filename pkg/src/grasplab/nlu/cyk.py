"""Bottom-up chart parsing over the compiled CNF grammar.

The chart keeps, per span and symbol, the single best derivation under the
lowest-rule-index order (nested tuples of rule indices compared
lexicographically), so ambiguous sentences parse deterministically.
Returned trees are de-binarized: introduced symbols are spliced out and
unit chains restored, so the caller sees the source grammar's n-ary shape.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .grammar import CnfGrammar, Grammar, is_introduced


@dataclass(frozen=True)
class ParseTree:
    label: str | None           # None marks a bare word under a flattened rule
    start: int
    end: int
    children: tuple["ParseTree", ...] = ()
    word: str | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def words(self) -> list[str]:
        if self.is_leaf:
            return [self.word] if self.word is not None else []
        out = []
        for c in self.children:
            out.extend(c.words())
        return out

    def pretty(self) -> str:
        if self.is_leaf:
            return f"{self.label} {self.word}" if self.label else str(self.word)
        inner = ", ".join(c.pretty() for c in self.children)
        return f"{self.label}({inner})"

    def shape(self):
        """Nested labels only, for golden-tree comparisons."""
        if self.is_leaf:
            return self.label
        return (self.label, tuple(c.shape() for c in self.children))

    def nodes_postorder(self) -> list["ParseTree"]:
        out: list[ParseTree] = []

        def walk(n):
            for c in n.children:
                if not c.is_leaf or c.label is not None:
                    walk(c)
            out.append(n)

        walk(self)
        return out


class ParseFailure(Exception):
    """No complete derivation.  kind is 'unknown-words' or 'no-derivation'."""

    def __init__(self, kind: str, detail: str):
        super().__init__(f"parse failure ({kind}): {detail}")
        self.kind = kind
        self.detail = detail


_PUNCT = re.compile(r"[^\w\s']")


def tokenize(text: str) -> list[str]:
    """Lowercase, strip punctuation, split on whitespace."""
    return _PUNCT.sub(" ", text.lower()).split()


@dataclass(frozen=True)
class _Entry:
    enc: tuple               # nested rule-index tuple, the tie-break key
    kind: str                # lex | unit | bin
    rule_index: int
    parts: tuple             # kind-specific backpointer payload


def _close_units(cell: dict, cnf: CnfGrammar) -> None:
    # relax unit parents to fixpoint; enc strictly decreases so this halts
    changed = True
    while changed:
        changed = False
        for sym in list(cell):
            for parent, chain in cnf.unit_parents.get(sym, ()):
                enc = cell[sym].enc
                for idx, _ in reversed(chain):
                    enc = (idx, enc)
                cand = _Entry(enc, "unit", -1, (chain, sym))
                if parent not in cell or cand.enc < cell[parent].enc:
                    cell[parent] = cand
                    changed = True


def _chart(cnf: CnfGrammar, tokens: list[str]):
    n = len(tokens)
    chart: dict[tuple[int, int], dict[str, _Entry]] = {}
    for i, word in enumerate(tokens):
        cell: dict[str, _Entry] = {}
        for sym, idx in cnf.lex.get(word, ()):
            cand = _Entry((idx,), "lex", idx, (word,))
            if sym not in cell or cand.enc < cell[sym].enc:
                cell[sym] = cand
        _close_units(cell, cnf)
        chart[(i, i + 1)] = cell
    for width in range(2, n + 1):
        for i in range(0, n - width + 1):
            j = i + width
            cell = {}
            for k in range(i + 1, j):
                left, right = chart[(i, k)], chart[(k, j)]
                if not left or not right:
                    continue
                for (b, c), prods in cnf.binary.items():
                    if b in left and c in right:
                        enc_pair = (left[b].enc, right[c].enc)
                        for a, idx in prods:
                            cand = _Entry((idx,) + enc_pair, "bin", idx,
                                          (k, b, c))
                            if a not in cell or cand.enc < cell[a].enc:
                                cell[a] = cand
            _close_units(cell, cnf)
            chart[(i, j)] = cell
    return chart


def _rebuild(chart, cnf, sym: str, i: int, j: int, tokens) -> ParseTree:
    entry = chart[(i, j)][sym]
    if entry.kind == "lex":
        return ParseTree(sym, i, j, (), tokens[i])
    if entry.kind == "unit":
        chain, base = entry.parts
        node = _rebuild(chart, cnf, base, i, j, tokens)
        for idx, parent_sym in reversed(chain):
            node = ParseTree(parent_sym, i, j, (node,))
        return node
    k, b, c = entry.parts
    left = _rebuild(chart, cnf, b, i, k, tokens)
    right = _rebuild(chart, cnf, c, k, j, tokens)
    return ParseTree(sym, i, j, (left, right))


def _restore(node: ParseTree) -> ParseTree:
    """Splice out binarization symbols and unwrap introduced preterminals."""
    if node.is_leaf:
        if node.label is not None and node.label.startswith("_T_"):
            return ParseTree(None, node.start, node.end, (), node.word)
        return node
    kids = []
    for child in node.children:
        restored = _restore(child)
        if restored.label is not None and is_introduced(restored.label) \
                and not restored.is_leaf:
            kids.extend(restored.children)
        else:
            kids.append(restored)
    return ParseTree(node.label, node.start, node.end, tuple(kids))


def parse(grammar: Grammar, tokens: list[str] | str) -> ParseTree:
    """Best derivation of the tokens rooted at the start symbol.

    Raises ParseFailure when a word is outside the lexicon or no complete
    derivation exists.
    """
    if isinstance(tokens, str):
        tokens = tokenize(tokens)
    if not tokens:
        raise ParseFailure("no-derivation", "empty input")
    cnf = grammar.cnf()
    unknown = [t for t in tokens if t not in cnf.vocabulary]
    if unknown:
        raise ParseFailure("unknown-words", " ".join(sorted(set(unknown))))
    chart = _chart(cnf, tokens)
    top = chart[(0, len(tokens))]
    if cnf.start not in top:
        raise ParseFailure("no-derivation", " ".join(tokens))
    tree = _rebuild(chart, cnf, cnf.start, 0, len(tokens), tokens)
    return _restore(tree)
