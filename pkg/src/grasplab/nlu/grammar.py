"""Context-free grammar loading and CNF compilation.

Grammar files are line oriented: ``LHS -> RHS1 RHS2 ...`` with ``#``
comments.  Uppercase-initial tokens are nonterminals, lowercase tokens are
words.  The grammar is data, not code: coverage gaps are fixed by editing
the file, which is exactly how the "three finger grasp" pattern gets added
to the extended grammar.

Compilation to Chomsky normal form right-binarizes n-ary rules with
introduced symbols (spliced back out of returned trees), wraps terminals
that appear inside longer rules, and closes over unit rules so the chart
parser only ever sees lexical and binary entries.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path


class GrammarError(ValueError):
    pass


def is_nonterminal(token: str) -> bool:
    return token[:1].isupper() or token.startswith("_")


@dataclass(frozen=True)
class Rule:
    lhs: str
    rhs: tuple[str, ...]
    index: int

    def __str__(self) -> str:
        return f"{self.lhs} -> {' '.join(self.rhs)}"


_BIN_MARK = "~"        # introduced by binarization
_TERM_MARK = "_T_"     # introduced preterminal wrapping an inline word


def is_introduced(symbol: str) -> bool:
    return _BIN_MARK in symbol or symbol.startswith(_TERM_MARK)


@dataclass
class CnfGrammar:
    """Chart-parser form: lexical entries, binary entries, unit closure.

    Rule indices come from the source grammar's file order and define the
    tie-break: of two derivations the one whose nested index tuple compares
    lower wins.
    """

    start: str
    # word -> [(symbol, rule_index)]
    lex: dict[str, list[tuple[str, int]]]
    # (B, C) -> [(A, rule_index)]
    binary: dict[tuple[str, str], list[tuple[str, int]]]
    # B -> [(A, chain)]; chain is the unit-rule path A => ... => B as
    # (rule_index, intermediate_symbol) pairs, outermost first
    unit_parents: dict[str, list[tuple[str, tuple[tuple[int, str], ...]]]]
    vocabulary: frozenset[str]


class Grammar:
    def __init__(self, rules: list[Rule], start: str = "VP"):
        if not rules:
            raise GrammarError("grammar has no rules")
        self.rules = rules
        self.start = start
        self._cnf: CnfGrammar | None = None

    @classmethod
    def from_pairs(cls, pairs, start: str = "VP") -> "Grammar":
        rules = [Rule(lhs, tuple(rhs), i) for i, (lhs, rhs) in enumerate(pairs)]
        return cls(rules, start)

    @classmethod
    def loads(cls, text: str, start: str = "VP") -> "Grammar":
        rules = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "->" not in line:
                raise GrammarError(f"line {lineno}: expected 'LHS -> RHS', got {raw!r}")
            lhs, rhs = line.split("->", 1)
            lhs = lhs.strip()
            rhs_tokens = tuple(rhs.split())
            if not is_nonterminal(lhs):
                raise GrammarError(f"line {lineno}: LHS must be a nonterminal")
            if not rhs_tokens:
                raise GrammarError(f"line {lineno}: empty RHS")
            rules.append(Rule(lhs, rhs_tokens, len(rules)))
        return cls(rules, start)

    @classmethod
    def load(cls, path: str | Path, start: str = "VP") -> "Grammar":
        return cls.loads(Path(path).read_text(), start)

    def dumps(self) -> str:
        return "\n".join(str(r) for r in self.rules) + "\n"

    @property
    def nonterminals(self) -> set[str]:
        out = {r.lhs for r in self.rules}
        for r in self.rules:
            out.update(t for t in r.rhs if is_nonterminal(t))
        return out

    def cnf(self) -> CnfGrammar:
        if self._cnf is None:
            self._cnf = _compile(self)
        return self._cnf


def _compile(grammar: Grammar) -> CnfGrammar:
    lex: dict[str, list[tuple[str, int]]] = {}
    binary: dict[tuple[str, str], list[tuple[str, int]]] = {}
    units: list[tuple[str, str, int]] = []  # (A, B, rule_index)

    def add_lex(word, sym, idx):
        lex.setdefault(word, []).append((sym, idx))

    def add_bin(a, b, c, idx):
        binary.setdefault((b, c), []).append((a, idx))

    for rule in grammar.rules:
        rhs = list(rule.rhs)
        if len(rhs) == 1:
            if is_nonterminal(rhs[0]):
                if rhs[0] == rule.lhs:
                    raise GrammarError(f"self-loop rule {rule}")
                units.append((rule.lhs, rhs[0], rule.index))
            else:
                add_lex(rhs[0], rule.lhs, rule.index)
            continue
        # wrap inline terminals so every long rule is over nonterminals
        symbols = []
        for tok in rhs:
            if is_nonterminal(tok):
                symbols.append(tok)
            else:
                wrapped = f"{_TERM_MARK}{tok}"
                if not any(s == wrapped for s, _ in lex.get(tok, ())):
                    add_lex(tok, wrapped, rule.index)
                symbols.append(wrapped)
        # right binarization: A -> X1 X2 X3 becomes A -> X1 A~i.1 -> (X2 X3)
        left = symbols[0]
        head = rule.lhs
        for pos in range(1, len(symbols) - 1):
            intro = f"{rule.lhs}{_BIN_MARK}{rule.index}.{pos}"
            add_bin(head, left, intro, rule.index)
            head = intro
            left = symbols[pos]
        add_bin(head, left, symbols[-1], rule.index)

    # unit closure with explicit chains, cycle-safe
    unit_parents: dict[str, list[tuple[str, tuple[tuple[int, str], ...]]]] = {}
    direct: dict[str, list[tuple[str, int]]] = {}
    for a, b, idx in units:
        direct.setdefault(b, []).append((a, idx))

    def chains_over(b, seen):
        # all (ancestor, chain) pairs reaching b through unit rules
        for a, idx in direct.get(b, ()):
            if a in seen:
                continue
            chain = ((idx, a),)
            yield a, chain
            for top, upper in chains_over(a, seen | {a}):
                yield top, upper + chain

    for b in {b for _, b, _ in units}:
        found = list(chains_over(b, {b}))
        if found:
            unit_parents[b] = found

    vocab = frozenset(lex)
    return CnfGrammar(grammar.start, lex, binary, unit_parents, vocab)


def load_grammar(path: str | Path, start: str = "VP") -> Grammar:
    return Grammar.load(path, start)
