#!/usr/bin/env python3
"""Ground text commands: parse trees, correspondence graphs, inference.

Shows the whole language path: the chart parser's tree for the canonical
sentence, the graph built over it, factor training on the annotated
corpus, generalization to unseen verb/noun-phrase pairings, and the two
failure modes.
"""
from grasplab.nlu import (NoGroundingError, ParseFailure, build_dcg, parse,
                          tokenize)
from grasplab.nlu.ground import Grounder, load_default_grammar

grammar = load_default_grammar("extended")

tree = parse(grammar, tokenize("Perform a spherical grasp."))
print("parse tree:", tree.pretty())

graph = build_dcg(tree)
print(f"graph: {graph.n_nodes} nodes, {graph.n_factors} factors, "
      f"{len(graph.phrasal_nodes())} phrase-level variables")

print("\ntraining factors on the 14-sentence corpus...")
grounder = Grounder.default("extended")

for text in (
    "perform a spherical grasp",
    "do a hook grasp",               # verb/noun pairing never seen together
    "perform a three finger grasp",  # needs the extended grammar pattern
    "open hand",
    "stop hand",
):
    result = grounder.ground(text)
    top = max(result.root_probs.values())
    print(f"  {text:32s} -> {result.action.name:18s} "
          f"(p={top:.2f}, {result.latency_ms} ms)")

print("\nfailure modes:")
for text in ("make a fist", "perform a grasp"):
    try:
        grounder.ground(text)
    except ParseFailure as err:
        print(f"  {text:32s} -> parse failure ({err.detail})")
    except NoGroundingError:
        print(f"  {text:32s} -> understanding error (nothing grounded)")

print("\nthe base grammar lacks the counted-finger pattern:")
base = Grounder.default("base")
try:
    base.ground("perform a two finger grasp")
except ParseFailure as err:
    print(f"  perform a two finger grasp -> parse failure ({err.detail})")
