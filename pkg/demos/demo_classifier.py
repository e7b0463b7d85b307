#!/usr/bin/env python3
"""Train the grasp classifier and watch it adapt to a novel object.

A desk-scale version of the full study: train on six classes, observe
the held-out banana being misread, add twenty corrected examples, retrain,
and watch the tripod posterior move.
"""
import numpy as np

from grasplab.actions import GraspType
from grasplab.classifier import retrain_with, train_scg
from grasplab.vision import ObjectClass, ObjectSpec, generate_corpus, render

N_PER_CLASS = 20      # keep the demo quick; the experiments use 120


def banana_posterior(model, n=8, seed0=4_000):
    rng = np.random.default_rng(seed0)
    posts = []
    for _ in range(n):
        img = render(ObjectSpec(ObjectClass.BANANA,
                                scale=float(rng.uniform(0.8, 1.2)),
                                rotation=float(rng.normal(0, 0.12)),
                                seed=int(rng.integers(2**31))))
        posts.append(model.posterior(img))
    return np.mean(posts, axis=0)


print(f"training on six classes, {N_PER_CLASS} examples each...")
store = generate_corpus(list(ObjectClass)[:6], N_PER_CLASS, seed=11)
model, report = train_scg(store, restarts=2, max_epochs=30, patience=6,
                          seed=11)
chosen = report.runs[report.chosen]
print(f"chosen restart {report.chosen}: "
      f"val_accuracy={chosen.val_accuracy:.3f} epochs={chosen.epochs}")

posts = banana_posterior(model)
names = [g.value for g in GraspType]
print("\nbanana posteriors before any banana data:")
for name, p in zip(names, posts):
    print(f"  {name:12s} {p:.3f}")
print(f"tripod (the desired grasp) gets {posts[GraspType.TRIPOD.index]:.3f}")

print("\nadding 20 corrected banana examples and retraining...")
extra = generate_corpus([ObjectClass.BANANA], 20, seed=99)
model2, _ = retrain_with(store, extra.examples, restarts=2, max_epochs=30,
                         patience=6, seed=11)
posts2 = banana_posterior(model2)
print(f"tripod posterior moved {posts[GraspType.TRIPOD.index]:.3f} -> "
      f"{posts2[GraspType.TRIPOD.index]:.3f}")
