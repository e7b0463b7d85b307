import numpy as np
import pytest

from grasplab.actions import GraspType
from grasplab.classifier.train import store_arrays
from grasplab.vision import (DatasetStore, ObjectClass, ObjectSpec,
                             generate_corpus, image_from_bytes,
                             image_to_bytes, render)


def test_render_deterministic():
    a = render(ObjectSpec(ObjectClass.APPLE, seed=7))
    b = render(ObjectSpec(ObjectClass.APPLE, seed=7))
    assert np.array_equal(a, b)


def test_render_shape_and_range():
    img = render(ObjectSpec(ObjectClass.CUP, seed=3))
    assert img.shape == (60, 80, 3)
    assert img.min() >= 0.0 and img.max() <= 1.0


def test_between_class_distance_exceeds_within_class():
    # mean pixel distance apple-vs-banana should dominate apple-vs-apple
    rng = np.random.default_rng(0)
    seeds = rng.integers(2**31, size=(100, 2))
    within, between = [], []
    for s1, s2 in seeds:
        a1 = render(ObjectSpec(ObjectClass.APPLE, seed=int(s1)))
        a2 = render(ObjectSpec(ObjectClass.APPLE, seed=int(s2)))
        b = render(ObjectSpec(ObjectClass.BANANA, seed=int(s2)))
        within.append(np.abs(a1 - a2).mean())
        between.append(np.abs(a1 - b).mean())
    assert np.mean(between) > np.mean(within)


def test_scale_shrinks_bounding_box():
    def bbox_area(img):
        # object pixels differ from the smooth background column-median
        med = np.median(img, axis=(0, 1))
        mask = np.abs(img - med).sum(axis=2) > 0.35
        ys, xs = np.where(mask)
        if len(ys) == 0:
            return 0
        return (np.ptp(ys) + 1) * (np.ptp(xs) + 1)

    small = bbox_area(render(ObjectSpec(ObjectClass.DICE, scale=0.5, seed=2,
                                        jitter_px=0)))
    big = bbox_area(render(ObjectSpec(ObjectClass.DICE, scale=1.0, seed=2,
                                      jitter_px=0)))
    assert 0 < small < big


def test_scale_bounds_enforced():
    with pytest.raises(ValueError):
        ObjectSpec(ObjectClass.APPLE, scale=0.4)
    with pytest.raises(ValueError):
        ObjectSpec(ObjectClass.APPLE, scale=1.6)


def test_split_sizes_four_examples():
    store = DatasetStore(seed=1)
    img = render(ObjectSpec(ObjectClass.APPLE, seed=1))
    for _ in range(4):
        store.add_example(img, GraspType.SPHERICAL)
    splits = store.splits()
    assert (len(splits["train"]), len(splits["val"]), len(splits["test"])) \
        == (2, 1, 1)
    all_ids = sorted(splits["train"] + splits["val"] + splits["test"])
    assert all_ids == [e.example_id for e in store.examples]


def test_split_fractions_within_one_example():
    store = DatasetStore(seed=3)
    img = render(ObjectSpec(ObjectClass.CUP, seed=1))
    for n in range(1, 60):
        store.add_example(img, GraspType.CYLINDRICAL)
        splits = store.splits()
        total = len(store)
        assert abs(len(splits["train"]) - 0.50 * total) <= 1
        assert abs(len(splits["val"]) - 0.25 * total) <= 1
        assert abs(len(splits["test"]) - 0.25 * total) <= 1


def test_corpus_720_total_360_train():
    store = generate_corpus(list(ObjectClass)[:6], 120, seed=1)
    assert len(store) == 720
    splits = store.splits()
    assert len(splits["train"]) == 360
    assert len(splits["val"]) == len(splits["test"]) == 180


def test_label_outside_six_grasps_rejected():
    store = DatasetStore()
    img = render(ObjectSpec(ObjectClass.APPLE, seed=1))
    with pytest.raises(ValueError):
        store.add_example(img, "spherical")
    with pytest.raises(ValueError):
        store.add_example(img, GraspType.SPHERICAL, source="webcam")


def test_generate_corpus_reproducible_and_labeled():
    s1 = generate_corpus([ObjectClass.BANANA], 20, seed=4)
    s2 = generate_corpus([ObjectClass.BANANA], 20, seed=4)
    assert len(s1) == 20
    assert all(e.label is GraspType.TRIPOD for e in s1.examples)
    for a, b in zip(s1.examples, s2.examples):
        assert np.array_equal(a.image, b.image)
        assert a.render_seed == b.render_seed
    with pytest.raises(ValueError):
        generate_corpus([ObjectClass.BANANA], 3, seed=1)


def test_store_roundtrip_bit_exact(tmp_path):
    store = generate_corpus([ObjectClass.APPLE, ObjectClass.DICE], 5, seed=9)
    store.save(tmp_path / "dataset")
    loaded = DatasetStore.load(tmp_path / "dataset")
    assert loaded.seed == store.seed
    assert len(loaded) == len(store)
    for a, b in zip(store.examples, loaded.examples):
        assert a.example_id == b.example_id
        assert a.label is b.label
        assert a.source == b.source
        assert a.timestamp == b.timestamp
        assert a.render_seed == b.render_seed
        assert np.array_equal(a.image, b.image)
    assert loaded.splits() == store.splits()
    # layout: dataset/<label>/<id>.rgb
    assert (tmp_path / "dataset" / "spherical" / "0.rgb").exists()
    assert (tmp_path / "dataset" / "manifest.tsv").exists()


def test_image_bytes_roundtrip():
    img = render(ObjectSpec(ObjectClass.SPOON, seed=11))
    assert np.array_equal(image_from_bytes(image_to_bytes(img)), img)


def test_nearest_centroid_beats_chance():
    store = generate_corpus(list(ObjectClass)[:6], 12, seed=2)
    x, y, _ = store_arrays(store)
    labels = y.argmax(axis=1)
    rng = np.random.default_rng(0)
    order = rng.permutation(len(x))
    train, test = order[:48], order[48:]
    centroids = np.stack([x[train][labels[train] == k].mean(axis=0)
                          for k in range(6)])
    d = ((x[test][:, None, :] - centroids[None]) ** 2).sum(axis=2)
    acc = (d.argmin(axis=1) == labels[test]).mean()
    assert acc > 1.0 / 6.0
