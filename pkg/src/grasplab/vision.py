"""Procedural camera stand-in: 80x60 RGB renders of desk objects and the
labeled dataset store that feeds classifier training.

Each object class has its own silhouette and palette so the classes are
separable from raw pixels, while seeded jitter (position, scale, hue,
rotation) keeps single examples ambiguous enough that a classifier has
something to learn.
"""
from __future__ import annotations

import colorsys
import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .actions import GraspType

WIDTH = 80
HEIGHT = 60
N_FEATURES = WIDTH * HEIGHT * 3


class ImageShapeError(ValueError):
    pass


def check_image(img: np.ndarray) -> np.ndarray:
    if not isinstance(img, np.ndarray) or img.shape != (HEIGHT, WIDTH, 3):
        raise ImageShapeError(f"expected {HEIGHT}x{WIDTH}x3 image, got "
                              f"{getattr(img, 'shape', type(img))}")
    if img.min() < 0.0 or img.max() > 1.0:
        raise ImageShapeError("image channels must lie in [0, 1]")
    return img


def flatten_image(img: np.ndarray) -> np.ndarray:
    """Vectorize row-major as consecutive RGB triples (length 14400)."""
    return np.ascontiguousarray(img, dtype=np.float64).reshape(-1)


def image_to_bytes(img: np.ndarray) -> bytes:
    return (np.round(img * 255.0)).astype(np.uint8).tobytes()


def image_from_bytes(raw: bytes) -> np.ndarray:
    if len(raw) != N_FEATURES:
        raise ImageShapeError(f"expected {N_FEATURES} bytes, got {len(raw)}")
    arr = np.frombuffer(raw, dtype=np.uint8).reshape(HEIGHT, WIDTH, 3)
    return arr.astype(np.float64) / 255.0


def _quantize(img: np.ndarray) -> np.ndarray:
    # Snap to the 8-bit grid so disk round-trips are bit-exact.
    return np.round(np.clip(img, 0.0, 1.0) * 255.0) / 255.0


class ObjectClass(enum.Enum):
    APPLE = "apple"
    CUP = "cup"
    PITCHER = "pitcher"
    BOX = "box"
    SPOON = "spoon"
    DICE = "dice"
    BANANA = "banana"


#: Canonical grasp for each object class.
CANONICAL_GRASP = {
    ObjectClass.APPLE: GraspType.SPHERICAL,
    ObjectClass.CUP: GraspType.CYLINDRICAL,
    ObjectClass.PITCHER: GraspType.HOOK,
    ObjectClass.BOX: GraspType.LATERAL,
    ObjectClass.SPOON: GraspType.TRIPOD,
    ObjectClass.DICE: GraspType.PINCH,
    ObjectClass.BANANA: GraspType.TRIPOD,
}

_PALETTE = {
    ObjectClass.APPLE: (0.78, 0.13, 0.10),
    ObjectClass.CUP: (0.16, 0.35, 0.78),
    ObjectClass.PITCHER: (0.15, 0.62, 0.58),
    ObjectClass.BOX: (0.85, 0.45, 0.10),
    ObjectClass.SPOON: (0.33, 0.35, 0.42),
    ObjectClass.DICE: (0.93, 0.93, 0.88),
    ObjectClass.BANANA: (0.90, 0.70, 0.10),
}


@dataclass(frozen=True)
class ObjectSpec:
    cls: ObjectClass
    scale: float = 1.0
    jitter_px: float = 3.0
    hue_jitter_deg: float = 12.0
    rotation: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.5 <= self.scale <= 1.5:
            raise ValueError(f"scale must lie in [0.5, 1.5], got {self.scale}")

    @property
    def label(self) -> GraspType:
        return CANONICAL_GRASP[self.cls]


def _shift_hue(rgb, degrees):
    h, s, v = colorsys.rgb_to_hsv(*rgb)
    return colorsys.hsv_to_rgb((h + degrees / 360.0) % 1.0, s, v)


def _paint(img, mask, color):
    img[mask] = color


def render(spec: ObjectSpec) -> np.ndarray:
    """Render one frame; identical output for identical specs."""
    rng = np.random.default_rng(spec.seed)
    s = spec.scale

    # Desk background: soft vertical gradient plus pixel noise.
    yy = np.linspace(0.0, 1.0, HEIGHT)[:, None]
    base = 0.80 - 0.08 * yy + rng.normal(0.0, 0.02, size=(HEIGHT, WIDTH))
    img = np.repeat(base[:, :, None], 3, axis=2)
    img[:, :, 2] += 0.02  # slightly cool desk tone

    cx = WIDTH / 2 + rng.uniform(-spec.jitter_px, spec.jitter_px)
    cy = HEIGHT / 2 + rng.uniform(-spec.jitter_px, spec.jitter_px)
    hue_off = rng.uniform(-spec.hue_jitter_deg, spec.hue_jitter_deg)
    color = np.array(_shift_hue(_PALETTE[spec.cls], hue_off))

    yg, xg = np.mgrid[0:HEIGHT, 0:WIDTH].astype(np.float64)
    dx, dy = xg - cx, yg - cy
    c, sn = np.cos(spec.rotation), np.sin(spec.rotation)
    xr = c * dx + sn * dy
    yr = -sn * dx + c * dy

    cls = spec.cls
    if cls is ObjectClass.APPLE:
        body = xr**2 + yr**2 <= (16 * s) ** 2
        _paint(img, body, color)
        stem = (np.abs(xr) <= 1.6) & (yr >= -21 * s) & (yr <= -14 * s)
        _paint(img, stem, (0.35, 0.22, 0.08))
        shine = (xr + 6 * s) ** 2 + (yr + 6 * s) ** 2 <= (4 * s) ** 2
        _paint(img, shine & body, np.clip(color + 0.18, 0, 1))
    elif cls is ObjectClass.CUP:
        body = (np.abs(xr) <= 9 * s) & (np.abs(yr) <= 13 * s)
        rr = (xr - 9 * s) ** 2 + yr**2
        handle = (rr <= (7 * s) ** 2) & (rr >= (4.2 * s) ** 2) & (xr > 9 * s)
        _paint(img, body | handle, color)
        rim = body & (yr <= -10.5 * s)
        _paint(img, rim, np.clip(color + 0.15, 0, 1))
    elif cls is ObjectClass.PITCHER:
        half_w = (9.0 + 4.0 * (yr / (17 * s) + 1.0) / 2.0) * s
        body = (np.abs(yr) <= 17 * s) & (np.abs(xr) <= half_w)
        spout = (yr >= -20 * s) & (yr <= -13 * s) & (xr >= -16 * s) & (xr <= -8 * s)
        rr = (xr - 12 * s) ** 2 + yr**2
        handle = (rr <= (9 * s) ** 2) & (rr >= (6 * s) ** 2) & (xr > 12 * s)
        _paint(img, body | spout | handle, color)
    elif cls is ObjectClass.BOX:
        body = (np.abs(xr) <= 12 * s) & (np.abs(yr) <= 8 * s)
        _paint(img, body, color)
        band = body & (np.abs(yr) <= 2.5 * s)
        _paint(img, band, np.clip(color + 0.2, 0, 1))
    elif cls is ObjectClass.SPOON:
        # upright pose: bowl on top, handle hanging down
        bowl = (xr / (6 * s)) ** 2 + ((yr + 14 * s) / (4.5 * s)) ** 2 <= 1.0
        handle = (yr >= -10 * s) & (yr <= 20 * s) & (np.abs(xr) <= 1.7 * s)
        _paint(img, bowl | handle, color)
    elif cls is ObjectClass.DICE:
        body = (np.abs(xr) <= 5.5 * s) & (np.abs(yr) <= 5.5 * s)
        _paint(img, body, color)
        for px, py in ((-2.6, -2.6), (2.6, 2.6), (0.0, 0.0)):
            pip = (xr - px * s) ** 2 + (yr - py * s) ** 2 <= (1.1 * s) ** 2
            _paint(img, pip, (0.12, 0.12, 0.12))
    elif cls is ObjectClass.BANANA:
        outer = xr**2 + yr**2 <= (15 * s) ** 2
        inner = xr**2 + (yr + 9 * s) ** 2 <= (11 * s) ** 2
        lune = outer & ~inner & (yr > -7 * s)
        _paint(img, lune, color)
        tips = lune & (np.abs(xr) >= 11 * s)
        _paint(img, tips, (0.45, 0.33, 0.10))
    else:  # pragma: no cover
        raise ValueError(f"unhandled object class {cls}")

    return _quantize(img)


@dataclass
class LabeledExample:
    example_id: int
    image: np.ndarray
    label: GraspType
    source: str            # gui | nlu | scripted
    timestamp: int = 0
    render_seed: int | None = None


_SOURCES = ("gui", "nlu", "scripted")


class DatasetStore:
    """Labeled-example store with deterministic 50/25/25 split assignment.

    The store-level split is a pure function of the store seed and the
    example count; training re-draws its own splits per restart.
    """

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.examples: list[LabeledExample] = []
        self._next_id = 0

    def __len__(self) -> int:
        return len(self.examples)

    def add_example(self, image: np.ndarray, label: GraspType, source: str = "gui",
                    timestamp: int = 0, render_seed: int | None = None) -> int:
        if not isinstance(label, GraspType):
            raise ValueError(f"label must be one of the six grasps, got {label!r}")
        if source not in _SOURCES:
            raise ValueError(f"source must be one of {_SOURCES}, got {source!r}")
        check_image(image)
        ex = LabeledExample(self._next_id, _quantize(image), label, source,
                            timestamp, render_seed)
        self.examples.append(ex)
        self._next_id += 1
        return ex.example_id

    def get(self, example_id: int) -> LabeledExample:
        for ex in self.examples:
            if ex.example_id == example_id:
                return ex
        raise KeyError(example_id)

    def labels_present(self) -> list[GraspType]:
        return [g for g in GraspType if any(e.label is g for e in self.examples)]

    def count_by_label(self) -> dict[GraspType, int]:
        out: dict[GraspType, int] = {}
        for ex in self.examples:
            out[ex.label] = out.get(ex.label, 0) + 1
        return out

    @staticmethod
    def split_sizes(n: int) -> tuple[int, int, int]:
        """50/25/25 with half-up rounding; test split absorbs the remainder."""
        train = int(n * 0.5 + 0.5)
        val = min(int(n * 0.25 + 0.5), n - train)
        return train, val, n - train - val

    def draw_split(self, split_seed: int | None = None) -> dict[str, list[int]]:
        """Seeded disjoint exhaustive split over current example ids."""
        seed = self.seed if split_seed is None else split_seed
        ids = [ex.example_id for ex in self.examples]
        order = np.random.default_rng(seed).permutation(len(ids))
        n_train, n_val, _ = self.split_sizes(len(ids))
        shuffled = [ids[i] for i in order]
        return {
            "train": sorted(shuffled[:n_train]),
            "val": sorted(shuffled[n_train:n_train + n_val]),
            "test": sorted(shuffled[n_train + n_val:]),
        }

    def splits(self) -> dict[str, list[int]]:
        return self.draw_split(self.seed)

    # Disk layout: <root>/<label>/<id>.rgb (raw 80x60x3 bytes) + manifest.tsv.
    def save(self, root: str | Path) -> None:
        root = Path(root)
        root.mkdir(parents=True, exist_ok=True)
        lines = [f"# store_seed={self.seed}",
                 "id\tlabel\tsource\ttimestamp\tseed"]
        for ex in self.examples:
            label_dir = root / ex.label.value
            label_dir.mkdir(exist_ok=True)
            (label_dir / f"{ex.example_id}.rgb").write_bytes(image_to_bytes(ex.image))
            seed_txt = "" if ex.render_seed is None else str(ex.render_seed)
            lines.append(f"{ex.example_id}\t{ex.label.value}\t{ex.source}"
                         f"\t{ex.timestamp}\t{seed_txt}")
        (root / "manifest.tsv").write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, root: str | Path) -> "DatasetStore":
        root = Path(root)
        text = (root / "manifest.tsv").read_text().splitlines()
        if not text or not text[0].startswith("# store_seed="):
            raise ValueError(f"bad manifest at {root}")
        store = cls(seed=int(text[0].split("=", 1)[1]))
        for line in text[1:]:
            if not line or line.startswith("id\t"):
                continue
            eid, label, source, ts, seed_txt = line.split("\t")
            label_t = GraspType.from_name(label)
            img = image_from_bytes((root / label / f"{eid}.rgb").read_bytes())
            ex = LabeledExample(int(eid), img, label_t, source, int(ts),
                                int(seed_txt) if seed_txt else None)
            store.examples.append(ex)
        store._next_id = 1 + max((e.example_id for e in store.examples), default=-1)
        return store


def generate_corpus(classes, n_per_class: int, seed: int,
                    jitter_px: float = 3.0, hue_jitter_deg: float = 12.0,
                    scale_lo: float = 0.8, scale_hi: float = 1.2,
                    rotation_sigma: float = 0.12) -> DatasetStore:
    """Seed-reproducible store of jittered renders, n per class."""
    if n_per_class < 4:
        raise ValueError("need at least 4 examples per class for a 50/25/25 split")
    store = DatasetStore(seed=seed)
    rng = np.random.default_rng(seed)
    t = 0
    for cls in classes:
        for _ in range(n_per_class):
            spec = ObjectSpec(
                cls=cls,
                scale=float(np.clip(rng.uniform(scale_lo, scale_hi), 0.5, 1.5)),
                jitter_px=jitter_px,
                hue_jitter_deg=hue_jitter_deg,
                rotation=float(rng.normal(0.0, rotation_sigma)),
                seed=int(rng.integers(2**31)),
            )
            store.add_example(render(spec), CANONICAL_GRASP[cls],
                              source="scripted", timestamp=t, render_seed=spec.seed)
            t += 1
    return store
