"""Headless reproductions of the two system evaluations plus a control
health report.  Every command emits plain TSV under an output directory,
with the config hash and seed stamped in the header line so that a fixed
seed always produces byte-identical files.
"""
from __future__ import annotations

import statistics
import time
from pathlib import Path

import numpy as np

from .actions import GraspType
from .classifier import train_scg
from .config import GraspLabConfig
from .handsim.hand import GRASP_SETPOINTS, HandSim, SimObject, execute_grasp
from .handsim.motor import COUNT_RADIANS
from .nlu import (AmbiguousGroundingError, NoGroundingError, ParseFailure)
from .nlu.ground import Grounder, data_path, load_default_corpus
from .vision import (CANONICAL_GRASP, ObjectClass, ObjectSpec,
                     generate_corpus, render)

#: Training budget for the adaptation study: two restarts and a validation
#: target keep the 35-training sweep inside a desk-scale time budget.
ADAPT_TRAIN_KW = dict(restarts=2, max_epochs=45, patience=8, min_epochs=12,
                      val_loss_target=0.3)

PRESENTED_CLASSES = list(ObjectClass)[:6]   # banana haldback as the novel object
EVAL_RENDERS_PER_CLASS = 10


def _header(config: GraspLabConfig, seed) -> str:
    return f"# config_hash={config.config_hash()} seed={seed}"


def _write(out_dir: str | Path, name: str, lines: list[str]) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text("\n".join(lines) + "\n")
    return path


# --------------------------------------------------------------- NLU suite --
def load_suite():
    """(trained, untrained) suite entries as (sentence, expectation)."""
    trained = [(ex.sentence, ex.action.name) for ex in load_default_corpus()]
    untrained = []
    for raw in data_path("suite_untrained.tsv").read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        sentence, expected = line.split("\t")
        untrained.append((sentence, expected))
    return trained, untrained


def classify_outcome(grounder: Grounder, sentence: str):
    """(outcome, detail) where outcome is success|fail-parse|fail-understanding."""
    try:
        result = grounder.ground(sentence)
    except ParseFailure as err:
        return "fail-parse", err.kind
    except (NoGroundingError, AmbiguousGroundingError) as err:
        return "fail-understanding", type(err).__name__
    return "success", result.action.name


def run_nlu_suite(grammar: str = "extended", repetitions: int = 10,
                  out_dir: str | Path = "out",
                  config: GraspLabConfig | None = None):
    """Score every suite sentence under the given grammar.

    Repetition counts mirror the original ten-trials-per-sentence protocol;
    the text path is deterministic so rates land on 0 or 100.
    """
    config = config or GraspLabConfig()
    grounder = Grounder.default(grammar)
    trained, untrained = load_suite()
    rows = []
    latencies = []
    for group, entries in (("trained", trained), ("untrained", untrained)):
        for sentence, expected in entries:
            outcomes = []
            for _ in range(repetitions):
                outcome, detail = classify_outcome(grounder, sentence)
                outcomes.append((outcome, detail))
            try:
                latencies.append(grounder.ground(sentence).latency_ms)
            except Exception:
                pass
            n = len(outcomes)
            pct = {kind: 100 * sum(o == kind for o, _ in outcomes) // n
                   for kind in ("success", "fail-parse", "fail-understanding")}
            rows.append({
                "group": group, "sentence": sentence, "expected": expected,
                "pct_success": pct["success"],
                "pct_fail_parse": pct["fail-parse"],
                "pct_fail_understanding": pct["fail-understanding"],
                "detail": outcomes[0][1],
            })
    lines = [_header(config, seed=f"{grammar}-grammar"),
             "group\tsentence\texpected\tpct_success\tpct_fail_parse"
             "\tpct_fail_understanding\tdetail"]
    for r in rows:
        lines.append(f"{r['group']}\t{r['sentence']}\t{r['expected']}"
                     f"\t{r['pct_success']}\t{r['pct_fail_parse']}"
                     f"\t{r['pct_fail_understanding']}\t{r['detail']}")
    path = _write(out_dir, f"nlu_suite_{grammar}.tsv", lines)
    median_latency = statistics.median(latencies) if latencies else None
    return rows, path, median_latency


# ------------------------------------------------------------- adaptation --
def evaluation_renders(seed: int):
    """Held-out jittered renders per class, disjoint from training seeds."""
    out = {}
    rng = np.random.default_rng((seed, 0xE7A1))
    for cls in ObjectClass:
        images = []
        for _ in range(EVAL_RENDERS_PER_CLASS):
            spec = ObjectSpec(
                cls, scale=float(np.clip(rng.uniform(0.8, 1.2), 0.5, 1.5)),
                rotation=float(rng.normal(0.0, 0.12)),
                seed=int(rng.integers(2**31)))
            images.append(render(spec))
        out[cls] = images
    return out


def mean_posteriors(model, images) -> np.ndarray:
    return np.mean([model.posterior(img) for img in images], axis=0)


def class_accuracy(model, images, desired: GraspType) -> float:
    hits = sum(int(np.argmax(model.posterior(img))) == desired.index
               for img in images)
    return hits / len(images)


def run_adaptation(seed: int = 0, increments: int = 6, n_per_class: int = 120,
                   step_size: int = 20, out_dir: str | Path = "out",
                   config: GraspLabConfig | None = None,
                   train_kw: dict | None = None):
    """One seed of the novel-object study.

    Trains on six classes, then adds the held-out class (banana, labeled
    tripod) in increments, retraining and re-evaluating every class after
    each, exactly the loop the adaptive controller runs offline.
    """
    config = config or GraspLabConfig()
    kw = dict(ADAPT_TRAIN_KW)
    kw.update(train_kw or {})
    store = generate_corpus(PRESENTED_CLASSES, n_per_class, seed=seed,
                            jitter_px=config.render.jitter_px,
                            hue_jitter_deg=config.render.hue_jitter_deg)
    eval_set = evaluation_renders(seed)

    curve = []  # one row per step per class
    for step in range(increments + 1):
        if step > 0:
            extra = generate_corpus([ObjectClass.BANANA], step_size,
                                    seed=(seed + 1) * 100_000 + step,
                                    jitter_px=config.render.jitter_px,
                                    hue_jitter_deg=config.render.hue_jitter_deg)
            for ex in extra.examples:
                store.add_example(ex.image, ex.label, "gui", ex.timestamp,
                                  ex.render_seed)
        model, _ = train_scg(store, seed=seed, **kw)
        for cls in ObjectClass:
            post = mean_posteriors(model, eval_set[cls])
            desired = CANONICAL_GRASP[cls]
            curve.append({
                "step": step,
                "banana_examples": step * step_size,
                "object": cls.value,
                "desired": desired.value,
                "desired_posterior": float(post[desired.index]),
                "argmax": list(GraspType)[int(post.argmax())].value,
                "accuracy": class_accuracy(model, eval_set[cls], desired),
                "posteriors": [float(p) for p in post],
            })

    lines = [_header(config, seed),
             "step\tbanana_examples\tobject\tdesired\tdesired_posterior"
             "\targmax\taccuracy\t"
             + "\t".join(f"p_{g.value}" for g in GraspType)]
    for r in curve:
        posts = "\t".join(f"{p:.6f}" for p in r["posteriors"])
        lines.append(f"{r['step']}\t{r['banana_examples']}\t{r['object']}"
                     f"\t{r['desired']}\t{r['desired_posterior']:.6f}"
                     f"\t{r['argmax']}\t{r['accuracy']:.3f}\t{posts}")
    path = _write(out_dir, f"adaptation_seed{seed}.tsv", lines)
    return curve, path


# ---------------------------------------------------------------- control --
def step_response(motor_index: int = 0, target: float = 1.0,
                  config: GraspLabConfig | None = None, ticks: int = 2500):
    config = config or GraspLabConfig()
    sim = HandSim()
    sim.config.gains = list(config.gains)
    setpoints = [0.0] * 6
    setpoints[motor_index] = target
    sim.set_setpoints(setpoints)
    hist = []
    for t in range(ticks):
        sim.step(t)
        hist.append(sim.motors[motor_index].angle)
    a = np.array(hist)
    band = max(0.02 * target, 0.015)
    inside = np.abs(a - target) <= band
    settle = next((i for i in range(len(a)) if inside[i:].all()), None)
    overshoot = float((a.max() - target) / target * 100.0) if target else 0.0
    return {"settle_ms": settle, "overshoot_pct": overshoot,
            "final_error": float(abs(a[-1] - target))}


def run_control_report(out_dir: str | Path = "out",
                       config: GraspLabConfig | None = None):
    """Step responses per motor, per-grasp settle, spring return, windup."""
    config = config or GraspLabConfig()
    lines = [_header(config, seed=0),
             "check\tsubject\tsettle_ms\tovershoot_pct\tdetail"]
    rows = []

    for i in range(6):
        r = step_response(i, 1.0, config)
        rows.append(("step_1rad", f"motor{i}", r["settle_ms"],
                     r["overshoot_pct"], f"final_err={r['final_error']:.4f}"))

    for grasp in GraspType:
        out = execute_grasp(grasp, None, timeout_s=3.0)
        rows.append(("grasp_settle", grasp.value, out.settle_ticks, 0.0,
                     "no object"))

    # spring return: flex fully, drop duty to zero, wait
    sim = HandSim()
    sim.set_setpoints(GRASP_SETPOINTS[GraspType.CYLINDRICAL])
    for t in range(1500):
        sim.step(t)
    sim.set_setpoints((0.0,) * 6)
    for t in range(1500, 4000):
        sim.step(t)
    max_angle = max(m.angle for m in sim.motors)
    rows.append(("spring_return", "all", 2500, 0.0,
                 f"max_residual={max_angle:.4f}"))

    # stalled grasp: integral must stay clamped, duty bounded
    sim = HandSim(obj=SimObject("cylinder", 0.03))
    sim.set_setpoints(GRASP_SETPOINTS[GraspType.CYLINDRICAL])
    duties = []
    for t in range(2500):
        sim.step(t)
        duties.append(max(abs(m.duty) for m in sim.motors))
    rows.append(("stall_windup", "cylindrical", 2500, 0.0,
                 f"max_duty={max(duties):.3f} "
                 f"late_duty={max(duties[-500:]):.3f}"))

    # quadrature consistency over a full-travel sweep
    sim = HandSim()
    sim.set_setpoints((5.4, 0, 0, 0, 0, 0))
    worst = 0
    for t in range(2500):
        sim.step(t)
        m = sim.motors[0]
        worst = max(worst, abs(m.encoder_count
                               - round(m.angle / COUNT_RADIANS)))
    sim.set_setpoints((0.0,) * 6)
    for t in range(2500, 5000):
        sim.step(t)
        m = sim.motors[0]
        worst = max(worst, abs(m.encoder_count
                               - round(m.angle / COUNT_RADIANS)))
    rows.append(("quadrature", "motor0", 5000, 0.0, f"max_count_err={worst}"))

    for check, subject, settle, overshoot, detail in rows:
        lines.append(f"{check}\t{subject}\t{settle}\t{overshoot:.2f}\t{detail}")
    path = _write(out_dir, "control_report.tsv", lines)
    return rows, path


def timestamped_out(base: str | Path = "out") -> Path:
    stamp = time.strftime("%Y%m%d-%H%M%S")
    return Path(base) / stamp
