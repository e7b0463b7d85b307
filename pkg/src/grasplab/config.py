"""Runtime configuration: INI-style key/value file over dataclass defaults.

Everything an experimenter is expected to turn (jitter magnitudes, debounce
lengths, PID gains, grasp setpoints, training budget) lives here rather
than in code.  ``config_hash`` stamps experiment outputs so results stay
traceable to the exact configuration that produced them.
"""
from __future__ import annotations

import configparser
import hashlib
import io
from dataclasses import dataclass, field
from pathlib import Path

from .actions import GraspType
from .handsim.hand import GRASP_SETPOINTS
from .handsim.motor import DEFAULT_GAINS, PidGains


@dataclass
class RenderConfig:
    jitter_px: float = 3.0
    hue_jitter_deg: float = 12.0
    scale_lo: float = 0.8
    scale_hi: float = 1.2
    rotation_sigma: float = 0.12


@dataclass
class EmgConfig:
    noise_sigma: float = 0.05
    rejection_radius: float = 0.45
    debounce_windows: int = 3


@dataclass
class TrainConfig:
    restarts: int = 5
    max_epochs: int = 200
    patience: int = 20
    min_epochs: int = 10


@dataclass
class OrchestratorConfig:
    override_debounce_ms: int = 500
    frame_staleness_ms: int = 500
    auto_retrain_every: int = 0     # 0 disables auto-trigger
    frame_rate_hz: int = 10


@dataclass
class GraspLabConfig:
    render: RenderConfig = field(default_factory=RenderConfig)
    emg: EmgConfig = field(default_factory=EmgConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    orchestrator: OrchestratorConfig = field(default_factory=OrchestratorConfig)
    gains: list[PidGains] = field(default_factory=lambda: [DEFAULT_GAINS] * 6)
    setpoints: dict[GraspType, tuple[float, ...]] = field(
        default_factory=lambda: dict(GRASP_SETPOINTS))

    def dumps(self) -> str:
        """Canonical text form; the basis of the config hash."""
        cp = configparser.ConfigParser()
        cp["render"] = {k: repr(v) for k, v in vars(self.render).items()}
        cp["emg"] = {k: repr(v) for k, v in vars(self.emg).items()}
        cp["train"] = {k: repr(v) for k, v in vars(self.train).items()}
        cp["orchestrator"] = {k: repr(v)
                              for k, v in vars(self.orchestrator).items()}
        for i, g in enumerate(self.gains):
            cp[f"motor.{i}"] = {
                "kp": repr(g.kp), "ki": repr(g.ki), "kd": repr(g.kd),
                "integral_clamp": repr(g.integral_clamp),
            }
        cp["setpoints"] = {
            g.value: ",".join(repr(float(x)) for x in self.setpoints[g])
            for g in GraspType}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    def config_hash(self) -> str:
        return hashlib.sha256(self.dumps().encode()).hexdigest()[:12]

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path: str | Path | None = None) -> "GraspLabConfig":
        cfg = cls()
        if path is None:
            return cfg
        cp = configparser.ConfigParser()
        with open(path) as fh:
            cp.read_file(fh)

        def fill(obj, section):
            if not cp.has_section(section):
                return
            for key in cp[section]:
                if not hasattr(obj, key):
                    raise KeyError(f"unknown option [{section}] {key}")
                current = getattr(obj, key)
                setattr(obj, key, type(current)(cp[section][key]))

        fill(cfg.render, "render")
        fill(cfg.emg, "emg")
        fill(cfg.train, "train")
        fill(cfg.orchestrator, "orchestrator")
        for i in range(6):
            sec = f"motor.{i}"
            if cp.has_section(sec):
                d = {k: float(cp[sec][k]) for k in cp[sec]}
                cfg.gains[i] = PidGains(**d)
        if cp.has_section("setpoints"):
            for name in cp["setpoints"]:
                grasp = GraspType.from_name(name)
                vals = tuple(float(v) for v in cp["setpoints"][name].split(","))
                if len(vals) != 6:
                    raise ValueError(f"setpoints for {name} must have 6 values")
                cfg.setpoints[grasp] = vals
        return cfg
