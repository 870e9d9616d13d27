"""Codebook-sweep user localization: apply each steering mask, record the
received signal strength, and read the user's angle off the argmax entry."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import Direction, Point3
from .linkbudget import LinkScenario, received_power
from .masks import Codebook


@dataclass(frozen=True)
class NoiseModel:
    """Per-entry RSSI jitter: none, or zero-mean gaussian in dB."""

    kind: str = "none"
    sigma_db: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("none", "gaussian_db"):
            raise DomainError(f"unknown noise kind {self.kind!r}")
        if self.sigma_db < 0:
            raise DomainError(f"sigma_db must be >= 0, got {self.sigma_db}")


@dataclass(frozen=True, eq=False)
class SweepTrace:
    """Per-codebook-entry RSSI, in codebook order."""

    steer_deg: np.ndarray
    rssi_dbm: np.ndarray

    def __post_init__(self) -> None:
        if len(self.steer_deg) != len(self.rssi_dbm) or len(self.steer_deg) == 0:
            raise DomainError("trace angle and RSSI sequences must be nonempty and equal length")

    def __len__(self) -> int:
        return len(self.steer_deg)

    def entries(self):
        return list(zip(self.steer_deg.tolist(), self.rssi_dbm.tolist()))


def ue_point(true_ue, scenario: LinkScenario) -> Point3:
    """Resolve the user position: a Point3 passes through; a Direction is
    placed at the scenario's rx range from the array center."""
    if isinstance(true_ue, Point3):
        return true_ue
    if isinstance(true_ue, Direction):
        center = scenario.geom.center()
        d = math.dist(
            (scenario.rx.x, scenario.rx.y, scenario.rx.z), (center.x, center.y, center.z)
        )
        v = true_ue.unit_vector()
        return Point3(center.x + d * v[0], center.y + d * v[1], center.z + d * v[2])
    raise DomainError(f"true_ue must be a Direction or Point3, got {type(true_ue).__name__}")


def simulate_sweep(
    codebook: Codebook,
    true_ue,
    scenario: LinkScenario,
    noise: NoiseModel = NoiseModel(),
    seed: int | None = None,
) -> SweepTrace:
    """Sequentially apply every codebook mask and record the RSSI toward the
    true user position.

    Each entry's RSSI is the single-pass received power (the entry's
    two-state phases inside the coherent sum), which is the only accounting
    in which the applied mask discriminates entries. Deterministic for a
    fixed seed.
    """
    rx = ue_point(true_ue, scenario)
    base = scenario.with_rx(rx)
    rssi = np.array(
        [
            received_power(base.with_mask(entry.mask), quantization="single_pass").received_power_dbm
            for entry in codebook.entries
        ]
    )
    if noise.kind == "gaussian_db" and noise.sigma_db > 0:
        rng = np.random.default_rng(seed)
        rssi = rssi + rng.normal(0.0, noise.sigma_db, len(rssi))
    return SweepTrace(codebook.angles_deg(), rssi)


def estimate_angle(trace: SweepTrace) -> float:
    """Steer angle of the maximal-RSSI entry; exact ties resolve to the
    smaller angle (first maximum in ascending-angle order)."""
    if len(trace) == 0:
        raise DomainError("empty sweep trace")
    return float(trace.steer_deg[int(np.argmax(trace.rssi_dbm))])


def rmse(estimates_deg, truths_deg) -> float:
    """Root-mean-square error between angle estimates and truths, degrees."""
    est = np.asarray(estimates_deg, dtype=float)
    tru = np.asarray(truths_deg, dtype=float)
    if est.shape != tru.shape or est.size == 0:
        raise DomainError("estimates and truths must be nonempty and equal length")
    return float(np.sqrt(np.mean((est - tru) ** 2)))


def write_sweep_csv(trace: SweepTrace, path, comments: dict | None = None) -> None:
    """CSV trace: `#`-prefixed context lines, then steer_deg,rssi_dbm rows."""
    lines = []
    for key, value in (comments or {}).items():
        lines.append(f"# {key} = {value}")
    lines.append("steer_deg,rssi_dbm")
    for angle, rssi in zip(trace.steer_deg, trace.rssi_dbm):
        lines.append(f"{angle:.4f},{rssi:.9f}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
