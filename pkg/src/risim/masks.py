"""Phase-mask synthesis, 1-bit quantization, and steering codebooks.

Continuous masks come from two closed forms: a plane-wave retargeting
gradient (generalized Snell's law) and a spherical-wavefront compensation
for a feed sitting in the radiating near field. Quantization maps wrapped
phase to the two-state 0/180 degree alphabet.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import (
    ArrayGeometry,
    Direction,
    Point3,
    distance_grid,
    projection_grid,
)


def wrap_deg(phases_deg):
    """Wrap angles in degrees to [0, 360)."""
    w = np.mod(phases_deg, 360.0)
    # guard: mod of a tiny negative can round up to the modulus itself
    return np.where(w >= 360.0, 0.0, w)


@dataclass(frozen=True, eq=False)
class PhaseMask:
    """Continuous per-element phase grid in degrees, wrapped to [0, 360)."""

    geom: ArrayGeometry
    phases_deg: np.ndarray

    def __post_init__(self) -> None:
        ph = np.ascontiguousarray(np.asarray(self.phases_deg, dtype=float))
        shape = (self.geom.m_count, self.geom.n_count)
        if ph.shape != shape:
            raise DomainError(f"phase grid shape {ph.shape} does not match {shape}")
        if not np.all(np.isfinite(ph)):
            raise DomainError("phase grid contains non-finite entries")
        if ph.size and (ph.min() < 0.0 or ph.max() >= 360.0):
            raise DomainError("phases must be wrapped to [0, 360)")
        object.__setattr__(self, "phases_deg", ph)


@dataclass(frozen=True, eq=False)
class CodingMask:
    """1-bit per-element state grid: 0 means 0 degrees, 1 means 180."""

    geom: ArrayGeometry
    bits: np.ndarray

    def __post_init__(self) -> None:
        bits = np.ascontiguousarray(np.asarray(self.bits))
        shape = (self.geom.m_count, self.geom.n_count)
        if bits.shape != shape:
            raise DomainError(f"bit grid shape {bits.shape} does not match {shape}")
        if bits.dtype == bool:
            bits = bits.astype(np.uint8)
        if not np.isin(bits, (0, 1)).all():
            raise DomainError("bit grid entries must be 0 or 1")
        object.__setattr__(self, "bits", bits.astype(np.uint8))

    def phases_deg(self) -> np.ndarray:
        """The two-state phase grid realized by the bits."""
        return self.bits.astype(float) * 180.0


@dataclass(frozen=True)
class CodebookEntry:
    steer_angle: Direction
    mask: CodingMask


@dataclass(frozen=True, eq=False)
class Codebook:
    """Ordered steering masks with strictly increasing steer angles."""

    entries: tuple[CodebookEntry, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise DomainError("codebook must contain at least one entry")
        angles = [e.steer_angle.theta_deg for e in self.entries]
        if any(b <= a for a, b in zip(angles, angles[1:])):
            raise DomainError("codebook angles must be strictly increasing")
        first = self.entries[0].mask.geom
        if any(e.mask.geom != first for e in self.entries):
            raise DomainError("codebook masks must share one geometry")

    def __len__(self) -> int:
        return len(self.entries)

    def angles_deg(self) -> np.ndarray:
        return np.array([e.steer_angle.theta_deg for e in self.entries])


def snell_gradient(
    geom: ArrayGeometry,
    incidence: Direction,
    reflection: Direction,
    wavelength: float,
) -> PhaseMask:
    """Phase gradient that retargets a plane wave between two directions.

    Element (m, n) carries k0 * (proj_in - proj_out) where proj is the
    in-plane projection onto each direction; wrapped to degrees.
    """
    if not (wavelength > 0):
        raise DomainError(f"wavelength must be > 0, got {wavelength}")
    k0 = 2 * np.pi / wavelength
    phase_rad = k0 * (projection_grid(geom, incidence) - projection_grid(geom, reflection))
    return PhaseMask(geom, wrap_deg(np.degrees(phase_rad)))


def nearfield_compensation(
    geom: ArrayGeometry,
    feed: Point3,
    reflection: Direction,
    wavelength: float,
) -> PhaseMask:
    """Continuous phase that collimates a close-in spherical feed wavefront
    into a plane wave along the reflection direction.

    Element (m, n) carries k0 * (feed distance - proj_out), wrapped. The
    raw wrap retains the common distance offset; steering pipelines rotate
    it out before quantization (see recenter_phases).
    """
    if not (wavelength > 0):
        raise DomainError(f"wavelength must be > 0, got {wavelength}")
    if not (feed.z > 0):
        raise DomainError(f"feed must sit off the surface (z > 0), got z={feed.z}")
    k0 = 2 * np.pi / wavelength
    phase_rad = k0 * distance_grid(geom, feed) - k0 * projection_grid(geom, reflection)
    return PhaseMask(geom, wrap_deg(np.degrees(phase_rad)))


def recenter_phases(mask: PhaseMask) -> PhaseMask:
    """Rotate a mask so its circular-mean phase is zero.

    A 1-bit quantizer keeps only the sign of the phase about its bin
    boundaries, so the absolute reference matters: centering the population
    splits it evenly across the two bins and minimizes the pointing bias of
    quantized spherical-compensation masks.
    """
    ph = np.radians(mask.phases_deg)
    mean = np.angle(np.mean(np.exp(1j * ph)))
    return PhaseMask(mask.geom, wrap_deg(np.degrees(ph - mean)))


def quantize_1bit(mask: PhaseMask) -> CodingMask:
    """Two-state quantization: bit 1 exactly when phase is in [90, 270)."""
    ph = mask.phases_deg
    return CodingMask(mask.geom, (ph >= 90.0) & (ph < 270.0))


def farfield_steering_mask(
    geom: ArrayGeometry,
    steer: Direction,
    wavelength: float,
    incidence: Direction = Direction(0.0),
) -> CodingMask:
    """1-bit mask steering a plane wave from `incidence` to `steer`."""
    return quantize_1bit(snell_gradient(geom, incidence, steer, wavelength))


def nearfield_steering_mask(
    geom: ArrayGeometry,
    feed: Point3,
    steer: Direction,
    wavelength: float,
) -> CodingMask:
    """1-bit mask collimating a near-field feed toward `steer`.

    The continuous compensation is recentered before quantization; the raw
    distance offset otherwise biases the quantized beam by a few degrees.
    """
    return quantize_1bit(recenter_phases(nearfield_compensation(geom, feed, steer, wavelength)))


def build_codebook(
    geom: ArrayGeometry,
    feed: Point3,
    wavelength: float,
    start_deg: float,
    stop_deg: float,
    step_deg: float,
) -> Codebook:
    """Steering codebook at start, start+step, ..., <= stop.

    Each entry is the quantized near-field compensation toward that angle,
    which is the mask maximizing received power for a user in that
    direction.
    """
    if step_deg <= 0:
        raise DomainError(f"codebook step must be > 0, got {step_deg}")
    if start_deg > stop_deg:
        raise DomainError(f"empty codebook range [{start_deg}, {stop_deg}]")
    angles = np.arange(start_deg, stop_deg + step_deg / 2, step_deg)
    entries = tuple(
        CodebookEntry(
            Direction(float(a)),
            nearfield_steering_mask(geom, feed, Direction(float(a)), wavelength),
        )
        for a in angles
    )
    return Codebook(entries)


def phase_mask_to_json(mask: PhaseMask) -> str:
    """JSON document with the geometry and the degree grid (outer list over m)."""
    doc = {
        "m_count": mask.geom.m_count,
        "n_count": mask.geom.n_count,
        "periodicity_m": mask.geom.periodicity_m,
        "phases_deg": mask.phases_deg.tolist(),
    }
    return json.dumps(doc, indent=2)


def coding_mask_to_json(mask: CodingMask) -> str:
    """JSON document with the geometry and the 0/1 grid (outer list over m)."""
    doc = {
        "m_count": mask.geom.m_count,
        "n_count": mask.geom.n_count,
        "periodicity_m": mask.geom.periodicity_m,
        "bits": mask.bits.tolist(),
    }
    return json.dumps(doc, indent=2)


def coding_mask_from_json(text: str) -> CodingMask:
    doc = json.loads(text)
    geom = ArrayGeometry(doc["m_count"], doc["n_count"], doc["periodicity_m"])
    return CodingMask(geom, np.array(doc["bits"], dtype=np.uint8))
