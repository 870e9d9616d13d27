"""Far-field and near-field-fed radiation pattern cuts plus lobe metrics.

A pattern cut samples the complex array factor along theta in a fixed
azimuth plane. Signed theta covers both half-planes of the cut: negative
theta is the phi+180 side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import ArrayGeometry, Direction, Point3, distance_grid, element_grid, projection_grid
from .masks import CodingMask, PhaseMask


@dataclass(frozen=True)
class UnitCellReflection:
    """Per-state reflection coefficient of the unit cell.

    Magnitudes are linear in (0, 1]; phases in degrees. The ideal default
    is lossless with an exact 180 degree state difference.
    """

    magnitude_state0: float = 1.0
    magnitude_state1: float = 1.0
    phase_state0_deg: float = 0.0
    phase_state1_deg: float = 180.0

    def __post_init__(self) -> None:
        for mag in (self.magnitude_state0, self.magnitude_state1):
            if not (0.0 < mag <= 1.0):
                raise DomainError(f"reflection magnitude must be in (0, 1], got {mag}")

    @classmethod
    def measured(cls) -> "UnitCellReflection":
        """Worst-case fabricated cell: 3 dB reflection loss, 30 deg phase skew."""
        mag = 10.0 ** (-3.0 / 20.0)
        return cls(mag, mag, 0.0, 210.0)

    def state_coefficients(self) -> tuple[complex, complex]:
        c0 = self.magnitude_state0 * np.exp(1j * math.radians(self.phase_state0_deg))
        c1 = self.magnitude_state1 * np.exp(1j * math.radians(self.phase_state1_deg))
        return complex(c0), complex(c1)


@dataclass(frozen=True)
class FeedSpec:
    """Feed phase center and its cosine-power illumination exponent."""

    position: Point3
    q_f: float = 7.0

    def __post_init__(self) -> None:
        if not (self.position.z > 0):
            raise DomainError(f"feed must sit off the surface (z > 0), got z={self.position.z}")
        if self.q_f < 0:
            raise DomainError(f"q_f must be >= 0, got {self.q_f}")


@dataclass(frozen=True, eq=False)
class PatternCut:
    """Sampled complex field over signed theta in one azimuth plane.

    gain_db is normalized so the maximum sample is exactly 0 dB.
    """

    phi_plane_deg: float
    theta_deg: np.ndarray
    field: np.ndarray
    gain_db: np.ndarray

    def __post_init__(self) -> None:
        th = np.asarray(self.theta_deg, dtype=float)
        if th.ndim != 1 or th.size == 0:
            raise DomainError("theta grid must be a nonempty 1-D array")
        if np.any(np.diff(th) <= 0):
            raise DomainError("theta grid must be strictly increasing")
        if th[0] < -90.0 or th[-1] > 90.0:
            raise DomainError("theta grid must lie within [-90, 90]")

    def __len__(self) -> int:
        return len(self.theta_deg)


@dataclass(frozen=True)
class PatternMetrics:
    main_lobe_deg: float
    peak_db_raw: float
    mirror_lobe_db: float
    sidelobe_level_db: float
    degenerate: bool = False


def default_theta_grid(step_deg: float = 0.25) -> np.ndarray:
    """Signed theta grid over [-90, 90]; the default 0.25 deg step gives a
    grid that is exactly symmetric about zero in floating point."""
    count = int(round(180.0 / step_deg)) + 1
    return np.linspace(-90.0, 90.0, count)


def _mask_coefficients(mask, cell: UnitCellReflection) -> np.ndarray:
    """Complex per-element reflection coefficients for either mask kind.

    CodingMask uses the cell's two states; PhaseMask is treated as an ideal
    continuous surface with unit magnitude.
    """
    if isinstance(mask, CodingMask):
        c0, c1 = cell.state_coefficients()
        return np.where(mask.bits == 1, c1, c0)
    if isinstance(mask, PhaseMask):
        return np.exp(1j * np.radians(mask.phases_deg))
    raise DomainError(f"unsupported mask type {type(mask).__name__}")


def _normalize(phi_plane_deg: float, theta_deg: np.ndarray, field: np.ndarray) -> PatternCut:
    mags = np.abs(field)
    peak = mags.max()
    with np.errstate(divide="ignore"):
        gain_db = 20.0 * np.log10(mags / peak) if peak > 0 else np.full_like(mags, -np.inf)
    return PatternCut(phi_plane_deg, theta_deg, field, gain_db)


def _observation_phase(
    geom: ArrayGeometry, phi_plane_deg: float, theta_deg: np.ndarray, wavelength: float
) -> np.ndarray:
    """k0 * (observation projection) for every (theta sample, element).

    Shape (T, M*N). Signed theta enters through sin(theta), so the
    symmetric half of the cut is the exact floating-point mirror.
    """
    k0 = 2 * np.pi / wavelength
    ph = math.radians(phi_plane_deg)
    X, Y = element_grid(geom)
    w = (X * math.cos(ph) + Y * math.sin(ph)).ravel()
    sin_t = np.sin(np.radians(np.asarray(theta_deg, dtype=float)))
    return k0 * sin_t[:, None] * w[None, :]


def array_factor_far(
    geom: ArrayGeometry,
    mask,
    cell: UnitCellReflection,
    incidence: Direction,
    phi_plane_deg: float,
    theta_grid_deg: np.ndarray,
    wavelength: float,
) -> PatternCut:
    """Far-field array factor of the coded aperture under plane-wave
    incidence, evaluated along one azimuth cut.

    Each element contributes its reflection coefficient times the path
    phase k0*(incidence projection - observation projection).
    """
    if not (wavelength > 0):
        raise DomainError(f"wavelength must be > 0, got {wavelength}")
    if mask.geom != geom:
        raise DomainError("mask geometry does not match the array geometry")
    theta = np.asarray(theta_grid_deg, dtype=float)
    if theta.size == 0:
        raise DomainError("theta grid must be nonempty")
    k0 = 2 * np.pi / wavelength
    coeff = _mask_coefficients(mask, cell).ravel()
    proj_in = projection_grid(geom, incidence).ravel()
    base = coeff * np.exp(-1j * k0 * proj_in)
    obs = _observation_phase(geom, phi_plane_deg, theta, wavelength)
    # elementwise product + per-row sum keeps the reduction partition-
    # independent (bit-identical under any grid split), unlike a matmul
    field = (np.exp(1j * obs) * base[None, :]).sum(axis=1)
    return _normalize(phi_plane_deg, theta, field)


def feed_offset_angle(feed: FeedSpec, elem: Point3) -> float:
    """Off-boresight angle of an element as seen from a nadir-pointing feed,
    degrees in [0, 90)."""
    rho = math.hypot(feed.position.x - elem.x, feed.position.y - elem.y)
    return math.degrees(math.atan2(rho, feed.position.z))


def pattern_nearfield(
    geom: ArrayGeometry,
    mask,
    cell: UnitCellReflection,
    feed: FeedSpec,
    q_e: float,
    phi_plane_deg: float,
    theta_grid_deg: np.ndarray,
    wavelength: float,
) -> PatternCut:
    """Radiation cut of the aperture illuminated by a close-in feed.

    Each element contributes cos(theta)^(2*q_e) (element taper, applied
    once for the aperture and once for the per-element observation angle,
    which coincide for a distant observer) times cos(theta_feed)^q_f / r
    (feed illumination and spherical spreading) times its reflection
    coefficient and the path phase k0*(r - observation projection).
    """
    if not (wavelength > 0):
        raise DomainError(f"wavelength must be > 0, got {wavelength}")
    if mask.geom != geom:
        raise DomainError("mask geometry does not match the array geometry")
    if q_e < 0:
        raise DomainError(f"q_e must be >= 0, got {q_e}")
    theta = np.asarray(theta_grid_deg, dtype=float)
    if theta.size == 0:
        raise DomainError("theta grid must be nonempty")
    k0 = 2 * np.pi / wavelength
    r_feed = distance_grid(geom, feed.position)
    cos_feed = feed.position.z / r_feed
    amp = (cos_feed**feed.q_f) / r_feed
    coeff = _mask_coefficients(mask, cell)
    base = (amp * coeff * np.exp(-1j * k0 * r_feed)).ravel()
    obs = _observation_phase(geom, phi_plane_deg, theta, wavelength)
    field = (np.exp(1j * obs) * base[None, :]).sum(axis=1)
    envelope = np.clip(np.cos(np.radians(theta)), 0.0, None) ** (2.0 * q_e)
    return _normalize(phi_plane_deg, theta, envelope * field)


def pattern_metrics(cut: PatternCut) -> PatternMetrics:
    """Main lobe, raw peak level, mirror lobe, and sidelobe level of a cut.

    The main lobe is the argmax sample; exact ties (within 1e-12 dB, which
    covers the bit-identical mirror lobes of 1-bit masks) resolve toward
    positive theta. The mirror lobe is the maximum within 5 degrees of the
    negated main lobe. The sidelobe level is the highest sample outside the
    first nulls bracketing the main lobe, -inf if nothing radiates there.
    """
    if len(cut) == 0:
        raise DomainError("empty pattern cut")
    gain = cut.gain_db
    theta = cut.theta_deg
    mags = np.abs(cut.field)
    peak_raw = mags.max()
    peak_db_raw = float(20.0 * np.log10(peak_raw)) if peak_raw > 0 else -np.inf

    if mags.max() - mags.min() <= 1e-15 * max(mags.max(), 1.0):
        return PatternMetrics(math.nan, peak_db_raw, math.nan, math.nan, degenerate=True)

    tied = np.flatnonzero(gain >= gain.max() - 1e-12)
    main_idx = int(tied[np.argmax(theta[tied])])
    main_deg = float(theta[main_idx])

    mirror_window = np.abs(theta - (-main_deg)) <= 5.0
    mirror_db = float(gain[mirror_window].max()) if mirror_window.any() else -math.inf

    lo = main_idx
    while lo > 0 and mags[lo - 1] < mags[lo]:
        lo -= 1
    hi = main_idx
    while hi < len(mags) - 1 and mags[hi + 1] < mags[hi]:
        hi += 1
    outside = np.ones(len(mags), dtype=bool)
    outside[lo : hi + 1] = False
    sll_db = float(gain[outside].max()) if outside.any() else -math.inf

    return PatternMetrics(main_deg, peak_db_raw, mirror_db, sll_db)


def write_pattern_csv(cut: PatternCut, path, comments: dict | None = None) -> None:
    """CSV cut: `#`-prefixed context lines, then theta_deg,gain_db,re,im rows."""
    lines = []
    for key, value in (comments or {}).items():
        lines.append(f"# {key} = {value}")
    lines.append("theta_deg,gain_db,re,im")
    for th, g, f in zip(cut.theta_deg, cut.gain_db, cut.field):
        lines.append(f"{th:.4f},{g:.6f},{f.real:.9e},{f.imag:.9e}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
