# antenna/pattern.py

from dataclasses import dataclass, field
from functools import lru_cache
import math

import numpy as np
from scipy.integrate import trapezoid

from .element import effective_weight
from .geometry import CodeWord, free_space_wavenumber

# Fixed azimuth grid used to integrate radiated power, independent of the cut grid
DENSE_POINTS = 3601
# Integral of cos^2(theta) * cos(theta) over the elevation range [-pi/2, pi/2]
ELEVATION_FACTOR = 4.0 / 3.0


class PatternError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PatternCut:
    """
    Azimuth cut of the far field for one code.

    complex_field is scaled so that |complex_field|^2 is the linear directivity;
    raw_field keeps the unnormalized element superposition.
    """
    frequency: float
    azimuth_grid: np.ndarray
    complex_field: np.ndarray
    directivity_dbi: np.ndarray
    code: CodeWord
    raw_field: np.ndarray = field(repr=False)
    radiated_power: float = 0.0

    @property
    def normalizable(self):
        return self.radiated_power > 0

    def _check_angle(self, angle_deg):
        grid = self.azimuth_grid
        if not grid[0] <= angle_deg <= grid[-1]:
            raise PatternError(f"Angle {angle_deg} deg outside pattern grid [{grid[0]}, {grid[-1]}]")

    def gain_at(self, angle_deg):
        """Directivity in dBi at `angle_deg`, linear interpolation on the cut grid."""
        self._check_angle(angle_deg)
        if not self.normalizable:
            return -math.inf
        linear = np.abs(self.field_at(angle_deg)) ** 2
        return 10 * math.log10(linear) if linear > 0 else -math.inf

    def field_at(self, angle_deg):
        """Normalized complex field at `angle_deg` (real and imaginary parts interpolated)."""
        self._check_angle(angle_deg)
        grid = self.azimuth_grid
        re = np.interp(angle_deg, grid, self.complex_field.real)
        im = np.interp(angle_deg, grid, self.complex_field.imag)
        return complex(re, im)


def check_grid(grid):
    """Return `grid` as a float array after validating it is a usable azimuth cut."""
    angles = np.atleast_1d(np.asarray(grid, dtype=float))
    if angles.ndim != 1 or angles.size == 0:
        raise PatternError("Azimuth grid must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(angles)):
        raise PatternError("Azimuth grid contains non-finite values")
    if angles[0] < -90.0 or angles[-1] > 90.0 or np.any(np.abs(angles) > 90.0):
        raise PatternError("Azimuth grid must lie within [-90, 90] degrees")
    if np.any(np.diff(angles) <= 0):
        raise PatternError("Azimuth grid must be strictly increasing")
    return angles


def azimuth_grid(step_deg=0.25, start_deg=-90.0, stop_deg=90.0):
    """Evenly spaced grid including both end points."""
    if not step_deg > 0:
        raise PatternError(f"Grid step must be positive, got {step_deg}")
    count = int(round((stop_deg - start_deg) / step_deg)) + 1
    return np.linspace(start_deg, stop_deg, count)


# ==============================
# Element excitations
# ==============================

def upstream_off_counts(bits):
    """Number of shorted elements between the feed and each element."""
    off = 1 - np.asarray(bits, dtype=np.int64)
    counts = np.zeros_like(off)
    if off.shape[-1] > 1:
        counts[..., 1:] = np.cumsum(off, axis=-1)[..., :-1]
    return counts


def element_excitations(geom, model, code, frequency):
    """
    Complex weight of every element for `code`.

    Each element contributes its state-dependent polarizability times the
    guided wave reaching it, including the loading phase of shorted elements
    upstream.
    """
    if len(code) != geom.n_elements:
        raise PatternError(f"Code has {len(code)} bits, geometry has {geom.n_elements} elements")
    bits = code.as_array()
    on = effective_weight(model, 1, frequency)
    off = effective_weight(model, 0, frequency)
    weights = np.where(bits == 1, on, off).astype(complex)
    guided = complex(geom.feed_h0) * np.exp(-1j * geom.beta(frequency) * geom.positions)
    loading = np.exp(-1j * model.off_state_phase_rad * upstream_off_counts(bits))
    return model.dipole_scale_m * weights * guided * loading


def batch_excitations(geom, model, bits, frequency):
    """element_excitations for a (codes x elements) bit matrix."""
    bits = np.asarray(bits, dtype=np.int64)
    on = effective_weight(model, 1, frequency)
    off = effective_weight(model, 0, frequency)
    weights = np.where(bits == 1, on, off).astype(complex)
    guided = complex(geom.feed_h0) * np.exp(-1j * geom.beta(frequency) * geom.positions)
    loading = np.exp(-1j * model.off_state_phase_rad * upstream_off_counts(bits))
    return model.dipole_scale_m * weights * guided[np.newaxis, :] * loading


# ==============================
# Cached propagation terms
# ==============================

def _steering_rows(n_elements, spacing_d, frequency, phi_rad):
    k = free_space_wavenumber(frequency)
    positions = np.arange(n_elements) * spacing_d
    return np.cos(phi_rad)[np.newaxis, :] * np.exp(
        -1j * k * positions[:, np.newaxis] * np.sin(phi_rad)[np.newaxis, :])


@lru_cache(maxsize=64)
def _steering_cached(n_elements, spacing_d, frequency, grid_bytes):
    phi = np.radians(np.frombuffer(grid_bytes, dtype=float))
    rows = _steering_rows(n_elements, spacing_d, frequency, phi)
    rows.setflags(write=False)
    return rows


def steering_matrix(geom, frequency, grid):
    """(elements x angles) matrix of cos(phi)*exp(-j*k*x_n*sin(phi))."""
    angles = np.ascontiguousarray(grid, dtype=float)
    return _steering_cached(geom.n_elements, geom.spacing_d, float(frequency), angles.tobytes())


@lru_cache(maxsize=16)
def _power_gram(n_elements, spacing_d, frequency):
    phi = np.linspace(-math.pi / 2, math.pi / 2, DENSE_POINTS)
    rows = _steering_rows(n_elements, spacing_d, frequency, phi)
    step = phi[1] - phi[0]
    quad = np.full(DENSE_POINTS, step)
    quad[[0, -1]] = step / 2
    gram = ELEVATION_FACTOR * (rows * quad) @ rows.conj().T
    gram.setflags(write=False)
    return gram


def radiated_power(geom, frequency, weights):
    """
    Power radiated into the front half space for element weights `weights`.

    Works on one weight vector or a (codes x elements) matrix.
    """
    gram = _power_gram(geom.n_elements, geom.spacing_d, float(frequency))
    w = np.asarray(weights)
    if w.ndim == 1:
        return max(float(np.real(w @ gram @ w.conj())), 0.0)
    return np.maximum(np.real(np.einsum('km,mn,kn->k', w, gram, w.conj())), 0.0)


# ==============================
# Patterns
# ==============================

def array_pattern(geom, model, code, frequency, grid):
    """
    Far-field azimuth cut of the element row driven by `code`.

    :param geom: GuideGeometry of the row.
    :param model: ElementModel of every element.
    :param code: CodeWord with one bit per element.
    :param frequency: Operating frequency in Hz.
    :param grid: Strictly increasing azimuth angles in degrees within [-90, 90].
    :return: PatternCut; a code that radiates nothing gives a null cut with
        zero field, -inf dBi and radiated_power 0.
    """
    angles = check_grid(grid)
    if not frequency > 0:
        raise PatternError(f"Frequency must be positive, got {frequency}")
    weights = element_excitations(geom, model, code, frequency)
    raw = weights @ steering_matrix(geom, frequency, angles)
    power = radiated_power(geom, frequency, weights) if np.any(weights != 0) else 0.0

    if power > 0:
        normalized = raw * math.sqrt(4 * math.pi / power)
        with np.errstate(divide='ignore'):
            dbi = 10 * np.log10(np.abs(normalized) ** 2)
    else:
        normalized = np.zeros_like(raw)
        dbi = np.full(angles.shape, -np.inf)
    return PatternCut(
        frequency=float(frequency),
        azimuth_grid=angles,
        complex_field=normalized,
        directivity_dbi=dbi,
        code=code,
        raw_field=raw,
        radiated_power=power,
    )


def code_fields(geom, model, bits, frequency, grid):
    """
    Normalized complex fields of many codes at once.

    :param bits: (codes x elements) array of radiation states.
    :return: (codes x angles) array; codes that radiate nothing give zero rows.
    """
    angles = check_grid(grid)
    weights = batch_excitations(geom, model, bits, frequency)
    raw = weights @ steering_matrix(geom, frequency, angles)
    power = radiated_power(geom, frequency, weights)
    scale = np.zeros_like(power)
    radiating = power > 0
    scale[radiating] = np.sqrt(4 * math.pi / power[radiating])
    return raw * scale[:, np.newaxis]
