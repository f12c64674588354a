# antenna/element.py

from dataclasses import dataclass
import math

import numpy as np


class ElementModelError(ValueError):
    pass


@dataclass(frozen=True)
class ElementModel:
    """
    Lorentzian magnetic polarizability of one meta-element.

    :param f0: Resonant frequency in Hz.
    :param coupling_F: Dimensionless coupling factor.
    :param damping_gamma: Damping factor in rad/s.
    :param off_leakage_rho: Amplitude of a shorted element relative to a radiating one.
    :param dipole_scale_m: Magnetic dipole moment scale (linear, arbitrary units).
    :param off_state_phase_rad: Extra guided-wave phase picked up past each shorted element.
    """
    f0: float = 60.6e9
    coupling_F: float = 1.0
    damping_gamma: float = 2 * math.pi * 3.0e9
    off_leakage_rho: float = 1.0 / 3.0
    dipole_scale_m: float = 1.0
    off_state_phase_rad: float = 0.0

    def __post_init__(self):
        if not self.f0 > 0:
            raise ElementModelError(f"f0 must be positive, got {self.f0}")
        if not self.coupling_F > 0:
            raise ElementModelError(f"coupling_F must be positive, got {self.coupling_F}")
        if not self.damping_gamma > 0:
            raise ElementModelError(f"damping_gamma must be positive, got {self.damping_gamma}")
        if not 0 <= self.off_leakage_rho < 1:
            raise ElementModelError(f"off_leakage_rho must lie in [0, 1), got {self.off_leakage_rho}")
        if not self.dipole_scale_m > 0:
            raise ElementModelError(f"dipole_scale_m must be positive, got {self.dipole_scale_m}")
        if not math.isfinite(self.off_state_phase_rad):
            raise ElementModelError("off_state_phase_rad must be finite")

    @property
    def omega0(self):
        return 2 * math.pi * self.f0


def polarizability(model, omega):
    """
    Return F*w^2 / (w0^2 - w^2 + j*w*gamma).

    Accepts a scalar or an array of angular frequencies.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(~(w > 0)):
        raise ElementModelError("omega must be positive")
    alpha = model.coupling_F * w ** 2 / (model.omega0 ** 2 - w ** 2 + 1j * w * model.damping_gamma)
    if alpha.ndim == 0:
        return complex(alpha)
    return alpha


def effective_weight(model, state, frequency):
    """Polarizability of an element in radiation state `state` (1 radiating, 0 shorted)."""
    if state not in (0, 1):
        raise ElementModelError(f"state must be 0 or 1, got {state!r}")
    alpha = polarizability(model, 2 * math.pi * frequency)
    return alpha if state == 1 else model.off_leakage_rho * alpha
