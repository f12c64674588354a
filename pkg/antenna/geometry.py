# antenna/geometry.py

from dataclasses import dataclass
import cmath
import math

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT


class GeometryError(ValueError):
    pass


class CodeWordError(ValueError):
    pass


@dataclass(frozen=True)
class GuideGeometry:
    """
    One-dimensional row of elements fed by a guided reference wave.

    Element n sits at x_n = n * spacing_d; element 0 is nearest the feed.
    """
    n_elements: int = 16
    spacing_d: float = 1.407e-3
    eps_eff: float = 11.81
    feed_h0: complex = 1.0 + 0.0j

    def __post_init__(self):
        if not isinstance(self.n_elements, (int, np.integer)) or self.n_elements < 1:
            raise GeometryError(f"n_elements must be a positive integer, got {self.n_elements!r}")
        if not self.spacing_d > 0:
            raise GeometryError(f"spacing_d must be positive, got {self.spacing_d}")
        if not self.eps_eff >= 1:
            raise GeometryError(f"eps_eff must be at least 1, got {self.eps_eff}")
        if not abs(self.feed_h0) > 0:
            raise GeometryError("feed_h0 must be non-zero")

    @classmethod
    def anchored(cls, n_elements, spacing_d, frequency, order=1, feed_h0=1.0 + 0.0j):
        """
        Geometry whose guided phase step is beta*d = 2*pi*order at `frequency`.

        An all-radiating code then points exactly at broadside.
        """
        if not spacing_d > 0 or not frequency > 0:
            raise GeometryError("spacing_d and frequency must be positive")
        eps_eff = (order * SPEED_OF_LIGHT / (frequency * spacing_d)) ** 2
        return cls(n_elements=n_elements, spacing_d=spacing_d, eps_eff=eps_eff, feed_h0=feed_h0)

    @property
    def positions(self):
        return np.arange(self.n_elements) * self.spacing_d

    def beta(self, frequency):
        """Guided propagation constant in rad/m."""
        return 2 * math.pi * math.sqrt(self.eps_eff) * frequency / SPEED_OF_LIGHT

    def phase_step(self, frequency):
        """Guided phase between adjacent elements, beta*d."""
        return self.beta(frequency) * self.spacing_d


def free_space_wavenumber(frequency):
    return 2 * math.pi * frequency / SPEED_OF_LIGHT


def reference_wave(geom, element_index, frequency):
    """Guided wave H0*exp(-j*beta*x_n) arriving at element `element_index`."""
    if not 0 <= element_index < geom.n_elements:
        raise IndexError(f"element_index {element_index} outside 0..{geom.n_elements - 1}")
    if element_index == 0:
        return complex(geom.feed_h0)
    return complex(geom.feed_h0) * cmath.exp(-1j * geom.beta(frequency) * element_index * geom.spacing_d)


@dataclass(frozen=True)
class CodeWord:
    """
    Radiation states of the element row (1 radiating / diode OFF, 0 shorted / diode ON).

    bits[n] drives element n. As an integer, bits[0] is the most significant bit.
    """
    bits: tuple

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            raise CodeWordError("CodeWord needs at least one bit")
        if any(b not in (0, 1) for b in bits):
            raise CodeWordError(f"CodeWord bits must be 0 or 1, got {self.bits!r}")
        object.__setattr__(self, 'bits', bits)

    @classmethod
    def from_int(cls, value, n_bits=16):
        value = int(value)
        if n_bits < 1:
            raise CodeWordError("n_bits must be positive")
        if not 0 <= value < (1 << n_bits):
            raise CodeWordError(f"{value} does not fit in {n_bits} bits")
        return cls(tuple((value >> (n_bits - 1 - n)) & 1 for n in range(n_bits)))

    @classmethod
    def from_string(cls, text):
        text = text.strip()
        if not text or any(ch not in '01' for ch in text):
            raise CodeWordError(f"Not a bit string: {text!r}")
        return cls(tuple(int(ch) for ch in text))

    @classmethod
    def all_ones(cls, n_bits=16):
        return cls((1,) * n_bits)

    @classmethod
    def all_zeros(cls, n_bits=16):
        return cls((0,) * n_bits)

    def __len__(self):
        return len(self.bits)

    def __str__(self):
        return ''.join(str(b) for b in self.bits)

    def to_int(self):
        value = 0
        for b in self.bits:
            value = (value << 1) | b
        return value

    def to_hex(self):
        width = (len(self.bits) + 3) // 4
        return f"0x{self.to_int():0{width}X}"

    def complement(self):
        return CodeWord(tuple(1 - b for b in self.bits))

    def rotate(self, shift=1):
        """Cyclic rotation towards the load end: element n moves to element n+shift."""
        shift %= len(self.bits)
        return CodeWord(self.bits[-shift:] + self.bits[:-shift]) if shift else self

    @property
    def n_on(self):
        return sum(self.bits)

    def as_array(self):
        return np.array(self.bits, dtype=np.uint8)
