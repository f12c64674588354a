# link/qpsk.py

import numpy as np

SCALE = 1 / np.sqrt(2)


class ModulationError(ValueError):
    pass


def qpsk_map(bits):
    """
    Gray QPSK, unit mean energy: bit pair (b0, b1) -> ((1-2*b0) + j*(1-2*b1)) / sqrt(2).

    00 lands in the first quadrant.
    """
    b = np.asarray(bits, dtype=np.int64).ravel()
    if b.size % 2:
        raise ModulationError(f"QPSK needs an even number of bits, got {b.size}")
    pairs = b.reshape(-1, 2)
    return SCALE * ((1 - 2 * pairs[:, 0]) + 1j * (1 - 2 * pairs[:, 1]))


def qpsk_demap(symbols, noise_var=1.0):
    """
    Per-bit log-likelihood ratios (positive favours 0) for each received symbol.

    :param noise_var: Complex noise variance per symbol after matched filtering.
    """
    if not noise_var > 0:
        raise ModulationError(f"noise_var must be positive, got {noise_var}")
    s = np.asarray(symbols, dtype=complex).ravel()
    scale = 2 * np.sqrt(2) / noise_var
    return np.column_stack((s.real, s.imag)).ravel() * scale


def hard_decisions(soft):
    return (np.asarray(soft) < 0).astype(np.uint8)


def evm_percent(received, reference):
    """RMS error vector relative to the RMS reference magnitude, in percent."""
    rx = np.asarray(received, dtype=complex)
    ref = np.asarray(reference, dtype=complex)
    if rx.shape != ref.shape or ref.size == 0:
        raise ModulationError("EVM needs equally sized non-empty symbol arrays")
    error = np.mean(np.abs(rx - ref) ** 2)
    return float(100 * np.sqrt(error / np.mean(np.abs(ref) ** 2)))


def add_awgn(symbols, esn0_db, rng):
    """Complex white noise at the given symbol-energy-to-noise ratio (unit-energy symbols)."""
    s = np.asarray(symbols, dtype=complex)
    variance = 10 ** (-esn0_db / 10)
    noise = rng.standard_normal(s.shape) + 1j * rng.standard_normal(s.shape)
    return s + noise * np.sqrt(variance / 2)
