# link/filters.py

import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import fft as sp_fft

DEFAULT_ROLLOFF = 0.35
MIN_BLOCK = 64


class FilterError(ValueError):
    pass


def rrc_taps(samples_per_symbol, rolloff=DEFAULT_ROLLOFF, span_symbols=12):
    """Unit-energy root-raised-cosine taps spanning `span_symbols` symbols (odd length)."""
    if samples_per_symbol < 1 or span_symbols < 1:
        raise FilterError("samples_per_symbol and span_symbols must be positive")
    if not 0 < rolloff <= 1:
        raise FilterError(f"rolloff must lie in (0, 1], got {rolloff}")
    half = span_symbols * samples_per_symbol // 2
    t = np.arange(-half, half + 1) / samples_per_symbol
    a = rolloff
    h = np.empty_like(t)
    at_zero = np.isclose(t, 0.0)
    at_edge = np.isclose(np.abs(t), 1 / (4 * a))
    rest = ~(at_zero | at_edge)
    tr = t[rest]
    h[rest] = (np.sin(np.pi * tr * (1 - a)) + 4 * a * tr * np.cos(np.pi * tr * (1 + a))) / (
        np.pi * tr * (1 - (4 * a * tr) ** 2))
    h[at_zero] = 1 - a + 4 * a / np.pi
    h[at_edge] = a / math.sqrt(2) * ((1 + 2 / np.pi) * np.sin(np.pi / (4 * a))
                                     + (1 - 2 / np.pi) * np.cos(np.pi / (4 * a)))
    return h / np.sqrt(np.sum(h ** 2))


def fast_conv_filter(samples, taps, block_size=None, decimation=1, phase=0):
    """
    Overlap-save FFT convolution.

    Returns the full linear convolution (len(samples) + len(taps) - 1 samples),
    optionally decimated as output[phase::decimation].

    :param block_size: FFT length; must be at least len(taps). Defaults to a
        fast length near four times the filter.
    """
    h = np.asarray(taps)
    x = np.asarray(samples)
    if h.ndim != 1 or h.size == 0:
        raise FilterError("taps must be a non-empty 1-D sequence")
    if decimation < 1 or phase < 0:
        raise FilterError("decimation must be positive and phase non-negative")
    n_taps = h.size
    if block_size is None:
        block_size = sp_fft.next_fast_len(max(MIN_BLOCK, 4 * n_taps))
    if block_size < n_taps:
        raise FilterError(f"Block size {block_size} shorter than the {n_taps}-tap filter")
    real_output = np.isrealobj(x) and np.isrealobj(h)
    if x.size == 0:
        return np.zeros(0, dtype=float if real_output else complex)

    hop = block_size - n_taps + 1
    out_len = x.size + n_taps - 1
    n_blocks = -(-out_len // hop)
    padded = np.zeros((n_blocks - 1) * hop + block_size, dtype=complex)
    padded[n_taps - 1:n_taps - 1 + x.size] = x
    blocks = sliding_window_view(padded, block_size)[::hop][:n_blocks]
    spectrum = sp_fft.fft(h, block_size)
    filtered = sp_fft.ifft(sp_fft.fft(blocks, axis=1) * spectrum, axis=1)[:, n_taps - 1:]
    y = filtered.ravel()[:out_len]
    if real_output:
        y = y.real
    return y[phase::decimation]


def upsample(symbols, factor):
    """Insert factor-1 zeros after every symbol."""
    s = np.asarray(symbols)
    out = np.zeros(s.size * factor, dtype=s.dtype)
    out[::factor] = s
    return out
