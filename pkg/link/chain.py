# link/chain.py

from dataclasses import dataclass, field, replace
import logging
import math

import numpy as np

from .budget import link_budget, net_throughput_bps
from .convolutional import conv_encode, viterbi_decode
from .filters import fast_conv_filter, rrc_taps, upsample
from .interleaver import outer_deinterleave, outer_interleave
from .packets import depacketize, packetize
from .qpsk import evm_percent, hard_decisions, qpsk_demap, qpsk_map
from .reed_solomon import rs_decode_stream, rs_encode_stream
from .scrambler import descramble, scramble

CONTROL_CLOCK_HZ = 100e6
MAX_REPORTED_BER = 0.5


@dataclass(frozen=True, eq=False)
class IqFrame:
    """Complex baseband burst; symbol_index[k] is the sample at the centre of symbol k."""
    samples: np.ndarray
    sample_rate: float
    symbol_rate: float
    symbol_index: np.ndarray

    def __post_init__(self):
        if self.sample_rate < self.symbol_rate:
            raise ValueError("Sample rate below symbol rate")


@dataclass(frozen=True, eq=False)
class TxBurst:
    frame: IqFrame
    symbols: np.ndarray
    coded_bits: np.ndarray
    packets: bytes
    info_bits: int


@dataclass(frozen=True)
class BeamSchedule:
    """
    Codes driven onto the antenna over time.

    patterns[i] is active from ticks[i] (control clock ticks counted from the
    leading edge of the first symbol period) until the next entry.
    """
    ticks: tuple
    patterns: tuple
    clock_hz: float = CONTROL_CLOCK_HZ

    def __post_init__(self):
        if not self.ticks or len(self.ticks) != len(self.patterns):
            raise ValueError("BeamSchedule needs one pattern per change tick")
        if any(b <= a for a, b in zip(self.ticks, self.ticks[1:])):
            raise ValueError("BeamSchedule ticks must be strictly increasing")

    @classmethod
    def static(cls, pattern):
        return cls(ticks=(0,), patterns=(pattern,))

    @classmethod
    def from_timeline(cls, timeline, patterns_by_word, start_tick, clock_hz=CONTROL_CLOCK_HZ):
        """
        Build a schedule from (tick, radiation_word) changes.

        The word active at `start_tick` becomes the first entry; later ticks are
        shifted so that `start_tick` is zero.
        """
        changes = sorted(timeline)
        active = [entry for entry in changes if entry[0] <= start_tick]
        if not active:
            raise ValueError(f"No radiation word active at tick {start_tick}")
        ticks, patterns = [0], [patterns_by_word[active[-1][1]]]
        for tick, word in changes:
            if tick > start_tick:
                ticks.append(tick - start_tick)
                patterns.append(patterns_by_word[word])
        return cls(ticks=tuple(ticks), patterns=tuple(patterns), clock_hz=clock_hz)

    def sample_fields(self, angle_deg, sample_ticks):
        """Normalized far field at `angle_deg` for every sample tick."""
        fields = np.array([p.field_at(angle_deg) for p in self.patterns])
        idx = np.searchsorted(np.asarray(self.ticks), sample_ticks, side='right') - 1
        return fields[np.clip(idx, 0, len(fields) - 1)]


@dataclass(frozen=True, eq=False)
class LinkReport:
    angle_deg: float
    snr_db: float
    rx_power_dbm: float
    prefec_ber: float
    postfec_ber: float
    evm_pct: float
    throughput_bps: float
    payload_recovered: bool
    uncorrectable_blocks: int = 0
    payload: bytes = field(default=b'', repr=False)


# ==============================
# Transmitter
# ==============================

def modulate(cfg, payload):
    """Packetize, scramble, RS encode, interleave, convolutionally encode, map and pulse shape."""
    packets = packetize(payload)
    interleaved = outer_interleave(rs_encode_stream(scramble(packets)))
    info = np.unpackbits(np.frombuffer(interleaved, dtype=np.uint8))
    coded = conv_encode(info)
    symbols = qpsk_map(coded)
    taps = rrc_taps(cfg.samples_per_symbol, cfg.rolloff, cfg.rrc_span_symbols)
    samples = fast_conv_filter(upsample(symbols, cfg.samples_per_symbol), taps)
    centre = (taps.size - 1) // 2
    frame = IqFrame(
        samples=samples,
        sample_rate=cfg.sample_rate,
        symbol_rate=cfg.symbol_rate,
        symbol_index=centre + cfg.samples_per_symbol * np.arange(symbols.size),
    )
    return TxBurst(frame=frame, symbols=symbols, coded_bits=coded, packets=packets, info_bits=info.size)


# ==============================
# Channel
# ==============================

def sample_ticks(cfg, frame, clock_hz=CONTROL_CLOCK_HZ):
    """Control clock tick of every sample; tick 0 is the leading edge of symbol 0."""
    offset = frame.symbol_index[0] - cfg.samples_per_symbol / 2 if frame.symbol_index.size else 0
    seconds = (np.arange(frame.samples.size) - offset) / frame.sample_rate
    return np.floor(seconds * clock_hz).astype(np.int64)


def channel_amplitude(cfg):
    """Received amplitude (sqrt mW) for a 0 dBi transmit antenna."""
    budget = link_budget(replace(cfg, dma_gain_dbi=0.0), 0.0)
    return 10 ** (budget.rx_power_dbm / 20)


# ==============================
# Receiver
# ==============================

def _bit_error_rate(received, sent):
    if sent.size == 0:
        return 0.0
    return min(float(np.count_nonzero(received != sent)) / sent.size, MAX_REPORTED_BER)


def run_link(cfg, pattern, angle_deg, payload, noise_seed, schedule=None, snr_override_db=None):
    """
    Send `payload` through the full link towards a receiver at `angle_deg`.

    :param pattern: PatternCut of the transmitting code; its gain at `angle_deg`
        sets the link budget (a fixed cfg.dma_gain_dbi is not used here).
    :param noise_seed: Integer seed or numpy Generator for the channel noise.
    :param schedule: Optional BeamSchedule switching codes during the burst;
        the receiver equalizes with the time-averaged channel.
    :param snr_override_db: Force the SNR instead of the budget value; the symbol
        EVM then tracks 10^(-snr/20).
    :return: LinkReport; FEC failures show up as payload_recovered=False.
    """
    rng = noise_seed if isinstance(noise_seed, np.random.Generator) else np.random.default_rng(noise_seed)
    budget = link_budget(replace(cfg, dma_gain_dbi=None), angle_deg, pattern)
    burst = modulate(cfg, payload)
    frame = burst.frame
    schedule = schedule or BeamSchedule.static(pattern)

    # DMA far field scales the waveform sample by sample
    amplitude = channel_amplitude(cfg)
    fields = schedule.sample_fields(angle_deg, sample_ticks(cfg, frame, schedule.clock_hz))
    gains = amplitude * fields
    reference_power = (amplitude * abs(pattern.field_at(angle_deg))) ** 2
    noise_power = 10 ** (budget.noise_dbm / 10)
    if snr_override_db is not None:
        noise_power = max(reference_power, np.finfo(float).tiny) / 10 ** (snr_override_db / 10)
    snr_db = snr_override_db if snr_override_db is not None else budget.snr_db
    # Per-sample variance equals the per-symbol variance after the unit-energy matched filter
    variance = noise_power

    noise = rng.standard_normal(frame.samples.size) + 1j * rng.standard_normal(frame.samples.size)
    received = gains * frame.samples + noise * math.sqrt(variance / 2)

    taps = rrc_taps(cfg.samples_per_symbol, cfg.rolloff, cfg.rrc_span_symbols)
    matched = fast_conv_filter(received, taps)
    centres = frame.symbol_index + (taps.size - 1) // 2
    observed = matched[centres]

    # Receiver knows only the time-averaged channel
    mean_gain = complex(np.mean(gains[frame.symbol_index]))
    if mean_gain == 0:
        mean_gain = complex(max(amplitude, np.finfo(float).tiny))
    equalized = observed / mean_gain
    evm = evm_percent(equalized, burst.symbols)
    soft = qpsk_demap(equalized, noise_var=max(variance / abs(mean_gain) ** 2, np.finfo(float).tiny))
    prefec = _bit_error_rate(hard_decisions(soft), burst.coded_bits)

    info = viterbi_decode(soft, n_bits=burst.info_bits)
    codewords = outer_deinterleave(np.packbits(info).tobytes())
    scrambled, failures = rs_decode_stream(codewords)
    packets = descramble(scrambled)
    sent_bits = np.unpackbits(np.frombuffer(burst.packets, dtype=np.uint8))
    got_bits = np.unpackbits(np.frombuffer(packets, dtype=np.uint8))
    postfec = _bit_error_rate(got_bits, sent_bits)
    recovered_payload = depacketize(packets)

    recovered = failures == 0
    level = logging.INFO if recovered else logging.WARNING
    logging.log(level, f"Link at {angle_deg:+.2f} deg: SNR {snr_db:.1f} dB, EVM {evm:.1f}%, "
                       f"pre-FEC BER {prefec:.2e}, post-FEC BER {postfec:.2e}, "
                       f"{'recovered' if recovered else f'{failures} uncorrectable block(s)'}")
    return LinkReport(
        angle_deg=float(angle_deg),
        snr_db=float(snr_db),
        rx_power_dbm=float(budget.rx_power_dbm),
        prefec_ber=prefec,
        postfec_ber=postfec,
        evm_pct=evm,
        throughput_bps=net_throughput_bps(cfg),
        payload_recovered=recovered,
        uncorrectable_blocks=failures,
        payload=recovered_payload,
    )
