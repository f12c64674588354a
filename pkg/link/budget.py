# link/budget.py

from dataclasses import dataclass
from fractions import Fraction
import math

from scipy.constants import c as SPEED_OF_LIGHT, k as BOLTZMANN

from antenna import PatternError
from .packets import PACKET_SIZE
from .reed_solomon import RS_BLOCK

REFERENCE_TEMPERATURE_K = 290.0


class LinkBudgetError(ValueError):
    pass


@dataclass(frozen=True)
class LinkConfig:
    """
    Transmit chain, channel and receiver settings of the mmWave link.

    Defaults reproduce the lab testbed at 1 m. dma_gain_dbi, when set,
    replaces the pattern gain in link_budget().
    """
    baseband_hz: float = 1e9
    rf_hz: float = 62e9
    tx_power_dbm: float = 7.0
    dma_gain_dbi: float | None = None
    rx_horn_gain_dbi: float = 15.5
    rx_chain_gain_db: float = 32.0
    distance_m: float = 1.0
    symbol_rate: float = 2e6
    code_rate: Fraction = Fraction(5, 6)
    noise_figure_db: float = 7.0
    rolloff: float = 0.35
    samples_per_symbol: int = 4
    rrc_span_symbols: int = 12
    temperature_k: float = REFERENCE_TEMPERATURE_K
    extra_tx_gain_db: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'code_rate', Fraction(self.code_rate).limit_denominator(1000))
        for name in ('baseband_hz', 'rf_hz', 'tx_power_dbm', 'rx_horn_gain_dbi', 'rx_chain_gain_db',
                     'distance_m', 'symbol_rate', 'noise_figure_db', 'rolloff', 'temperature_k',
                     'extra_tx_gain_db'):
            if not math.isfinite(getattr(self, name)):
                raise LinkBudgetError(f"{name} must be finite")
        if self.dma_gain_dbi is not None and not math.isfinite(self.dma_gain_dbi):
            raise LinkBudgetError("dma_gain_dbi must be finite")
        if not 0 < self.code_rate < 1:
            raise LinkBudgetError(f"code_rate must lie in (0, 1), got {self.code_rate}")
        if self.distance_m <= 0 or self.rf_hz <= 0 or self.symbol_rate <= 0 or self.temperature_k <= 0:
            raise LinkBudgetError("distance, frequency, symbol rate and temperature must be positive")
        if not 0 < self.rolloff <= 1:
            raise LinkBudgetError(f"rolloff must lie in (0, 1], got {self.rolloff}")
        if self.samples_per_symbol < 1 + self.rolloff:
            raise LinkBudgetError("Sample rate must cover symbol_rate * (1 + rolloff)")

    @property
    def occupied_bandwidth_hz(self):
        return self.symbol_rate * (1 + self.rolloff)

    @property
    def sample_rate(self):
        return self.symbol_rate * self.samples_per_symbol


@dataclass(frozen=True)
class LinkBudget:
    gain_dbi: float
    fspl_db: float
    rx_power_dbm: float
    noise_dbm: float
    snr_db: float

    def chain_output_dbm(self, cfg):
        """Signal power after the LNA and IF stages."""
        return self.rx_power_dbm + cfg.rx_chain_gain_db


def fspl_db(distance_m, frequency_hz):
    """Free-space path loss 20*log10(4*pi*d*f/c)."""
    if not distance_m > 0 or not frequency_hz > 0:
        raise LinkBudgetError("distance and frequency must be positive")
    return 20 * math.log10(4 * math.pi * distance_m * frequency_hz / SPEED_OF_LIGHT)


def thermal_noise_dbm(bandwidth_hz, noise_figure_db, temperature_k=REFERENCE_TEMPERATURE_K):
    """kTB plus noise figure, in dBm."""
    return 10 * math.log10(BOLTZMANN * temperature_k * bandwidth_hz * 1e3) + noise_figure_db


def link_budget(cfg, angle_deg, pattern=None):
    """
    Received power at the horn output and SNR over the occupied bandwidth.

    The LNA/IF gain scales signal and noise alike, so it does not enter the SNR.
    """
    if cfg.dma_gain_dbi is not None:
        gain = cfg.dma_gain_dbi
    elif pattern is None:
        raise LinkBudgetError("A pattern or a fixed dma_gain_dbi is required")
    else:
        try:
            gain = pattern.gain_at(angle_deg)
        except PatternError as e:
            raise LinkBudgetError(str(e)) from e
    loss = fspl_db(cfg.distance_m, cfg.rf_hz)
    rx = cfg.tx_power_dbm + cfg.extra_tx_gain_db + gain - loss + cfg.rx_horn_gain_dbi
    noise = thermal_noise_dbm(cfg.occupied_bandwidth_hz, cfg.noise_figure_db, cfg.temperature_k)
    return LinkBudget(gain_dbi=gain, fspl_db=loss, rx_power_dbm=rx, noise_dbm=noise, snr_db=rx - noise)


def net_throughput_bps(cfg):
    """QPSK channel rate after the inner and outer code: Rs * 2 * code_rate * 188/204."""
    return float(Fraction(cfg.symbol_rate) * 2 * cfg.code_rate
                 * Fraction(PACKET_SIZE, RS_BLOCK))
