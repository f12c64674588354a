# link/__init__.py

from .packets import PacketError, packetize, depacketize, PACKET_SIZE, SYNC_BYTE
from .scrambler import ScramblerError, scramble, descramble, prbs_bytes
from .reed_solomon import (
    ReedSolomonLengthError,
    RsDecodeResult,
    rs_encode,
    rs_decode,
    rs_encode_stream,
    rs_decode_stream,
)
from .interleaver import ConvolutionalInterleaver, outer_interleave, outer_deinterleave, total_delay
from .convolutional import PunctureError, conv_encode, viterbi_decode
from .qpsk import ModulationError, qpsk_map, qpsk_demap, evm_percent, add_awgn
from .filters import FilterError, fast_conv_filter, rrc_taps
from .budget import (
    LinkBudget,
    LinkBudgetError,
    LinkConfig,
    fspl_db,
    link_budget,
    net_throughput_bps,
    thermal_noise_dbm,
)
from .chain import BeamSchedule, IqFrame, LinkReport, TxBurst, modulate, run_link

__all__ = [
    'PacketError', 'packetize', 'depacketize', 'PACKET_SIZE', 'SYNC_BYTE',
    'ScramblerError', 'scramble', 'descramble', 'prbs_bytes',
    'ReedSolomonLengthError', 'RsDecodeResult', 'rs_encode', 'rs_decode',
    'rs_encode_stream', 'rs_decode_stream',
    'ConvolutionalInterleaver', 'outer_interleave', 'outer_deinterleave', 'total_delay',
    'PunctureError', 'conv_encode', 'viterbi_decode',
    'ModulationError', 'qpsk_map', 'qpsk_demap', 'evm_percent', 'add_awgn',
    'FilterError', 'fast_conv_filter', 'rrc_taps',
    'LinkBudget', 'LinkBudgetError', 'LinkConfig', 'fspl_db', 'link_budget',
    'net_throughput_bps', 'thermal_noise_dbm',
    'BeamSchedule', 'IqFrame', 'LinkReport', 'TxBurst', 'modulate', 'run_link',
]
