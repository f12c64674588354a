# network/__init__.py

from .codes import CODE_BITS, CodeTextError, parse_code_text
from .frames import (
    SYNC, MAX_CODES, Mode, ProtocolError, FrameError, ChecksumError, UnsupportedMessageError, CommandError,
    SetCode, SetCodeList, SetSwitchInterval, SteeringEnable, SetMode,
    DecodeResult, FrameDecoder, checksum, encode, decode,
)
from .emulator import (
    CLOCK_HZ, APPLY_LATENCY_TICKS, EVENT_SWITCH, EVENT_ACK, EVENT_NACK,
    TimelineEvent, EmulatorState, BeamSteeringEmulator, SwitchingRate,
    emulator_step, radiation_timeline, switching_rate_check,
)
from .serial_protocol import ACK, NACK, BeamControlProtocol, TraceTransport

__all__ = [
    'CODE_BITS', 'CodeTextError', 'parse_code_text',
    'SYNC', 'MAX_CODES', 'Mode', 'ProtocolError', 'FrameError', 'ChecksumError', 'UnsupportedMessageError', 'CommandError',
    'SetCode', 'SetCodeList', 'SetSwitchInterval', 'SteeringEnable', 'SetMode',
    'DecodeResult', 'FrameDecoder', 'checksum', 'encode', 'decode',
    'CLOCK_HZ', 'APPLY_LATENCY_TICKS', 'EVENT_SWITCH', 'EVENT_ACK', 'EVENT_NACK',
    'TimelineEvent', 'EmulatorState', 'BeamSteeringEmulator', 'SwitchingRate',
    'emulator_step', 'radiation_timeline', 'switching_rate_check',
    'ACK', 'NACK', 'BeamControlProtocol', 'TraceTransport',
]
