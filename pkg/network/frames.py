# network/frames.py

from dataclasses import dataclass
from enum import IntEnum
import logging

from antenna import CodeWord
from .codes import CODE_BITS

SYNC = 0xAA
HEADER_SIZE = 3
MAX_PAYLOAD = 255
MAX_CODES = 16
MAX_INTERVAL = 2 ** 32 - 1

# Protocol version 1 lives in the high nibble of the message type
MSG_SET_CODE = 0x11
MSG_SET_CODE_LIST = 0x12
MSG_SET_SWITCH_INTERVAL = 0x13
MSG_STEERING_ENABLE = 0x14
MSG_SET_MODE = 0x15


class ProtocolError(Exception):
    pass


class FrameError(ProtocolError):
    pass


class ChecksumError(FrameError):
    pass


class UnsupportedMessageError(ProtocolError):
    def __init__(self, msg_type):
        super().__init__(f"Unsupported message type 0x{msg_type:02X}")
        self.msg_type = msg_type


class CommandError(ProtocolError):
    pass


class Mode(IntEnum):
    SINGLE = 0
    MULTI = 1


# ==============================
# Commands
# ==============================

def _check_code(code):
    if len(code) != CODE_BITS:
        raise CommandError(f"Codes on the wire carry {CODE_BITS} bits, got {len(code)}")


@dataclass(frozen=True)
class SetCode:
    code: CodeWord

    def __post_init__(self):
        _check_code(self.code)


@dataclass(frozen=True)
class SetCodeList:
    codes: tuple

    def __post_init__(self):
        object.__setattr__(self, 'codes', tuple(self.codes))
        if not 1 <= len(self.codes) <= MAX_CODES:
            raise CommandError(f"Code list needs 1 to {MAX_CODES} codes, got {len(self.codes)}")
        for code in self.codes:
            _check_code(code)


@dataclass(frozen=True)
class SetSwitchInterval:
    ticks: int

    def __post_init__(self):
        if not 1 <= self.ticks <= MAX_INTERVAL:
            raise CommandError(f"Switch interval must be 1..{MAX_INTERVAL} ticks, got {self.ticks}")


@dataclass(frozen=True)
class SteeringEnable:
    enabled: bool


@dataclass(frozen=True)
class SetMode:
    mode: Mode


def checksum(msg_type, payload):
    """XOR over type, length and payload bytes."""
    value = msg_type ^ len(payload)
    for b in payload:
        value ^= b
    return value


def frame_bytes(msg_type, payload):
    payload = bytes(payload)
    if len(payload) > MAX_PAYLOAD:
        raise CommandError(f"Payload of {len(payload)} bytes does not fit a frame")
    return bytes((SYNC, msg_type, len(payload))) + payload + bytes((checksum(msg_type, payload),))


def encode(cmd):
    """Serialize one command to its wire frame."""
    if isinstance(cmd, SetCode):
        return frame_bytes(MSG_SET_CODE, cmd.code.to_int().to_bytes(2, 'big'))
    if isinstance(cmd, SetCodeList):
        return frame_bytes(MSG_SET_CODE_LIST, b''.join(c.to_int().to_bytes(2, 'big') for c in cmd.codes))
    if isinstance(cmd, SetSwitchInterval):
        return frame_bytes(MSG_SET_SWITCH_INTERVAL, cmd.ticks.to_bytes(4, 'big'))
    if isinstance(cmd, SteeringEnable):
        return frame_bytes(MSG_STEERING_ENABLE, bytes((1 if cmd.enabled else 0,)))
    if isinstance(cmd, SetMode):
        return frame_bytes(MSG_SET_MODE, bytes((int(cmd.mode),)))
    raise CommandError(f"Not a control command: {cmd!r}")


def _parse_payload(msg_type, payload):
    if msg_type == MSG_SET_CODE:
        if len(payload) != 2:
            raise FrameError(f"SetCode payload must be 2 bytes, got {len(payload)}")
        return SetCode(CodeWord.from_int(int.from_bytes(payload, 'big'), CODE_BITS))
    if msg_type == MSG_SET_CODE_LIST:
        if not payload or len(payload) % 2 or len(payload) // 2 > MAX_CODES:
            raise FrameError(f"SetCodeList payload of {len(payload)} bytes is not 1..{MAX_CODES} codes")
        return SetCodeList(tuple(CodeWord.from_int(int.from_bytes(payload[i:i + 2], 'big'), CODE_BITS)
                                 for i in range(0, len(payload), 2)))
    if msg_type == MSG_SET_SWITCH_INTERVAL:
        if len(payload) != 4:
            raise FrameError(f"SetSwitchInterval payload must be 4 bytes, got {len(payload)}")
        ticks = int.from_bytes(payload, 'big')
        if ticks < 1:
            raise FrameError("Switch interval of 0 ticks")
        return SetSwitchInterval(ticks)
    if msg_type == MSG_STEERING_ENABLE:
        if len(payload) != 1 or payload[0] > 1:
            raise FrameError("SteeringEnable payload must be one byte 0 or 1")
        return SteeringEnable(bool(payload[0]))
    if msg_type == MSG_SET_MODE:
        if len(payload) != 1 or payload[0] not in (Mode.SINGLE, Mode.MULTI):
            raise FrameError("SetMode payload must be one byte 0 (single) or 1 (multi)")
        return SetMode(Mode(payload[0]))
    raise UnsupportedMessageError(msg_type)


# ==============================
# Decoding
# ==============================

@dataclass(frozen=True)
class DecodeResult:
    """
    Outcome of one decode() call.

    `consumed` bytes may be dropped from the front of the buffer. Exactly one
    of command / error is set, or neither when more bytes are needed.
    """
    consumed: int
    command: object = None
    error: ProtocolError | None = None

    @property
    def needs_more(self):
        return self.command is None and self.error is None


def _complete_frame_end(data, start):
    """End offset of a complete, checksum-valid frame at `start`, else None."""
    if len(data) - start < HEADER_SIZE:
        return None
    msg_type, length = data[start + 1], data[start + 2]
    end = start + HEADER_SIZE + length + 1
    if len(data) < end or checksum(msg_type, data[start + HEADER_SIZE:end - 1]) != data[end - 1]:
        return None
    return end


def decode(data):
    """
    Decode the first frame in `data`.

    Bytes before the first sync byte are consumed as garbage. A checksum
    failure consumes only the sync byte so that a frame starting inside the
    damaged one is still found. A header whose length runs past the buffer
    waits for more bytes, unless a complete valid frame already follows it;
    the stale header is then skipped.
    """
    data = bytes(data)
    start = data.find(SYNC)
    if start < 0:
        return DecodeResult(consumed=len(data))
    if len(data) - start < HEADER_SIZE:
        return DecodeResult(consumed=start)
    msg_type, length = data[start + 1], data[start + 2]
    end = start + HEADER_SIZE + length + 1
    if len(data) < end:
        later = data.find(SYNC, start + 1)
        while later >= 0:
            if _complete_frame_end(data, later) is not None:
                logging.debug(f"Skipping truncated header at offset {start} for frame at {later}")
                result = decode(data[later:])
                return DecodeResult(consumed=later + result.consumed, command=result.command, error=result.error)
            later = data.find(SYNC, later + 1)
        return DecodeResult(consumed=start)
    payload = data[start + HEADER_SIZE:end - 1]
    if checksum(msg_type, payload) != data[end - 1]:
        return DecodeResult(consumed=start + 1, error=ChecksumError(f"Bad checksum in frame type 0x{msg_type:02X}"))
    try:
        command = _parse_payload(msg_type, payload)
    except ProtocolError as e:
        return DecodeResult(consumed=end, error=e)
    return DecodeResult(consumed=end, command=command)


class FrameDecoder:
    """Accumulates received bytes and yields decode results as frames complete."""

    def __init__(self, buffer=b''):
        self.buffer = bytes(buffer)

    def feed(self, data):
        self.buffer += bytes(data)
        results = []
        while self.buffer:
            result = decode(self.buffer)
            self.buffer = self.buffer[result.consumed:]
            if result.needs_more:
                break
            if result.error is not None:
                logging.warning(f"Control frame rejected: {result.error}")
            results.append(result)
        return results
