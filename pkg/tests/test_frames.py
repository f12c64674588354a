# tests/test_frames.py

import numpy as np
import pytest

from antenna import REFERENCE_BEAMS, CodeWord
from network import (
    ChecksumError,
    CodeTextError,
    CommandError,
    FrameDecoder,
    FrameError,
    Mode,
    SetCode,
    SetCodeList,
    SetMode,
    SetSwitchInterval,
    SteeringEnable,
    UnsupportedMessageError,
    decode,
    encode,
    parse_code_text,
)
from network.frames import MSG_SET_CODE, MSG_SET_SWITCH_INTERVAL, frame_bytes

CODE_ONE = CodeWord.from_int(0x9249)

COMMANDS = [
    SetCode(CODE_ONE),
    SetCodeList((CODE_ONE, CodeWord.from_int(0xAAAA), CodeWord.from_int(0x0001))),
    SetCodeList(tuple(CodeWord.from_int(v) for v in range(16))),
    SetSwitchInterval(1),
    SetSwitchInterval(2 ** 32 - 1),
    SteeringEnable(True),
    SteeringEnable(False),
    SetMode(Mode.SINGLE),
    SetMode(Mode.MULTI),
]


# ==============================
# Code text
# ==============================

@pytest.mark.parametrize("text, radix", [
    ("1001001001001001", "bin"),
    ("0b1001_0010_0100_1001", "bin"),
    ("0x9249", "hex"),
    ("9249", "hex"),
    ("37449", "dec"),
    (" 37 449 ", "dec"),
])
def test_code_one_in_every_radix(text, radix):
    assert parse_code_text(text, radix).to_int() == 0x9249


def test_reference_codes_survive_hex_text():
    for ref in REFERENCE_BEAMS:
        assert parse_code_text(ref.code.to_hex(), "hex") == ref.code


@pytest.mark.parametrize("text, radix", [
    ("65536", "dec"),
    ("1G", "hex"),
    ("102", "bin"),
    ("", "bin"),
    ("0x", "hex"),
    ("11", "oct"),
])
def test_bad_code_text(text, radix):
    with pytest.raises(CodeTextError):
        parse_code_text(text, radix)


# ==============================
# Codec
# ==============================

def test_set_code_wire_format():
    assert encode(SetCode(CODE_ONE)) == bytes((0xAA, 0x11, 0x02, 0x92, 0x49, 0xC8))


@pytest.mark.parametrize("command", COMMANDS)
def test_round_trip(command):
    frame = encode(command)
    result = decode(frame)
    assert result.command == command
    assert result.error is None
    assert result.consumed == len(frame)


def test_leading_garbage_is_skipped():
    frame = encode(SetMode(Mode.MULTI))
    result = decode(b'\x00\x13' + frame)
    assert result.command == SetMode(Mode.MULTI)
    assert result.consumed == 2 + len(frame)

    no_sync = decode(b'\x01\x02\x03')
    assert no_sync.needs_more and no_sync.consumed == 3


def test_partial_frame_needs_more_bytes():
    frame = encode(SetCode(CODE_ONE))
    for cut in range(len(frame)):
        result = decode(b'\x55' + frame[:cut])
        assert result.needs_more
        assert result.consumed == 1


def test_bad_checksum_consumes_only_the_sync_byte():
    good = encode(SetCode(CODE_ONE))
    bad = good[:-1] + bytes((good[-1] ^ 0xFF,))
    result = decode(bad)
    assert isinstance(result.error, FrameError)
    assert result.command is None
    assert result.consumed == 1

    results = FrameDecoder().feed(bad + good)
    assert len(results) == 2
    assert isinstance(results[0].error, FrameError)
    assert results[1].command == SetCode(CODE_ONE)


def test_unknown_type_and_malformed_payloads():
    unknown = decode(frame_bytes(0x7F, b''))
    assert isinstance(unknown.error, UnsupportedMessageError)
    assert unknown.error.msg_type == 0x7F
    assert unknown.consumed == 4

    short = decode(frame_bytes(MSG_SET_CODE, b'\x01'))
    assert isinstance(short.error, FrameError)
    assert short.consumed == 5

    zero = decode(frame_bytes(MSG_SET_SWITCH_INTERVAL, bytes(4)))
    assert isinstance(zero.error, FrameError)

    assert isinstance(decode(frame_bytes(0x14, b'\x02')).error, FrameError)
    assert isinstance(decode(frame_bytes(0x15, b'\x05')).error, FrameError)
    assert isinstance(decode(frame_bytes(0x12, b'')).error, FrameError)


def test_command_validation():
    with pytest.raises(CommandError):
        SetCodeList(())
    with pytest.raises(CommandError):
        SetCodeList(tuple(CODE_ONE for _ in range(17)))
    with pytest.raises(CommandError):
        SetSwitchInterval(0)
    with pytest.raises(CommandError):
        SetCode(CodeWord.from_int(1, 8))
    with pytest.raises(CommandError):
        encode("not a command")


def test_decoder_reassembles_split_frames():
    frames = encode(SetCode(CODE_ONE)) + encode(SetSwitchInterval(100))
    decoder = FrameDecoder()
    assert decoder.feed(frames[:3]) == []
    results = decoder.feed(frames[3:8])
    assert [r.command for r in results] == [SetCode(CODE_ONE)]
    results = decoder.feed(frames[8:])
    assert [r.command for r in results] == [SetSwitchInterval(100)]
    assert decoder.buffer == b''


def test_truncated_header_does_not_hide_a_later_frame():
    stale = bytes([0x01, 0xAA, 0x11, 0xF0, 0x02])
    frame = encode(SetCode(CodeWord.from_int(0xAAAA)))
    result = decode(stale + frame)
    assert result.command == SetCode(CodeWord.from_int(0xAAAA))
    assert result.consumed == len(stale) + len(frame)

    results = FrameDecoder().feed(stale + frame)
    assert [r.command for r in results] == [SetCode(CodeWord.from_int(0xAAAA))]

    decoder = FrameDecoder()
    assert decoder.feed(stale) == []
    assert [r.command for r in decoder.feed(frame)] == [SetCode(CodeWord.from_int(0xAAAA))]
    assert decoder.buffer == b''

    # Without a complete frame behind it the header still waits
    assert decode(stale + frame[:-1]).needs_more


def fuzz(n_streams, seed):
    rng = np.random.default_rng(seed)
    for _ in range(n_streams):
        stream = bytearray(rng.integers(0, 256, int(rng.integers(0, 48)), dtype=np.uint8).tobytes())
        embedded = None
        if rng.random() < 0.5:
            command = COMMANDS[int(rng.integers(len(COMMANDS)))]
            frame = bytearray(encode(command))
            at = int(rng.integers(0, len(stream) + 1))
            if rng.random() < 0.5:
                frame[int(rng.integers(1, len(frame)))] ^= int(rng.integers(1, 256))
            else:
                embedded = (command, at, at + len(frame))
            stream[at:at] = frame
        data = bytes(stream)
        pos, found, swallowed = 0, False, False
        while data:
            result = decode(data)
            if result.command is not None:
                # Only checksum-valid frames decode, and they re-encode to the bytes received
                frame = encode(result.command)
                assert data[result.consumed - len(frame):result.consumed] == frame
            if result.needs_more:
                break
            assert result.consumed > 0
            end = pos + result.consumed
            if embedded is not None:
                command, at, frame_end = embedded
                if result.command == command and end == frame_end:
                    found = True
                elif pos <= at < end and not isinstance(result.error, ChecksumError):
                    # Garbage that happens to carry a valid checksum may cover it
                    swallowed = True
            pos, data = end, data[result.consumed:]
        if embedded is not None:
            assert found or swallowed, bytes(stream).hex()


def test_fuzzed_streams_never_crash_the_decoder():
    fuzz(2000, seed=17)


@pytest.mark.slow
def test_million_fuzzed_streams():
    fuzz(10 ** 6, seed=18)
