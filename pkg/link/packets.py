# link/packets.py

import logging

import numpy as np

PACKET_SIZE = 188
SYNC_BYTE = 0x47
HEADER_SIZE = 4
PAYLOAD_PER_PACKET = PACKET_SIZE - HEADER_SIZE
LENGTH_PREFIX = 8
PAYLOAD_PID = 0x0100


class PacketError(ValueError):
    pass


def _header(counter):
    # sync, PID 0x100, payload only with 4-bit continuity counter
    return bytes((SYNC_BYTE, (PAYLOAD_PID >> 8) & 0x1F, PAYLOAD_PID & 0xFF, 0x10 | (counter & 0x0F)))


def packetize(payload):
    """
    Frame arbitrary bytes into 188-byte transport packets.

    The byte stream is an 8-byte big-endian length, the payload, then zero
    padding up to a whole number of packet payloads.
    """
    payload = bytes(payload)
    stream = len(payload).to_bytes(LENGTH_PREFIX, 'big') + payload
    remainder = len(stream) % PAYLOAD_PER_PACKET
    if remainder:
        stream += bytes(PAYLOAD_PER_PACKET - remainder)
    packets = bytearray()
    for i, start in enumerate(range(0, len(stream), PAYLOAD_PER_PACKET)):
        packets += _header(i)
        packets += stream[start:start + PAYLOAD_PER_PACKET]
    return bytes(packets)


def split_packets(data):
    """View a packet stream as an (n_packets x 188) uint8 array."""
    if len(data) % PACKET_SIZE:
        raise PacketError(f"Stream length {len(data)} is not a whole number of {PACKET_SIZE}-byte packets")
    return np.frombuffer(bytes(data), dtype=np.uint8).reshape(-1, PACKET_SIZE)


def depacketize(packets):
    """
    Recover the payload framed by packetize().

    Corrupted headers are logged and the payload bytes are used anyway; a
    corrupted length prefix is clamped to the bytes available.
    """
    rows = split_packets(packets)
    if rows.shape[0] == 0:
        raise PacketError("No packets to depacketize")
    bad_sync = int(np.count_nonzero(rows[:, 0] != SYNC_BYTE))
    if bad_sync:
        logging.warning(f"{bad_sync} packet(s) with a corrupted sync byte")
    stream = rows[:, HEADER_SIZE:].tobytes()
    length = int.from_bytes(stream[:LENGTH_PREFIX], 'big')
    available = len(stream) - LENGTH_PREFIX
    if length > available:
        logging.warning(f"Length prefix {length} exceeds the {available} bytes carried; truncating")
        length = available
    return stream[LENGTH_PREFIX:LENGTH_PREFIX + length]
