# link/scrambler.py

from functools import lru_cache

import numpy as np

from .packets import PACKET_SIZE, PacketError

GROUP_PACKETS = 8
# Loading sequence 100101010000000 (stage 1 first), stage k held in bit k-1
PRBS_INIT = 0b000000010101001


class ScramblerError(PacketError):
    pass


def prbs_bytes(count, state=PRBS_INIT):
    """Energy dispersal sequence of the 1 + X^14 + X^15 generator, MSB first."""
    out = np.zeros(count, dtype=np.uint8)
    reg = state
    for i in range(count):
        byte = 0
        for _ in range(8):
            bit = ((reg >> 13) ^ (reg >> 14)) & 1
            reg = ((reg << 1) | bit) & 0x7FFF
            byte = (byte << 1) | bit
        out[i] = byte
    return out


@lru_cache(maxsize=1)
def _group_mask():
    # XOR mask for one 8-packet group; sync positions consume PRBS bytes but stay clear
    size = GROUP_PACKETS * PACKET_SIZE
    mask = np.zeros(size, dtype=np.uint8)
    mask[1:] = prbs_bytes(size - 1)
    mask[::PACKET_SIZE] = 0
    mask.setflags(write=False)
    return mask


def _disperse(data):
    if len(data) % PACKET_SIZE:
        raise ScramblerError(f"Stream length {len(data)} is not a whole number of {PACKET_SIZE}-byte packets")
    buf = np.frombuffer(bytes(data), dtype=np.uint8).copy()
    if buf.size == 0:
        return b''
    mask = _group_mask()
    reps = -(-buf.size // mask.size)
    buf ^= np.tile(mask, reps)[:buf.size]
    # First sync byte of every group is inverted (0x47 <-> 0xB8)
    buf[::mask.size] ^= 0xFF
    return buf.tobytes()


def scramble(packets):
    """Randomize whole transport packets with the group-synchronous PRBS."""
    return _disperse(packets)


def descramble(data):
    """Inverse of scramble()."""
    return _disperse(data)
