# link/reed_solomon.py

from dataclasses import dataclass
from functools import lru_cache
import logging

from reedsolo import RSCodec, ReedSolomonError

from .packets import PACKET_SIZE

RS_PARITY = 16
RS_BLOCK = PACKET_SIZE + RS_PARITY
# Shortened from the (255, 239) code over GF(256) with x^8 + x^4 + x^3 + x^2 + 1
FIELD_POLY = 0x11D


class ReedSolomonLengthError(ValueError):
    pass


@dataclass(frozen=True)
class RsDecodeResult:
    data: bytes
    ok: bool
    corrected: int = 0


@lru_cache(maxsize=1)
def _codec():
    return RSCodec(RS_PARITY, nsize=255, fcr=0, prim=FIELD_POLY, generator=2, c_exp=8)


def rs_encode(block):
    """Append 16 parity bytes to a 188-byte packet."""
    if len(block) != PACKET_SIZE:
        raise ReedSolomonLengthError(f"RS encoder expects {PACKET_SIZE} bytes, got {len(block)}")
    return bytes(_codec().encode(bytes(block)))


def rs_decode(codeword):
    """
    Correct up to 8 byte errors in a 204-byte codeword.

    Uncorrectable blocks come back with ok=False and the received systematic bytes.
    """
    if len(codeword) != RS_BLOCK:
        raise ReedSolomonLengthError(f"RS decoder expects {RS_BLOCK} bytes, got {len(codeword)}")
    codeword = bytes(codeword)
    try:
        decoded = _codec().decode(codeword)
    except ReedSolomonError as e:
        logging.debug(f"Uncorrectable RS block: {e}")
        return RsDecodeResult(codeword[:PACKET_SIZE], ok=False)
    if isinstance(decoded, tuple):
        message, errata = decoded[0], decoded[-1]
    else:
        message, errata = decoded, ()
    return RsDecodeResult(bytes(message), ok=True, corrected=len(errata))


def rs_encode_stream(packets):
    return b''.join(rs_encode(packets[i:i + PACKET_SIZE]) for i in range(0, len(packets), PACKET_SIZE))


def rs_decode_stream(codewords):
    """Decode consecutive codewords; returns (packets, number of uncorrectable blocks)."""
    if len(codewords) % RS_BLOCK:
        raise ReedSolomonLengthError(f"Stream length {len(codewords)} is not a whole number of codewords")
    out, failures = [], 0
    for i in range(0, len(codewords), RS_BLOCK):
        result = rs_decode(codewords[i:i + RS_BLOCK])
        failures += not result.ok
        out.append(result.data)
    if failures:
        logging.warning(f"{failures} uncorrectable RS block(s)")
    return b''.join(out), failures
