# link/interleaver.py

import numpy as np

INTERLEAVE_DEPTH = 12
CELL_DEPTH = 17


def total_delay(depth=INTERLEAVE_DEPTH, cell=CELL_DEPTH):
    """End-to-end delay in bytes of interleaver plus deinterleaver."""
    return depth * (depth - 1) * cell


class ConvolutionalInterleaver:
    """
    Forney interleaver with `depth` branches; branch j delays its bytes by j*cell.

    Set `inverse=True` for the matching deinterleaver (branch j delays by
    (depth-1-j)*cell). Delay lines start filled with zeros and keep their
    state across push() calls.
    """

    def __init__(self, depth=INTERLEAVE_DEPTH, cell=CELL_DEPTH, inverse=False):
        self.depth = depth
        self.cell = cell
        self.inverse = inverse
        self.branch = 0
        self.lines = []
        for j in range(depth):
            length = (depth - 1 - j) * cell if inverse else j * cell
            self.lines.append([0] * length)
        self.heads = [0] * depth

    def _shift(self, byte):
        j = self.branch
        self.branch = (j + 1) % self.depth
        line = self.lines[j]
        if not line:
            return byte
        head = self.heads[j]
        out = line[head]
        line[head] = byte
        self.heads[j] = (head + 1) % len(line)
        return out

    def push(self, data):
        return bytes(self._shift(b) for b in data)

    def flush(self):
        """Push enough zeros to empty every delay line."""
        return self.push(bytes(total_delay(self.depth, self.cell)))


def _positions(length, depth, cell, inverse):
    n = np.arange(length)
    branch = n % depth
    delays = (depth - 1 - branch) if inverse else branch
    return n + delays * depth * cell


def outer_interleave(data, depth=INTERLEAVE_DEPTH, cell=CELL_DEPTH):
    """
    Interleave a codeword-aligned stream and flush it.

    Returns len(data) + depth*(depth-1)*cell bytes; positions not reached by
    any input byte carry the zero initial contents of the delay lines.
    """
    src = np.frombuffer(bytes(data), dtype=np.uint8)
    out = np.zeros(src.size + total_delay(depth, cell), dtype=np.uint8)
    out[_positions(src.size, depth, cell, inverse=False)] = src
    return out.tobytes()


def outer_deinterleave(data, depth=INTERLEAVE_DEPTH, cell=CELL_DEPTH):
    """
    Inverse of outer_interleave(): drops the leading delay-line contents.

    Returns len(data) - depth*(depth-1)*cell bytes.
    """
    delay = total_delay(depth, cell)
    src = np.frombuffer(bytes(data), dtype=np.uint8)
    if src.size < delay:
        return b''
    out = np.zeros(src.size + delay, dtype=np.uint8)
    out[_positions(src.size, depth, cell, inverse=True)] = src
    return out[delay:src.size].tobytes()
