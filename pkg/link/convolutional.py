# link/convolutional.py

import numpy as np

CONSTRAINT_LENGTH = 7
G1 = 0o171
G2 = 0o133
N_STATES = 1 << (CONSTRAINT_LENGTH - 1)
TAIL_BITS = CONSTRAINT_LENGTH - 1
# Rate 5/6 pattern over five input bits, sent as X1 Y1 Y2 X3 Y4 X5
PUNCTURE_X = (1, 0, 1, 0, 1)
PUNCTURE_Y = (1, 1, 0, 1, 0)
PUNCTURE_PERIOD = len(PUNCTURE_X)
PUNCTURED_BITS = sum(PUNCTURE_X) + sum(PUNCTURE_Y)
BLOCK_STEPS = 4096


class PunctureError(ValueError):
    pass


def _taps(generator):
    # Delay i (0 = current input) is bit 6-i of the octal generator
    return np.array([(generator >> (CONSTRAINT_LENGTH - 1 - i)) & 1 for i in range(CONSTRAINT_LENGTH)],
                    dtype=np.int64)


def _puncture_mask():
    return np.column_stack((PUNCTURE_X, PUNCTURE_Y)).ravel().astype(bool)


def encoder_steps(n_bits, terminate=True):
    """Trellis steps used for `n_bits` input bits (tail and puncture padding included)."""
    steps = n_bits + (TAIL_BITS if terminate else 0)
    return -(-steps // PUNCTURE_PERIOD) * PUNCTURE_PERIOD


def conv_encode(bits, terminate=True):
    """
    K=7 (171, 133) encoder punctured to rate 5/6.

    With `terminate` six zero tail bits return the encoder to state 0; the
    input is then zero padded to a multiple of five bits.
    """
    u = np.asarray(bits, dtype=np.int64).ravel()
    if u.size and (u.min() < 0 or u.max() > 1):
        raise ValueError("Input must contain only 0 and 1")
    steps = encoder_steps(u.size, terminate)
    padded = np.zeros(steps, dtype=np.int64)
    padded[:u.size] = u
    x = np.convolve(padded, _taps(G1))[:steps] & 1
    y = np.convolve(padded, _taps(G2))[:steps] & 1
    pairs = np.column_stack((x, y)).ravel()
    mask = np.tile(_puncture_mask(), steps // PUNCTURE_PERIOD)
    return pairs[mask].astype(np.uint8)


def depuncture(soft):
    """Re-insert zero-confidence values at punctured positions; returns (steps x 2)."""
    soft = np.asarray(soft, dtype=float).ravel()
    if soft.size % PUNCTURED_BITS:
        raise PunctureError(f"{soft.size} soft values do not fill whole {PUNCTURED_BITS}-bit puncture periods")
    periods = soft.size // PUNCTURED_BITS
    full = np.zeros(periods * 2 * PUNCTURE_PERIOD)
    full[np.tile(_puncture_mask(), periods)] = soft
    return full.reshape(-1, 2)


def _trellis():
    states = np.arange(N_STATES)
    newest = states >> (CONSTRAINT_LENGTH - 2)
    pred0 = (states & (N_STATES // 2 - 1)) << 1
    pred1 = pred0 | 1
    signs = []
    for pred in (pred0, pred1):
        reg = (newest << (CONSTRAINT_LENGTH - 1)) | pred
        for generator in (G1, G2):
            parity = np.array([bin(r & generator).count('1') & 1 for r in reg])
            signs.append(1.0 - 2.0 * parity)
    return pred0, pred1, signs


def viterbi_decode(soft, n_bits=None, terminated=True):
    """
    Soft-decision Viterbi decoder for conv_encode() output.

    :param soft: Punctured soft values, positive favouring bit 0.
    :param n_bits: Number of information bits to return (drops tail and padding).
    :param terminated: Trace back from state 0 instead of the best end state.
    :return: Decoded bits as uint8.
    """
    pairs = depuncture(soft)
    steps = pairs.shape[0]
    pred0, pred1, (sx0, sy0, sx1, sy1) = _trellis()
    metrics = np.full(N_STATES, -np.inf)
    metrics[0] = 0.0
    decisions = np.empty((steps, N_STATES), dtype=bool)

    for start in range(0, steps, BLOCK_STEPS):
        block = pairs[start:start + BLOCK_STEPS]
        rx, ry = block[:, :1], block[:, 1:]
        branch0 = rx * sx0 + ry * sy0
        branch1 = rx * sx1 + ry * sy1
        for t in range(block.shape[0]):
            m0 = metrics[pred0] + branch0[t]
            m1 = metrics[pred1] + branch1[t]
            choose = m1 > m0
            decisions[start + t] = choose
            metrics = np.where(choose, m1, m0)
        metrics -= metrics.max()

    state = 0 if terminated else int(np.argmax(metrics))
    decoded = np.empty(steps, dtype=np.uint8)
    shift = CONSTRAINT_LENGTH - 2
    low = N_STATES // 2 - 1
    for t in range(steps - 1, -1, -1):
        decoded[t] = state >> shift
        state = ((state & low) << 1) | int(decisions[t, state])
    return decoded if n_bits is None else decoded[:n_bits]
