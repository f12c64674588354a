# network/codes.py

from antenna import CodeWord

CODE_BITS = 16
RADIXES = {'bin': 2, 'hex': 16, 'dec': 10}
PREFIXES = {'bin': '0b', 'hex': '0x'}
DIGITS = {'bin': set('01'), 'hex': set('0123456789abcdef'), 'dec': set('0123456789')}


class CodeTextError(ValueError):
    pass


def parse_code_text(text, radix='bin', n_bits=CODE_BITS):
    """
    Parse a steering code typed as binary, hexadecimal or decimal text.

    Underscores, spaces and a 0b/0x prefix matching the radix are ignored.

    :param text: Code as entered by the operator.
    :param radix: 'bin', 'hex' or 'dec'.
    :param n_bits: Width of the code word.
    :return: CodeWord of n_bits bits.
    """
    if radix not in RADIXES:
        raise CodeTextError(f"Unknown radix {radix!r}; expected one of {sorted(RADIXES)}")
    cleaned = str(text).strip().replace('_', '').replace(' ', '').lower()
    prefix = PREFIXES.get(radix)
    if prefix and cleaned.startswith(prefix):
        cleaned = cleaned[len(prefix):]
    if not cleaned:
        raise CodeTextError(f"Empty {radix} code")
    bad = sorted(set(cleaned) - DIGITS[radix])
    if bad:
        raise CodeTextError(f"Invalid {radix} digit(s) {''.join(bad)!r} in {text!r}")
    value = int(cleaned, RADIXES[radix])
    if value >= 1 << n_bits:
        raise CodeTextError(f"{text!r} overflows {n_bits} bits")
    return CodeWord.from_int(value, n_bits)
