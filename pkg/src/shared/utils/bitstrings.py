"""
Text rendering and parsing of measurement bitstrings.

Bitstrings are stored as unsigned integers with bit i holding atom i.
Text form lists atom 0 first, so "10" means atom 0 Rydberg, atom 1 ground.
"""

import re
from typing import Optional, Tuple

from src.shared.errors import ValidationError

BITSTRING_PATTERN = re.compile(r"^[01]+$")
COUNT_LINE_PATTERN = re.compile(r"^\s*([01]+)\s*,\s*([0-9]+)\s*$")

# Bitstring integers are held in uint64 arrays.
MAX_BITSTRING_ATOMS = 63


def render_bitstring(value: int, n_atoms: int) -> str:
    """Render an integer bitstring atom-0-first."""
    if n_atoms < 1:
        raise ValidationError(f"n_atoms must be positive, got {n_atoms}")
    if value < 0 or value >= (1 << n_atoms):
        raise ValidationError(f"bitstring {value} does not fit in {n_atoms} atoms")
    return "".join("1" if (value >> i) & 1 else "0" for i in range(n_atoms))


def parse_bitstring(text: str) -> Tuple[int, int]:
    """
    Parse atom-0-first text into (integer value, n_atoms).

    Raises:
        ValidationError: text is empty or contains characters other than 0/1
    """
    token = text.strip()
    if not BITSTRING_PATTERN.match(token):
        raise ValidationError(f"invalid bitstring {text!r}: only characters 0 and 1 are allowed")
    if len(token) > MAX_BITSTRING_ATOMS:
        raise ValidationError(f"bitstring of {len(token)} atoms exceeds the {MAX_BITSTRING_ATOMS}-atom limit")
    value = 0
    for i, char in enumerate(token):
        if char == "1":
            value |= 1 << i
    return value, len(token)


def parse_count_line(line: str) -> Optional[Tuple[str, int]]:
    """
    Parse a "bitstring,count" record.

    Returns:
        (bitstring text, count) or None when the line does not match the grammar
    """
    match = COUNT_LINE_PATTERN.match(line)
    if not match:
        return None
    return match.group(1), int(match.group(2))
