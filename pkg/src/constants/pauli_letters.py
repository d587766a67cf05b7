"""
Single-qubit Pauli letters.

The letters are used for:
- per-qubit frames of branched representatives
- logical Pauli products in measurement requests
- the textual Pauli string format
"""

from typing import List, Literal

PauliLetter = Literal['I', 'X', 'Y', 'Z']

PAULI_LETTERS: List[str] = ['I', 'X', 'Y', 'Z']

# (x bit, z bit) per letter
LETTER_BITS = {
    'I': (0, 0),
    'X': (1, 0),
    'Y': (1, 1),
    'Z': (0, 1),
}

BITS_LETTER = {bits: letter for letter, bits in LETTER_BITS.items()}


def is_valid_pauli_letter(letter: str, allow_identity: bool = True) -> bool:
    """
    Check if a given string is a single Pauli letter.

    Args:
        letter: The letter to validate
        allow_identity: Whether 'I' counts as valid

    Returns:
        True if the letter is valid, False otherwise
    """
    if not allow_identity and letter == 'I':
        return False
    return letter in PAULI_LETTERS


def anticommuting_letters(a: str, b: str) -> bool:
    """True when two single-qubit letters anticommute."""
    ax, az = LETTER_BITS[a]
    bx, bz = LETTER_BITS[b]
    return (ax * bz + az * bx) % 2 == 1
