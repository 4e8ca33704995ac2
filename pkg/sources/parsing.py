"""
Text formats for points, complex numbers, matrices and words.

    point:    [z0:z1:...:zk]          e.g. [1:1], [0.5+2i : 1]
    complex:  re+im i                 e.g. 3, -2.5i, 1+2i, 1e-3-4 i, i
    matrix:   row-major, entries separated by commas and rows by semicolons
              e.g. "2, 0; 0, 0.5"
    word:     generator tokens separated by spaces, each g, g^-1 or g^k (k != 0)
              e.g. "g h^-1 g^3"

Positions in ParseError are 1-based.
"""

import re
from typing import List, Sequence, Tuple

import numpy as np

from sources.errors import ParseError, ZeroVector
from sources.projlin import ProjPoint, normalize_projective

_REAL = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(
    rf"^(?:(?P<re>{_REAL})(?:\s*(?P<sign>[+-])\s*(?P<im>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*[ij])?"
    rf"|(?P<pure>[+-]?(?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?)\s*\*?\s*[ij])$"
)
_TOKEN = re.compile(r"^(?P<name>[A-Za-z_][A-Za-z0-9_]*)(?:\^(?P<power>[+-]?\d+))?$")


def parse_complex(text: str, line: int = 1, column: int = 1) -> complex:
    """Parse "re+im i"; `column` is where text starts in its line, for error positions."""
    stripped = text.strip()
    offset = column + (len(text) - len(text.lstrip()))
    if not stripped:
        raise ParseError("empty number", line, offset, text)
    match = _COMPLEX.match(stripped)
    if match is None:
        raise ParseError(f"invalid complex number {stripped!r}", line, offset, text)
    if match.group("re") is not None:
        real = float(match.group("re"))
        if match.group("sign") is None:
            return complex(real, 0.0)
        imag = float(match.group("im")) if match.group("im") else 1.0
        return complex(real, -imag if match.group("sign") == "-" else imag)
    pure = match.group("pure")
    if pure in ("", "+"):
        return 1j
    if pure == "-":
        return -1j
    return complex(0.0, float(pure))


def format_complex(value: complex) -> str:
    """Inverse of parse_complex with 17 significant digits."""
    value = complex(value)
    sign = "-" if np.signbit(value.imag) else "+"
    return f"{value.real:.17g}{sign}{abs(value.imag):.17g}i"


def _split(text: str, separator: str, start: int) -> List[Tuple[str, int]]:
    """Pieces of text with the column of each piece's first character."""
    pieces, column = [], start
    for piece in text.split(separator):
        pieces.append((piece, column))
        column += len(piece) + 1
    return pieces


def parse_point(text: str, line: int = 1) -> ProjPoint:
    """Parse "[z0:z1:...]" into a normalized point."""
    stripped = text.rstrip()
    lead = len(stripped) - len(stripped.lstrip())
    body = stripped.lstrip()
    if not body.startswith("["):
        raise ParseError("expected '['", line, lead + 1, text)
    if not body.endswith("]"):
        raise ParseError("missing closing ']'", line, len(stripped) + 1, text)
    inner = body[1:-1]
    pieces = _split(inner, ":", lead + 2)
    if len(pieces) < 2:
        raise ParseError("a point needs at least two homogeneous coordinates", line, lead + 2, text)
    coords = [parse_complex(piece, line, column) for piece, column in pieces]
    try:
        return normalize_projective(np.array(coords, dtype=complex))
    except ZeroVector:
        raise ParseError("all homogeneous coordinates are zero", line, lead + 1, text)


def parse_points(text: str) -> List[ProjPoint]:
    """One point per non-empty line; lines starting with '#' are comments."""
    points = []
    for number, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        points.append(parse_point(raw, number))
    return points


def parse_matrix(text: str, line: int = 1, size: int = None) -> np.ndarray:
    """
    Row-major matrix "a, b; c, d". A single row of size**2 entries is reshaped.
    """
    rows = _split(text, ";", 1)
    values = []
    for row, column in rows:
        if not row.strip():
            raise ParseError("empty matrix row", line, column, text)
        values.append([parse_complex(piece, line, col) for piece, col in _split(row, ",", column)])
    if len(values) == 1 and size and len(values[0]) == size * size:
        values = [values[0][i * size:(i + 1) * size] for i in range(size)]
    width = len(values[0])
    if any(len(row) != width for row in values):
        raise ParseError("matrix rows have different lengths", line, 1, text)
    if len(values) != width or (size and width != size):
        raise ParseError(f"expected a square {size or width}x{size or width} matrix, "
                         f"got {len(values)}x{width}", line, 1, text)
    return np.array(values, dtype=complex)


def parse_word(text: str, line: int = 1) -> List[Tuple[str, int]]:
    """Tokens "g", "g^-1", "g^k" to (name, power) pairs; the empty word gives []."""
    tokens = []
    column = 1
    for piece in re.split(r"(\s+)", text):
        if piece and not piece.isspace():
            match = _TOKEN.match(piece)
            if match is None:
                raise ParseError(f"invalid word token {piece!r}", line, column, text)
            power = int(match.group("power")) if match.group("power") else 1
            if power == 0:
                raise ParseError("generator power must be nonzero", line, column, text)
            tokens.append((match.group("name"), power))
        column += len(piece)
    return tokens


def format_word(tokens: Sequence[Tuple[str, int]]) -> str:
    return " ".join(name if power == 1 else f"{name}^{power}" for name, power in tokens)
