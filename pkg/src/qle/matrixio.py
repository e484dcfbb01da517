"""Plain-text complex matrix format shared by the network and scattering tools.

The first line holds the dimension ``n``; each of the next ``n`` lines holds
``n`` whitespace-separated entries written as ``a+bi``. Writers use 17
significant digits so that a round trip is lossless.
"""

from __future__ import annotations

import os
import re
from pathlib import Path

import numpy as np

from .errors import NotSquareError
from .ioutil import atomic_write_text

_IMAG_ONLY = re.compile(r"^([+-]?)i$")


def parse_complex(token: str) -> complex:
    """Parse ``a+bi``, ``bi``, ``a`` or ``i`` (``j`` is accepted too)."""
    tok = token.strip().replace("J", "j").replace("I", "i")
    m = _IMAG_ONLY.match(tok)
    if m:
        return complex(0.0, -1.0 if m.group(1) == "-" else 1.0)
    tok = tok.replace("i", "j")
    if tok.endswith(("+j", "-j")):
        tok = tok[:-1] + "1j"
    try:
        return complex(tok)
    except ValueError:
        raise ValueError(f"cannot parse complex entry {token!r}") from None


def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}i"


def loads_matrix(text: str) -> np.ndarray:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty matrix file")
    try:
        dim = int(lines[0])
    except ValueError:
        raise ValueError(f"first line must be the dimension, got {lines[0]!r}") from None
    if dim < 1:
        raise NotSquareError(f"dimension must be >= 1, got {dim}")
    rows = lines[1:]
    if len(rows) != dim:
        raise NotSquareError(f"expected {dim} rows, found {len(rows)}")
    out = np.empty((dim, dim), dtype=complex)
    for j, row in enumerate(rows):
        tokens = row.split()
        if len(tokens) != dim:
            raise NotSquareError(f"row {j} has {len(tokens)} entries, expected {dim}")
        out[j] = [parse_complex(t) for t in tokens]
    return out


def dumps_matrix(matrix) -> str:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquareError(f"expected a square matrix, got shape {m.shape}")
    rows = [" ".join(format_complex(z) for z in row) for row in m]
    return "\n".join([str(m.shape[0]), *rows]) + "\n"


def read_matrix(path: str | os.PathLike) -> np.ndarray:
    return loads_matrix(Path(path).read_text())


def write_matrix(path: str | os.PathLike, matrix) -> None:
    atomic_write_text(path, dumps_matrix(matrix))
