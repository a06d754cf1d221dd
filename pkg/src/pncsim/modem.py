"""M-ary orthogonal modulation: bit/symbol mapping and XOR bit streams.

Bits are plain numpy int8 arrays of 0/1. A symbol is the integer index of
the orthogonal dimension it occupies; the dense one-hot vector is never
stored, it only materializes inside channel and detector arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = ["SymbolFrame", "modulate_frame", "symbol_bits", "nc_bit_sum"]


def _check_mod_order(mod_order: int) -> int:
    """Return mu = log2(mod_order), rejecting non-powers of two."""
    if mod_order < 2 or (mod_order & (mod_order - 1)) != 0:
        raise ValueError(f"mod_order must be a power of two >= 2, got {mod_order}")
    return mod_order.bit_length() - 1


@dataclass
class SymbolFrame:
    """One source's frame of symbol indices, each in [0, mod_order)."""

    symbols: np.ndarray
    mod_order: int

    def __post_init__(self):
        self.symbols = np.asarray(self.symbols, dtype=np.int64)
        _check_mod_order(self.mod_order)
        if self.symbols.ndim != 1:
            raise ValueError("symbols must be one-dimensional")
        if self.symbols.size and (
            self.symbols.min() < 0 or self.symbols.max() >= self.mod_order
        ):
            raise ValueError("symbol index out of range")

    @property
    def bits_per_symbol(self) -> int:
        return self.mod_order.bit_length() - 1

    @property
    def num_symbols(self) -> int:
        return int(self.symbols.size)


def modulate_frame(info_bits: np.ndarray, mod_order: int) -> SymbolFrame:
    """Map an information bit sequence to a frame of M-ary symbol indices.

    Each group of mu = log2(M) consecutive bits becomes one symbol; the
    mapping is natural binary, most-significant bit first.
    """
    mu = _check_mod_order(mod_order)
    bits = np.asarray(info_bits, dtype=np.int64)
    if bits.ndim != 1:
        raise ValueError("info_bits must be one-dimensional")
    if not np.isin(bits, (0, 1)).all():
        raise ValueError("info_bits must contain only 0 and 1")
    if bits.size % mu != 0:
        raise ValueError(
            f"bit count {bits.size} not divisible by bits per symbol {mu}"
        )
    weights = 1 << np.arange(mu - 1, -1, -1, dtype=np.int64)
    symbols = bits.reshape(-1, mu) @ weights
    return SymbolFrame(symbols=symbols, mod_order=mod_order)


def symbol_bits(symbol: int, bits_per_symbol: int) -> np.ndarray:
    """Inverse of the modulator mapping: MSB-first bits of a symbol index."""
    if bits_per_symbol < 1:
        raise ValueError("bits_per_symbol must be >= 1")
    if not 0 <= symbol < (1 << bits_per_symbol):
        raise ValueError(f"symbol {symbol} out of range for {bits_per_symbol} bits")
    shifts = np.arange(bits_per_symbol - 1, -1, -1, dtype=np.int64)
    return ((symbol >> shifts) & 1).astype(np.int8)


def nc_bit_sum(sources: Sequence[np.ndarray]) -> np.ndarray:
    """Modulo-2 sum (XOR) of equal-length bit sequences, one per source."""
    if len(sources) == 0:
        raise ValueError("need at least one bit sequence")
    arrays = [np.asarray(s, dtype=np.int8) for s in sources]
    length = arrays[0].size
    if any(a.size != length for a in arrays):
        raise ValueError("bit sequences must all have the same length")
    out = arrays[0].copy()
    for a in arrays[1:]:
        np.bitwise_xor(out, a, out=out)
    return out
