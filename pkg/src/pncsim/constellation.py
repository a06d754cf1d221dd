"""Super-symbols: joint source-to-dimension assignments and their geometry.

When K sources transmit simultaneously, each received dimension sees the
sum of the gains of the sources that picked it, so a dimension's value is
one of the 2^K subset sums of the gain vector and the whole received point
is one of M^K "super-symbols". Every super-symbol carries the XOR of the
per-source bit labels, which is what the receiver is after.

Summation convention: subset sums always accumulate gains in ascending
source order. `subset_sum_table`, `supersymbol_vector`, and the channel's
noiseless output therefore agree bitwise, not just to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from .modem import symbol_bits

__all__ = [
    "SuperSymbol",
    "ConstellationSizeError",
    "subset_sum_table",
    "supersymbol_vector",
    "nc_label",
    "enumerate_supersymbols",
    "DEFAULT_ENUMERATION_CAP",
]

# Exhaustive enumeration is meant for oracle receivers and small systems.
DEFAULT_ENUMERATION_CAP = 1 << 20


class ConstellationSizeError(ValueError):
    """M^K exceeds the enumeration cap; use the sphere decoder instead."""


@dataclass(eq=False)
class SuperSymbol:
    """One joint assignment: per-source symbol indices, received vector, XOR label."""

    assignment: tuple[int, ...]
    vector: np.ndarray
    nc_label: np.ndarray


def subset_sum_table(gains: np.ndarray) -> np.ndarray:
    """All 2^K sums of subsets of the K gains, indexed by source bitmask.

    Entry 0 is exactly 0. Built by adding the highest set bit's gain to the
    lower-bits entry, which keeps every entry an ascending-order sum.
    """
    gains = np.asarray(gains, dtype=np.complex128)
    if gains.ndim != 1 or gains.size < 1:
        raise ValueError("gains must be a non-empty one-dimensional array")
    num_sources = gains.size
    table = np.zeros(1 << num_sources, dtype=np.complex128)
    for k in range(num_sources):
        bit = 1 << k
        table[bit : bit << 1] = table[:bit] + gains[k]
    return table


def _dimension_masks(assignment: Sequence[int], mod_order: int) -> np.ndarray:
    """Per-dimension bitmask of the sources assigned to it."""
    masks = np.zeros(mod_order, dtype=np.int64)
    for k, q in enumerate(assignment):
        if not 0 <= q < mod_order:
            raise ValueError(f"symbol index {q} out of range for M={mod_order}")
        masks[q] |= 1 << k
    return masks


def supersymbol_vector(
    assignment: Sequence[int], gains: np.ndarray, mod_order: int
) -> np.ndarray:
    """Received-constellation point for one assignment under the given gains.

    Entry m is the sum of the gains of the sources assigned to dimension m
    (zero when none), accumulated in ascending source order.
    """
    gains = np.asarray(gains, dtype=np.complex128)
    vector = np.zeros(mod_order, dtype=np.complex128)
    for k, q in enumerate(assignment):
        if not 0 <= q < mod_order:
            raise ValueError(f"symbol index {q} out of range for M={mod_order}")
        vector[q] += gains[k]
    return vector


def nc_label(assignment: Sequence[int], bits_per_symbol: int) -> np.ndarray:
    """XOR of the per-source bit labels; equals the bits of XOR-ed indices."""
    acc = 0
    for q in assignment:
        acc ^= int(q)
    return symbol_bits(acc, bits_per_symbol)


def enumerate_supersymbols(
    gains: np.ndarray,
    mod_order: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> list[SuperSymbol]:
    """All M^K super-symbols in lexicographic assignment order.

    Vectors are read from the subset-sum table so they match channel output
    exactly. Raises ConstellationSizeError when M^K exceeds `cap`.
    """
    gains = np.asarray(gains, dtype=np.complex128)
    num_sources = gains.size
    mu = mod_order.bit_length() - 1
    if mod_order < 2 or (1 << mu) != mod_order:
        raise ValueError(f"mod_order must be a power of two >= 2, got {mod_order}")
    size = mod_order**num_sources
    if size > cap:
        raise ConstellationSizeError(
            f"M^K = {size} exceeds enumeration cap {cap}; use sphere decoding"
        )
    table = subset_sum_table(gains)
    out = []
    for assignment in product(range(mod_order), repeat=num_sources):
        masks = _dimension_masks(assignment, mod_order)
        out.append(
            SuperSymbol(
                assignment=assignment,
                vector=table[masks],
                nc_label=nc_label(assignment, mu),
            )
        )
    return out
