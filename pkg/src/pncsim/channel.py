"""Block-Rayleigh fading and the matched-filter front end of the receiver.

Each source sees an independent complex gain per fading block: amplitude
Rayleigh with scale 1/sqrt(2) (unit mean-square), phase uniform. All K
faded frames add in the air; the matched-filter bank then yields, per
symbol period, an M-vector whose entry m is the subset sum of the gains of
the sources that transmitted dimension m, plus circularly-symmetric
complex Gaussian noise.

Noise convention: N0 is the variance of each complex vector entry, i.e.
N0/2 per real part and N0/2 per imaginary part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .constellation import subset_sum_table
from .modem import SymbolFrame

__all__ = [
    "FadingRealization",
    "ObservationFrame",
    "draw_fading",
    "ebn0_to_n0",
    "noiseless_columns",
    "transmit",
]


@dataclass(eq=False)
class FadingRealization:
    """Per-source, per-block gains plus the 2^K subset-sum table per block.

    gains has shape (K, Nb); subset_sums has shape (Nb, 2^K) and row b is
    subset_sum_table(gains[:, b]).
    """

    gains: np.ndarray
    subset_sums: np.ndarray

    @property
    def num_sources(self) -> int:
        return int(self.gains.shape[0])

    @property
    def num_blocks(self) -> int:
        return int(self.gains.shape[1])


@dataclass(eq=False)
class ObservationFrame:
    """Matched-filter outputs: columns[:, i] is the M-vector of symbol i."""

    columns: np.ndarray
    n0: float

    def __post_init__(self):
        if self.n0 <= 0:
            raise ValueError("n0 must be positive")

    @property
    def mod_order(self) -> int:
        return int(self.columns.shape[0])

    @property
    def num_symbols(self) -> int:
        return int(self.columns.shape[1])


def draw_fading(
    num_sources: int, num_blocks: int, rng: np.random.Generator
) -> FadingRealization:
    """Draw independent block-fading gains and precompute their subset sums."""
    if num_sources < 1 or num_blocks < 1:
        raise ValueError("num_sources and num_blocks must be >= 1")
    amplitude = rng.rayleigh(scale=1.0 / math.sqrt(2.0), size=(num_sources, num_blocks))
    phase = rng.uniform(0.0, 2.0 * math.pi, size=(num_sources, num_blocks))
    gains = amplitude * np.exp(1j * phase)
    subset_sums = np.empty((num_blocks, 1 << num_sources), dtype=np.complex128)
    for b in range(num_blocks):
        subset_sums[b] = subset_sum_table(gains[:, b])
    return FadingRealization(gains=gains, subset_sums=subset_sums)


def ebn0_to_n0(ebn0_db: float, bits_per_symbol: int) -> float:
    """Noise density for a per-source Eb/N0 in dB.

    Symbols are unit-energy one-hot vectors, so each source spends
    Eb = 1/mu per information bit and N0 = 1 / (mu * 10^(ebn0_db/10)).
    """
    if bits_per_symbol < 1:
        raise ValueError("bits_per_symbol must be >= 1")
    return 1.0 / (bits_per_symbol * 10.0 ** (ebn0_db / 10.0))


def _effective_block_size(block_size: int | None, num_symbols: int) -> int:
    # A block longer than the frame means one fading block for the frame.
    if block_size is None:
        return num_symbols
    if block_size < 1:
        raise ValueError("block_size must be >= 1")
    return min(block_size, num_symbols)


def noiseless_columns(
    frames: Sequence[SymbolFrame],
    fading: FadingRealization,
    block_size: int | None = None,
) -> np.ndarray:
    """Superimposed matched-filter outputs before noise, shape (M, Nq).

    Column i, entry m is fading.subset_sums[block(i)][mask of sources with
    symbol m at period i]; the table lookup makes this bitwise equal to
    `constellation.supersymbol_vector` for the same assignment.
    """
    if len(frames) == 0:
        raise ValueError("need at least one source frame")
    if len(frames) != fading.num_sources:
        raise ValueError("frame count does not match fading source count")
    mod_order = frames[0].mod_order
    num_symbols = frames[0].num_symbols
    for f in frames:
        if f.mod_order != mod_order or f.num_symbols != num_symbols:
            raise ValueError("all source frames must share M and symbol count")
    n_eff = _effective_block_size(block_size, num_symbols)
    blocks = np.arange(num_symbols, dtype=np.int64) // n_eff
    if num_symbols and blocks[-1] >= fading.num_blocks:
        raise ValueError(
            f"need {int(blocks[-1]) + 1} fading blocks, have {fading.num_blocks}"
        )
    cols = np.arange(num_symbols, dtype=np.int64)
    masks = np.zeros((mod_order, num_symbols), dtype=np.int64)
    for k, frame in enumerate(frames):
        masks[frame.symbols, cols] |= np.int64(1 << k)
    return fading.subset_sums[np.broadcast_to(blocks, masks.shape), masks]


def transmit(
    frames: Sequence[SymbolFrame],
    fading: FadingRealization,
    n0: float,
    rng: np.random.Generator,
    block_size: int | None = None,
) -> ObservationFrame:
    """Superimpose the faded source frames and add complex Gaussian noise."""
    if n0 <= 0:
        raise ValueError("n0 must be positive")
    clean = noiseless_columns(frames, fading, block_size)
    sigma = math.sqrt(n0 / 2.0)
    noise = rng.normal(0.0, sigma, size=clean.shape) + 1j * rng.normal(
        0.0, sigma, size=clean.shape
    )
    return ObservationFrame(columns=clean + noise, n0=n0)
