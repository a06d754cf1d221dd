"""Monte Carlo engine: frames end-to-end, SNR points, and grid sweeps.

Reproducibility contract: every frame gets its own random stream derived
from (seed, SNR point index, frame index), frames are accumulated in frame
order, and the early-stop boundary is decided on that ordered stream, so
results are identical for any worker count.

Detection per symbol follows the radius policy r = 2*B*N0: when nothing
falls inside the sphere the radius is doubled and the symbol retried, up
to MAX_DOUBLINGS times, after which the full constellation is used for
that symbol. The 'lsd' detector evaluates the list operator one fading
block at a time with vectorized distance tables; 'lsd-tree' drives the
depth-first sphere search symbol by symbol and produces bit-identical
output (both feed the same demapper arithmetic); 'exhaustive' skips the
radius and list truncation entirely.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

import numpy as np

from .channel import FadingRealization, draw_fading, ebn0_to_n0, transmit
from .constellation import (
    DEFAULT_ENUMERATION_CAP,
    ConstellationSizeError,
    enumerate_supersymbols,
)
from .lsd import sphere_decode
from .modem import modulate_frame, nc_bit_sum
from .somap import DEFAULT_LLR_CLAMP, hard_decision, log_likelihood, nc_llrs

__all__ = ["SimConfig", "BerRecord", "MAX_DOUBLINGS", "run_frame", "run_point", "sweep"]

MAX_DOUBLINGS = 30

DETECTORS = ("lsd", "exhaustive", "lsd-tree")

# Element budget per distance-table chunk, to bound temporaries.
_DIST_CHUNK_ELEMS = 1 << 21


@dataclass(frozen=True)
class SimConfig:
    """All experiment parameters for one simulation campaign."""

    sources: int = 2
    mod_order: int = 2
    info_bits: int = 2304
    block_size: int | None = None  # None: one fading block per frame
    list_size: int = 5
    radius_scale: float = 2.0  # search radius is 2 * radius_scale * N0
    ebn0_grid: tuple[float, ...] = ()
    max_frames: int = 1000
    target_errors: int = 200
    seed: int = 1
    detector: str = "lsd"
    tighten_radius: bool = False

    def __post_init__(self):
        if self.sources < 2:
            raise ValueError("sources must be >= 2")
        if self.mod_order < 2 or (self.mod_order & (self.mod_order - 1)) != 0:
            raise ValueError("mod_order must be a power of two >= 2")
        if self.info_bits < 1 or self.info_bits % self.bits_per_symbol != 0:
            raise ValueError("info_bits must be a positive multiple of log2(mod_order)")
        if self.block_size is not None and self.block_size < 1:
            raise ValueError("block_size must be >= 1")
        if self.list_size < 1:
            raise ValueError("list_size must be >= 1")
        if self.radius_scale <= 0:
            raise ValueError("radius_scale must be positive")
        if self.max_frames < 1:
            raise ValueError("max_frames must be >= 1")
        if self.target_errors < 1:
            raise ValueError("target_errors must be >= 1")
        if self.detector not in DETECTORS:
            raise ValueError(f"detector must be one of {DETECTORS}")
        object.__setattr__(self, "ebn0_grid", tuple(float(x) for x in self.ebn0_grid))

    @property
    def bits_per_symbol(self) -> int:
        return self.mod_order.bit_length() - 1

    @property
    def symbols_per_frame(self) -> int:
        return self.info_bits // self.bits_per_symbol

    @property
    def effective_block_size(self) -> int:
        if self.block_size is None:
            return self.symbols_per_frame
        return min(self.block_size, self.symbols_per_frame)

    @property
    def blocks_per_frame(self) -> int:
        return -(-self.symbols_per_frame // self.effective_block_size)


@dataclass
class BerRecord:
    """Accumulated counts for one SNR point."""

    ebn0_db: float
    bit_errors: int
    bits_total: int
    frames: int
    lsd_retries: int

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_total if self.bits_total else 0.0


def _candidate_tables(gains_block: np.ndarray, mod_order: int):
    """(vectors, labels) arrays of the full constellation, lexicographic order."""
    supers = enumerate_supersymbols(gains_block, mod_order)
    vectors = np.stack([s.vector for s in supers])
    labels = np.stack([s.nc_label for s in supers])
    return vectors, labels


def _distance_table(vectors: np.ndarray, y_block: np.ndarray) -> np.ndarray:
    """Squared distances (num_candidates, num_symbols), canonical order.

    Accumulates per dimension with np.add.reduce so every entry matches
    somap.squared_distance bitwise.
    """
    n, m = vectors.shape
    ns = y_block.shape[1]
    out = np.empty((n, ns), dtype=np.float64)
    chunk = max(1, _DIST_CHUNK_ELEMS // max(1, n * m))
    for s in range(0, ns, chunk):
        z = vectors[:, :, None] - y_block[None, :, s : s + chunk]
        w = z.real * z.real + z.imag * z.imag
        out[:, s : s + chunk] = np.add.reduce(w, axis=1)
    return out


def _block_bits_batch(
    y_block: np.ndarray,
    vectors: np.ndarray,
    labels: np.ndarray,
    n0: float,
    config: SimConfig,
) -> tuple[np.ndarray, int]:
    """Detect one fading block of symbols with vectorized candidate lists.

    Returns (bits, retries) where bits has shape (num_symbols, mu).
    """
    n = vectors.shape[0]
    m = vectors.shape[1]
    mu = config.bits_per_symbol
    ns = y_block.shape[1]
    dist = _distance_table(vectors, y_block)

    retries = 0
    if config.detector == "exhaustive":
        r2 = np.full(ns, np.inf)
        keep = n
        fallback = np.zeros(ns, dtype=bool)
    else:
        r_base = 2.0 * config.radius_scale * n0
        dmin = dist.min(axis=0)
        r2 = np.full(ns, r_base * r_base)
        doublings = np.zeros(ns, dtype=np.int64)
        while True:
            need = (dmin > r2) & (doublings < MAX_DOUBLINGS)
            if not need.any():
                break
            r2[need] *= 4.0
            doublings[need] += 1
        retries = int(doublings.sum())
        fallback = dmin > r2  # still empty after the cap: use the full list
        r2[fallback] = np.inf
        keep = min(config.list_size, n)

    order = np.argsort(dist, axis=0, kind="stable")  # ties resolve lexicographic
    idx = order[:keep, :]
    dsel = np.take_along_axis(dist, idx, axis=0)
    valid = dsel <= r2[None, :]
    c0 = -m * math.log(math.pi * n0)
    lp = c0 - dsel / n0
    labsel = labels[idx]  # (keep, ns, mu)

    bits = np.empty((ns, mu), dtype=np.int8)
    for i in range(mu):
        ones = labsel[:, :, i] == 1
        pos = np.logaddexp.reduce(np.where(valid & ones, lp, -np.inf), axis=0)
        neg = np.logaddexp.reduce(np.where(valid & ~ones, lp, -np.inf), axis=0)
        z = np.clip(pos - neg, -DEFAULT_LLR_CLAMP, DEFAULT_LLR_CLAMP)
        bits[:, i] = z > 0

    if fallback.any():
        for i in np.nonzero(fallback)[0]:
            full = order[:, i]
            llrs = nc_llrs(labels[full], c0 - dist[full, i] / n0)
            bits[i] = hard_decision(llrs)
    return bits, retries


def _block_bits_tree(
    y_block: np.ndarray,
    subset_sums_row: np.ndarray,
    n0: float,
    config: SimConfig,
    tables: tuple[np.ndarray, np.ndarray] | None,
) -> tuple[np.ndarray, int]:
    """Per-symbol depth-first sphere search; reference path for 'lsd-tree'."""
    m = y_block.shape[0]
    mu = config.bits_per_symbol
    ns = y_block.shape[1]
    r_base = 2.0 * config.radius_scale * n0
    bits = np.empty((ns, mu), dtype=np.int8)
    retries = 0
    for i in range(ns):
        y_col = y_block[:, i]
        attempt = 0
        while True:
            cand = sphere_decode(
                y_col,
                subset_sums_row,
                m,
                config.sources,
                r_base * 2.0**attempt,
                config.list_size,
                tighten_radius=config.tighten_radius,
            )
            if len(cand) or attempt >= MAX_DOUBLINGS:
                break
            attempt += 1
        retries += attempt
        if len(cand):
            logps = np.array(
                [log_likelihood(y_col, s.vector, n0) for s, _ in cand.entries]
            )
            llrs = nc_llrs(cand.labels(), logps)
        elif tables is not None:
            vectors, labels = tables
            dist = _distance_table(vectors, y_col[:, None])[:, 0]
            full = np.argsort(dist, kind="stable")
            c0 = -m * math.log(math.pi * n0)
            llrs = nc_llrs(labels[full], c0 - dist[full] / n0)
        else:
            # Constellation too large to enumerate: keep widening instead.
            while True:
                attempt += 1
                cand = sphere_decode(
                    y_col,
                    subset_sums_row,
                    m,
                    config.sources,
                    r_base * 2.0**attempt,
                    config.list_size,
                    tighten_radius=config.tighten_radius,
                )
                retries += 1
                if len(cand):
                    break
            logps = np.array(
                [log_likelihood(y_col, s.vector, n0) for s, _ in cand.entries]
            )
            llrs = nc_llrs(cand.labels(), logps)
        bits[i] = hard_decision(llrs)
    return bits, retries


def run_frame(
    config: SimConfig,
    n0: float,
    fading: FadingRealization,
    rng: np.random.Generator,
) -> tuple[int, int, int]:
    """One frame end-to-end; returns (bit_errors, bits, lsd_retries).

    Draws K information sequences, transmits them over the given fading
    realization, detects the XOR bits symbol by symbol, and counts the
    Hamming distance to the true modulo-2 bit sum.
    """
    num_sources = config.sources
    mod_order = config.mod_order
    streams = [
        rng.integers(0, 2, size=config.info_bits, dtype=np.int8)
        for _ in range(num_sources)
    ]
    truth = nc_bit_sum(streams)
    frames = [modulate_frame(b, mod_order) for b in streams]
    obs = transmit(frames, fading, n0, rng, config.block_size)

    can_enumerate = mod_order**num_sources <= DEFAULT_ENUMERATION_CAP
    if config.detector == "exhaustive" and not can_enumerate:
        raise ConstellationSizeError(
            "exhaustive detector needs M^K within the enumeration cap"
        )

    n_eff = config.effective_block_size
    ns = config.symbols_per_frame
    mu = config.bits_per_symbol
    decided = np.empty((ns, mu), dtype=np.int8)
    retries = 0
    for b in range(config.blocks_per_frame):
        sl = slice(b * n_eff, min((b + 1) * n_eff, ns))
        y_block = obs.columns[:, sl]
        tables = None
        if can_enumerate:
            tables = _candidate_tables(fading.gains[:, b], mod_order)
        if config.detector == "lsd-tree" or tables is None:
            block_bits, block_retries = _block_bits_tree(
                y_block, fading.subset_sums[b], n0, config, tables
            )
        else:
            block_bits, block_retries = _block_bits_batch(
                y_block, tables[0], tables[1], n0, config
            )
        decided[sl] = block_bits
        retries += block_retries

    errors = int(np.sum(decided.reshape(-1) != truth))
    return errors, config.info_bits, retries


def _frame_task(args) -> tuple[int, int, int]:
    config, n0, point_index, frame_index = args
    rng = np.random.default_rng(
        np.random.SeedSequence(config.seed, spawn_key=(point_index, frame_index))
    )
    fading = draw_fading(config.sources, config.blocks_per_frame, rng)
    return run_frame(config, n0, fading, rng)


def _ordered_results(
    tasks: Iterable, pool: ProcessPoolExecutor | None
) -> Iterator[tuple[int, int, int]]:
    if pool is None:
        return map(_frame_task, tasks)
    return pool.map(_frame_task, tasks, chunksize=4)


def run_point(
    config: SimConfig,
    ebn0_db: float,
    point_index: int | None = None,
    workers: int = 1,
) -> BerRecord:
    """Accumulate frames at one SNR point until target_errors or max_frames.

    Frames are evaluated on independent streams keyed by (seed, point
    index, frame index) and always accumulated in frame order, so the
    record does not depend on `workers`.
    """
    if point_index is None:
        try:
            point_index = config.ebn0_grid.index(float(ebn0_db))
        except ValueError:
            raise ValueError(
                "ebn0_db not on config.ebn0_grid; pass point_index explicitly"
            ) from None
    n0 = ebn0_to_n0(ebn0_db, config.bits_per_symbol)
    errors = bits = retries = frames = 0

    pool = None
    if workers > 1:
        pool = ProcessPoolExecutor(max_workers=workers)
    try:
        wave = max(16, 4 * workers)
        start = 0
        stop = False
        while not stop and start < config.max_frames:
            end = min(start + wave, config.max_frames)
            tasks = ((config, n0, point_index, f) for f in range(start, end))
            for e, b, r in _ordered_results(tasks, pool):
                errors += e
                bits += b
                retries += r
                frames += 1
                if errors >= config.target_errors:
                    stop = True
                    break
            start = end
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)

    return BerRecord(
        ebn0_db=float(ebn0_db),
        bit_errors=errors,
        bits_total=bits,
        frames=frames,
        lsd_retries=retries,
    )


def sweep(
    config: SimConfig,
    workers: int = 1,
    on_record: Callable[[BerRecord], None] | None = None,
) -> list[BerRecord]:
    """One BerRecord per grid point, in grid order."""
    if not config.ebn0_grid:
        raise ValueError("ebn0_grid is empty")
    records = []
    for index, ebn0_db in enumerate(config.ebn0_grid):
        record = run_point(config, ebn0_db, point_index=index, workers=workers)
        records.append(record)
        if on_record is not None:
            on_record(record)
    return records
