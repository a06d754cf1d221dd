"""Per-slot XOR-packet detection for network-coded slotted ALOHA.

Simulates K sources colliding in one slot with M-ary orthogonal modulation
over block-Rayleigh fading, and detects the modulo-2 combination of their
bits with a list sphere decoder feeding a soft demapper. Includes a Monte
Carlo harness and CLI for reproducing BER-vs-Eb/N0 curves.
"""

from .channel import (
    FadingRealization,
    ObservationFrame,
    draw_fading,
    ebn0_to_n0,
    noiseless_columns,
    transmit,
)
from .constellation import (
    ConstellationSizeError,
    SuperSymbol,
    enumerate_supersymbols,
    nc_label,
    subset_sum_table,
    supersymbol_vector,
)
from .harness import BerRecord, SimConfig, run_frame, run_point, sweep
from .lsd import CandidateList, component_in_radius, sphere_decode
from .modem import SymbolFrame, modulate_frame, nc_bit_sum, symbol_bits
from .somap import (
    hard_decision,
    log_likelihood,
    max_star,
    nc_llrs,
    squared_distance,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BerRecord",
    "CandidateList",
    "ConstellationSizeError",
    "FadingRealization",
    "ObservationFrame",
    "SimConfig",
    "SuperSymbol",
    "SymbolFrame",
    "component_in_radius",
    "draw_fading",
    "ebn0_to_n0",
    "enumerate_supersymbols",
    "hard_decision",
    "log_likelihood",
    "max_star",
    "modulate_frame",
    "nc_bit_sum",
    "nc_label",
    "nc_llrs",
    "noiseless_columns",
    "run_frame",
    "run_point",
    "sphere_decode",
    "squared_distance",
    "subset_sum_table",
    "supersymbol_vector",
    "sweep",
    "transmit",
]
