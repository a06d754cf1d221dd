"""Command-line front end: run BER sweeps to CSV, and measure curve gaps.

Usage:
    pncsim --sources 2 --mod-order 2 --snr 24:0.5:32 --seed 7 --out ber.csv
    pncsim gap k2.csv k3.csv

Results go to a CSV (one row per SNR point) with a sibling
<out>.manifest.json echoing the full configuration; re-running with the
same configuration and seed reproduces the CSV byte for byte.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from .harness import BerRecord, SimConfig, sweep

__all__ = [
    "RunManifest",
    "NoCrossingError",
    "parse_snr_spec",
    "parse_args",
    "build_manifest",
    "write_csv",
    "read_csv",
    "crossing_ebn0",
    "gap_report",
    "main",
    "console_main",
]

_CONFIG_KEYS = tuple(f.name for f in dataclasses.fields(SimConfig))


class NoCrossingError(ValueError):
    """The BER curve never crosses the requested target level."""


@dataclass
class RunManifest:
    """Everything needed to reproduce and interpret one CSV of results."""

    config: SimConfig
    version: str
    created_utc: str
    records: list[BerRecord]


def parse_snr_spec(text: str) -> tuple[float, ...]:
    """Grid from 'start:step:stop' (inclusive) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("SNR range must be start:step:stop")
        start, step, stop = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("SNR step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        if count < 1:
            raise ValueError("SNR range is empty")
        return tuple(start + i * step for i in range(count))
    values = tuple(float(p) for p in text.split(",") if p.strip())
    if not values:
        raise ValueError("SNR list is empty")
    return values


def _run_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="pncsim",
        description="Monte Carlo BER simulation of per-slot XOR detection",
    )
    p.add_argument("--sources", type=int, help="number of simultaneous sources K")
    p.add_argument("--mod-order", type=int, help="orthogonal modulation order M")
    p.add_argument("--info-bits", type=int, help="information bits per frame")
    p.add_argument("--block-size", type=int, help="fading block length in symbols")
    p.add_argument("--list-size", type=int, help="sphere decoder list capacity")
    p.add_argument(
        "--radius-scale", type=float, help="B in the search radius r = 2*B*N0"
    )
    p.add_argument("--snr", help="Eb/N0 grid in dB: start:step:stop or comma list")
    p.add_argument("--frames", type=int, help="maximum frames per SNR point")
    p.add_argument("--target-errors", type=int, help="early-stop bit error count")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument(
        "--detector",
        choices=["lsd", "exhaustive", "lsd-tree"],
        help="receiver front end",
    )
    p.add_argument(
        "--tighten-radius",
        action="store_const",
        const=True,
        help="shrink the search sphere to the current worst list entry",
    )
    p.add_argument("--config", help="JSON file with SimConfig keys; flags override")
    p.add_argument("--out", default="ber_results.csv", help="output CSV path")
    p.add_argument("--workers", type=int, default=1, help="parallel frame workers")
    return p


_FLAG_TO_FIELD = {
    "sources": "sources",
    "mod_order": "mod_order",
    "info_bits": "info_bits",
    "block_size": "block_size",
    "list_size": "list_size",
    "radius_scale": "radius_scale",
    "frames": "max_frames",
    "target_errors": "target_errors",
    "seed": "seed",
    "detector": "detector",
    "tighten_radius": "tighten_radius",
}


def _merge_config(ns: argparse.Namespace) -> SimConfig:
    kwargs: dict = {}
    if ns.config:
        with open(ns.config, "r", encoding="utf-8") as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise ValueError("config file must hold a JSON object")
        unknown = set(loaded) - set(_CONFIG_KEYS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs.update(loaded)
    for flag, field in _FLAG_TO_FIELD.items():
        value = getattr(ns, flag)
        if value is not None:
            kwargs[field] = value
    if ns.snr is not None:
        kwargs["ebn0_grid"] = parse_snr_spec(ns.snr)
    grid = kwargs.get("ebn0_grid")
    if isinstance(grid, str):
        kwargs["ebn0_grid"] = parse_snr_spec(grid)
    # an empty grid parses fine; sweep() rejects it with its own diagnostic
    return SimConfig(**kwargs)


def parse_args(argv: Sequence[str]) -> SimConfig:
    """Parse run-mode flags into a validated SimConfig."""
    ns = _run_parser().parse_args(list(argv))
    return _merge_config(ns)


def build_manifest(config: SimConfig, records: list[BerRecord]) -> RunManifest:
    from . import __version__

    return RunManifest(
        config=config,
        version=__version__,
        created_utc=datetime.now(timezone.utc).isoformat(),
        records=list(records),
    )


def _record_row(r: BerRecord) -> dict:
    return {
        "ebn0_db": r.ebn0_db,
        "ber": r.ber,
        "bit_errors": r.bit_errors,
        "bits_total": r.bits_total,
        "frames": r.frames,
        "lsd_retries": r.lsd_retries,
    }


def write_csv(records: list[BerRecord], manifest: RunManifest, path) -> None:
    """Write one CSV row per SNR point plus a JSON manifest sibling.

    Floats are written with repr (shortest round-trip form); a BER of
    exactly zero errors is written as plain `0`.
    """
    if not records:
        raise ValueError("no records to write")
    path = Path(path)
    lines = ["ebn0_db,ber,bit_errors,bits_total,frames,lsd_retries"]
    for r in records:
        ber = "0" if r.bit_errors == 0 else repr(r.ber)
        lines.append(
            f"{r.ebn0_db!r},{ber},{r.bit_errors},{r.bits_total},"
            f"{r.frames},{r.lsd_retries}"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="")
    payload = {
        "version": manifest.version,
        "created_utc": manifest.created_utc,
        "config": dataclasses.asdict(manifest.config) | {
            "ebn0_grid": list(manifest.config.ebn0_grid)
        },
        "records": [_record_row(r) for r in manifest.records],
    }
    manifest_path = path.with_name(path.name + ".manifest.json")
    manifest_path.write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def read_csv(path) -> list[dict]:
    """Rows of a results CSV as dicts with numeric values."""
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty results file")
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        row = dict(zip(header, parts))
        rows.append(
            {
                "ebn0_db": float(row["ebn0_db"]),
                "ber": float(row["ber"]),
                "bit_errors": int(row["bit_errors"]),
                "bits_total": int(row["bits_total"]),
                "frames": int(row["frames"]),
                "lsd_retries": int(row["lsd_retries"]),
            }
        )
    return rows


def crossing_ebn0(
    ebn0: Sequence[float], ber: Sequence[float], target: float = 1e-3
) -> float:
    """Eb/N0 where the curve crosses `target`, log-linear interpolation.

    Scans grid order for the first adjacent pair bracketing the target
    with strictly positive BERs and interpolates linearly in
    (Eb/N0, log10 BER).
    """
    if len(ebn0) != len(ber) or len(ebn0) < 1:
        raise ValueError("ebn0 and ber must be equal-length, non-empty")
    if target <= 0:
        raise ValueError("target must be positive")
    for i in range(len(ebn0) - 1):
        a, b = ber[i], ber[i + 1]
        if a == target:
            return float(ebn0[i])
        if a > target > b and b > 0:
            la, lb, lt = math.log10(a), math.log10(b), math.log10(target)
            return float(ebn0[i] + (ebn0[i + 1] - ebn0[i]) * (lt - la) / (lb - la))
        if a > target == b:
            return float(ebn0[i + 1])
    if ber[-1] == target:
        return float(ebn0[-1])
    raise NoCrossingError(f"curve never crosses BER {target:g}")


def gap_report(path_low, path_high, target: float = 1e-3) -> float:
    """dB gap at the target BER between two result curves (high minus low)."""
    rows_low = read_csv(path_low)
    rows_high = read_csv(path_high)
    x_low = crossing_ebn0(
        [r["ebn0_db"] for r in rows_low], [r["ber"] for r in rows_low], target
    )
    x_high = crossing_ebn0(
        [r["ebn0_db"] for r in rows_high], [r["ber"] for r in rows_high], target
    )
    return x_high - x_low


def _run_main(argv: Sequence[str]) -> int:
    try:
        ns = _run_parser().parse_args(list(argv))
        config = _merge_config(ns)
    except SystemExit as exc:  # argparse already printed a diagnostic
        return int(exc.code or 0)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        def progress(r: BerRecord) -> None:
            print(
                f"Eb/N0 {r.ebn0_db:6.2f} dB: ber={r.ber:.6g} "
                f"errors={r.bit_errors} frames={r.frames} retries={r.lsd_retries}",
                flush=True,
            )

        records = sweep(config, workers=ns.workers, on_record=progress)
        write_csv(records, build_manifest(config, records), ns.out)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {ns.out}")
    return 0


def _gap_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="pncsim gap",
        description="dB gap between two BER curves at a target error rate",
    )
    p.add_argument("csv_low", help="results CSV of the better (lower-K) curve")
    p.add_argument("csv_high", help="results CSV of the worse (higher-K) curve")
    p.add_argument("--target-ber", type=float, default=1e-3)
    return p


def _gap_main(argv: Sequence[str]) -> int:
    try:
        ns = _gap_parser().parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        gap = gap_report(ns.csv_low, ns.csv_high, ns.target_ber)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"gap at BER {ns.target_ber:g}: {gap:.4f} dB")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    if argv and argv[0] == "gap":
        return _gap_main(argv[1:])
    return _run_main(argv)


def console_main() -> None:
    raise SystemExit(main())
