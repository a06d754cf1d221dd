import numpy as np
import pytest

from pncsim.channel import draw_fading, ebn0_to_n0
from pncsim.harness import BerRecord, SimConfig, run_frame, run_point, sweep


def make_config(**overrides):
    base = dict(
        sources=2,
        mod_order=2,
        info_bits=48,
        ebn0_grid=(8.0,),
        max_frames=5,
        target_errors=10**9,
        seed=13,
    )
    base.update(overrides)
    return SimConfig(**base)


def test_config_validation():
    with pytest.raises(ValueError):
        make_config(sources=1)
    with pytest.raises(ValueError):
        make_config(mod_order=3)
    with pytest.raises(ValueError):
        make_config(mod_order=4, info_bits=7)
    with pytest.raises(ValueError):
        make_config(list_size=0)
    with pytest.raises(ValueError):
        make_config(detector="zf")
    with pytest.raises(ValueError):
        make_config(radius_scale=0.0)


def test_config_derived_sizes():
    cfg = make_config(mod_order=4, info_bits=2304, block_size=None)
    assert cfg.bits_per_symbol == 2
    assert cfg.symbols_per_frame == 1152
    assert cfg.effective_block_size == 1152  # min(block, frame) rule
    assert cfg.blocks_per_frame == 1
    cfg2 = make_config(info_bits=48, block_size=20)
    assert cfg2.blocks_per_frame == 3  # 48 symbols in blocks of 20


def test_run_frame_noiseless_and_bit_count():
    rng = np.random.default_rng(2)
    for mod_order, sources in ((2, 2), (4, 2), (2, 5)):
        cfg = make_config(sources=sources, mod_order=mod_order, info_bits=96)
        n0 = ebn0_to_n0(120.0, cfg.bits_per_symbol)
        fading = draw_fading(sources, 1, rng)
        errors, bits, _ = run_frame(cfg, n0, fading, rng)
        assert errors == 0
        assert bits == 96


def test_run_frame_full_length_frame_counts_2304_bits():
    cfg = make_config(info_bits=2304)
    rng = np.random.default_rng(6)
    fading = draw_fading(2, 1, rng)
    _, bits, _ = run_frame(cfg, ebn0_to_n0(8.0, 1), fading, rng)
    assert bits == 2304


def test_ber_monotone_trend_at_scale():
    """Estimated BER decreasing along an increasing SNR grid (1e6 bits/point)."""
    cfg = make_config(
        info_bits=2304,
        ebn0_grid=(8.0, 10.0, 12.0),
        max_frames=440,  # just over 1e6 bits per point
        seed=90,
    )
    records = sweep(cfg, workers=2)
    bers = [r.ber for r in records]
    assert all(r.bits_total >= 1_000_000 for r in records)
    assert bers[0] > bers[1] > bers[2]


def test_detector_paths_are_identical():
    """Batch list evaluation and per-symbol tree search must agree exactly."""
    for seed in (5, 6):
        for sources, mod_order in ((2, 2), (3, 4), (4, 2)):
            for snr in (0.0, 10.0, 25.0):
                results = []
                for detector in ("lsd", "lsd-tree"):
                    cfg = make_config(
                        sources=sources,
                        mod_order=mod_order,
                        info_bits=48,
                        seed=seed,
                        detector=detector,
                        list_size=4,
                    )
                    rng = np.random.default_rng(seed)
                    fading = draw_fading(sources, 1, rng)
                    n0 = ebn0_to_n0(snr, cfg.bits_per_symbol)
                    results.append(run_frame(cfg, n0, fading, rng))
                assert results[0] == results[1]


def test_detector_paths_identical_with_tighten_and_blocks():
    for detector in ("lsd", "lsd-tree"):
        cfg = make_config(
            sources=3, info_bits=60, block_size=12, detector=detector,
            tighten_radius=(detector == "lsd-tree"),
        )
        rng = np.random.default_rng(8)
        fading = draw_fading(3, cfg.blocks_per_frame, rng)
        n0 = ebn0_to_n0(6.0, 1)
        out = run_frame(cfg, n0, fading, rng)
        if detector == "lsd":
            reference = out
    assert out == reference


def test_radius_cap_fallback_paths_agree():
    # a radius too small to ever catch a point forces the full-list fallback
    results = []
    for detector in ("lsd", "lsd-tree"):
        cfg = make_config(radius_scale=1e-30, detector=detector, info_bits=8)
        rng = np.random.default_rng(14)
        fading = draw_fading(2, 1, rng)
        results.append(run_frame(cfg, ebn0_to_n0(5.0, 1), fading, rng))
    assert results[0] == results[1]
    # every symbol burned through the full doubling budget
    from pncsim.harness import MAX_DOUBLINGS

    assert results[0][2] == 8 * MAX_DOUBLINGS


def test_tree_keeps_widening_without_tables():
    from pncsim.harness import MAX_DOUBLINGS, _block_bits_tree

    cfg = make_config(radius_scale=1e-30, detector="lsd-tree", info_bits=4)
    rng = np.random.default_rng(15)
    fading = draw_fading(2, 1, rng)
    y = (rng.normal(size=(2, 4)) + 1j * rng.normal(size=(2, 4)))
    bits, retries = _block_bits_tree(y, fading.subset_sums[0], 0.5, cfg, None)
    assert bits.shape == (4, 1)
    assert retries > 4 * MAX_DOUBLINGS  # widened past the cap for every symbol


def test_exhaustive_frame_uses_no_retries():
    cfg = make_config(detector="exhaustive")
    rng = np.random.default_rng(4)
    fading = draw_fading(2, 1, rng)
    errors, bits, retries = run_frame(cfg, ebn0_to_n0(5.0, 1), fading, rng)
    assert retries == 0
    assert bits == cfg.info_bits


def test_run_point_worker_counts_agree():
    cfg = make_config(max_frames=12, info_bits=96, ebn0_grid=(6.0,))
    serial = run_point(cfg, 6.0, workers=1)
    parallel = run_point(cfg, 6.0, workers=2)
    assert serial == parallel
    assert serial.bits_total == serial.frames * cfg.info_bits


def test_run_point_early_stop():
    cfg = make_config(ebn0_grid=(0.0,), max_frames=200, target_errors=5)
    rec = run_point(cfg, 0.0)
    assert rec.bit_errors >= 5
    assert rec.frames < 200
    assert rec.bits_total == rec.frames * cfg.info_bits


def test_run_point_needs_grid_membership():
    cfg = make_config(ebn0_grid=(6.0,))
    with pytest.raises(ValueError):
        run_point(cfg, 7.0)
    rec = run_point(cfg, 7.0, point_index=0)
    assert isinstance(rec, BerRecord)


def test_high_snr_records_retries():
    cfg = make_config(ebn0_grid=(30.0,), max_frames=2)
    rec = run_point(cfg, 30.0)
    assert rec.lsd_retries > 0
    assert rec.bit_errors == 0


def test_sweep_orders_records_and_rejects_empty_grid():
    cfg = make_config(ebn0_grid=(2.0, 6.0, 10.0), max_frames=3)
    records = sweep(cfg)
    assert [r.ebn0_db for r in records] == [2.0, 6.0, 10.0]
    with pytest.raises(ValueError):
        sweep(make_config(ebn0_grid=()))


def test_sweep_deterministic_across_runs():
    cfg = make_config(ebn0_grid=(4.0, 8.0), max_frames=4)
    a = sweep(cfg)
    b = sweep(cfg)
    assert a == b
