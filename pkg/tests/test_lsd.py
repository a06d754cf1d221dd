import numpy as np
import pytest

from pncsim.constellation import enumerate_supersymbols, subset_sum_table
from pncsim.channel import draw_fading
from pncsim.lsd import component_in_radius, sphere_decode
from pncsim.somap import squared_distance


def oracle_list(gains, mod_order, y, radius, num_list):
    """Exhaustive enumeration filtered by radius, sorted, truncated."""
    ranked = sorted(
        (squared_distance(s.vector, y), s.assignment)
        for s in enumerate_supersymbols(gains, mod_order)
    )
    return [(d, a) for d, a in ranked if d <= radius * radius][:num_list]


def test_component_in_radius_boundary_quarter_turn():
    # unit magnitudes, quarter-turn apart: |x - t|^2 = 2, exactly the budget
    assert component_in_radius(1 + 0j, 1j, 2.0)


def test_component_in_radius_zero_component():
    assert not component_in_radius(0j, 0.1 + 0j, 0.0025)


def test_component_in_radius_large_magnitude_gap():
    # bound (9 + 0.01 - 0.01) / 0.6 = 15 can never be met
    assert not component_in_radius(3 + 0j, 0.1j, 0.01)


def test_component_in_radius_agrees_with_direct_predicate():
    rng = np.random.default_rng(13)
    n = 100_000
    comp = rng.normal(size=n) * 2 + 1j * rng.normal(size=n) * 2
    targ = rng.normal(size=n) + 1j * rng.normal(size=n)
    # sprinkle degenerate magnitudes through both operands
    comp[::17] = 0
    targ[::23] = 0
    comp[::31] *= 1e-14
    rr = (rng.random(n) * 4) ** 2
    direct = np.abs(comp - targ) ** 2
    for c, t, r2, d in zip(comp, targ, rr, direct):
        if abs(d - r2) <= 1e-9:
            continue  # boundary slack
        assert component_in_radius(complex(c), complex(t), float(r2)) == (d <= r2)


def test_exact_noiseless_hit():
    table = subset_sum_table(np.array([1 + 0j, 1 + 0j]))
    cl = sphere_decode(np.array([2 + 0j, 0j]), table, 2, 2, 1.0, 1)
    assert cl.assignments() == [(0, 0)]
    assert cl.distances().tolist() == [0.0]


def test_full_list_equals_sorted_enumeration():
    rng = np.random.default_rng(40)
    for _ in range(60):
        num_sources = int(rng.integers(2, 4))
        mod_order = int(rng.choice([2, 4]))
        fad = draw_fading(num_sources, 1, rng)
        y = (rng.normal(size=mod_order) + 1j * rng.normal(size=mod_order)) * 1.5
        cl = sphere_decode(
            y, fad.subset_sums[0], mod_order, num_sources, 1e3, mod_order**num_sources
        )
        want = oracle_list(fad.gains[:, 0], mod_order, y, 1e3, mod_order**num_sources)
        assert cl.assignments() == [a for _, a in want]
        got = cl.distances()
        for g, (w, _) in zip(got, want):
            assert g == pytest.approx(w, rel=1e-9)


def test_radius_and_list_truncation_match_oracle():
    rng = np.random.default_rng(41)
    for _ in range(60):
        num_sources = int(rng.integers(2, 4))
        mod_order = int(rng.choice([2, 4]))
        fad = draw_fading(num_sources, 1, rng)
        y = rng.normal(size=mod_order) + 1j * rng.normal(size=mod_order)
        dists = sorted(
            squared_distance(s.vector, y)
            for s in enumerate_supersymbols(fad.gains[:, 0], mod_order)
        )
        # radius placed in the middle of the distance spread
        radius = float(np.sqrt(dists[len(dists) // 2]) * (0.8 + 0.4 * rng.random()))
        for num_list in (1, 3, 5):
            for tighten in (False, True):
                cl = sphere_decode(
                    y,
                    fad.subset_sums[0],
                    mod_order,
                    num_sources,
                    radius,
                    num_list,
                    tighten_radius=tighten,
                )
                want = oracle_list(fad.gains[:, 0], mod_order, y, radius, num_list)
                assert list(zip(cl.distances(), cl.assignments())) == want


def test_list_invariants():
    rng = np.random.default_rng(55)
    fad = draw_fading(3, 1, rng)
    y = rng.normal(size=4) + 1j * rng.normal(size=4)
    cl = sphere_decode(y, fad.subset_sums[0], 4, 3, 2.0, 5)
    d = cl.distances()
    assert len(cl) <= 5
    assert (np.diff(d) >= 0).all()
    assert (d <= 4.0 + 1e-9).all()
    for s, dist in cl.entries:
        # every source placed in exactly one dimension
        assert len(s.assignment) == 3
        assert all(0 <= q < 4 for q in s.assignment)
        assert dist == squared_distance(s.vector, y)


def test_empty_list_is_valid():
    table = subset_sum_table(np.array([1 + 0j, 1j]))
    cl = sphere_decode(np.array([100 + 0j, 0j]), table, 2, 2, 0.5, 5)
    assert len(cl) == 0


def test_distance_ties_break_lexicographically():
    # equal gains make (0,1) and (1,0) geometrically identical
    table = subset_sum_table(np.array([1 + 0j, 1 + 0j]))
    y = np.array([1 + 0j, 1 + 0j])
    cl = sphere_decode(y, table, 2, 2, 10.0, 2)
    assert cl.assignments() == [(0, 1), (1, 0)]


def test_rejects_bad_parameters():
    table = subset_sum_table(np.array([1 + 0j, 1j]))
    y = np.array([0j, 0j])
    with pytest.raises(ValueError):
        sphere_decode(y, table, 2, 2, 0.0, 5)
    with pytest.raises(ValueError):
        sphere_decode(y, table, 2, 2, 1.0, 0)
