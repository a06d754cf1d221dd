"""List sphere decoder over the subset-sum parametrization.

The search walks the orthogonal dimensions depth-first, from the last down
to the first. At each dimension it may place any subset of the still
unassigned sources (their gains sum to the candidate component value); the
first dimension takes whatever sources remain, so every leaf is a valid
assignment of all K sources. A candidate component survives only if it
lies within the residual radius, tested in polar form; surviving leaves
compete for a list of the num_list closest points, the newest replacing
the current farthest once the list is full.

Distances decompose per dimension here because the dimensions are
orthogonal and the channel is diagonal, so no cross-dimension residual has
to be carried.
"""

from __future__ import annotations

import math
from bisect import insort
from dataclasses import dataclass

import numpy as np

from .constellation import SuperSymbol, nc_label

__all__ = ["CandidateList", "component_in_radius", "sphere_decode"]

# Below this magnitude the polar form divides by ~0; fall back to the
# direct distance test.
_POLAR_EPS = 1e-12


@dataclass(eq=False)
class CandidateList:
    """Up to `capacity` super-symbols within `radius`, nearest first.

    entries holds (super_symbol, squared_distance) pairs sorted ascending
    by distance, ties broken by lexicographic assignment.
    """

    entries: list[tuple[SuperSymbol, float]]
    capacity: int
    radius: float

    def __len__(self) -> int:
        return len(self.entries)

    def assignments(self) -> list[tuple[int, ...]]:
        return [s.assignment for s, _ in self.entries]

    def distances(self) -> np.ndarray:
        return np.array([d for _, d in self.entries], dtype=np.float64)

    def labels(self) -> np.ndarray:
        if not self.entries:
            return np.zeros((0, 0), dtype=np.int8)
        return np.stack([s.nc_label for s, _ in self.entries])


def component_in_radius(
    component: complex, target: complex, residual_radius_sq: float
) -> bool:
    """Polar admissibility test: is |component - target|^2 <= residual?

    With component = d_c*e^(j*a) and target = d_t*e^(j*b), the squared
    distance is d_c^2 + d_t^2 - 2*d_c*d_t*cos(a - b), so the test reduces
    to comparing cos(a - b) against the bound
    (d_c^2 + d_t^2 - residual) / (2*d_c*d_t): a bound above 1 can never be
    met, below -1 it always is. Near-zero magnitudes use the direct
    distance test instead.
    """
    cr, ci = component.real, component.imag
    tr, ti = target.real, target.imag
    dc2 = cr * cr + ci * ci
    dt2 = tr * tr + ti * ti
    dc = math.sqrt(dc2)
    dt = math.sqrt(dt2)
    if dc <= _POLAR_EPS or dt <= _POLAR_EPS:
        dr = cr - tr
        di = ci - ti
        return dr * dr + di * di <= residual_radius_sq
    cos_bound = (dc2 + dt2 - residual_radius_sq) / (2.0 * dc * dt)
    if cos_bound > 1.0:
        return False
    if cos_bound < -1.0:
        return True
    # cos of the phase difference without computing the angles themselves
    cos_diff = (cr * tr + ci * ti) / (dc * dt)
    return cos_diff >= cos_bound


def sphere_decode(
    y: np.ndarray,
    subset_sums: np.ndarray,
    mod_order: int,
    num_sources: int,
    radius: float,
    num_list: int,
    tighten_radius: bool = False,
) -> CandidateList:
    """Find the num_list super-symbols nearest to y within `radius`.

    y is the length-M observation; subset_sums is the 2^K table of gain
    subset sums for the current fading block. The result equals exhaustive
    enumeration filtered to squared distance <= radius^2, sorted by
    (distance, assignment), and truncated to num_list entries. An empty
    list is a valid outcome: nothing fell inside the sphere.

    tighten_radius additionally shrinks the search sphere to the current
    farthest list entry once the list is full. It changes how much of the
    tree gets visited, never the returned list.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if num_list < 1:
        raise ValueError("num_list must be >= 1")
    y = np.asarray(y, dtype=np.complex128)
    if y.shape != (mod_order,):
        raise ValueError(f"observation must have shape ({mod_order},)")
    if subset_sums.shape != (1 << num_sources,):
        raise ValueError("subset_sums must have 2^K entries")

    full_mask = (1 << num_sources) - 1
    r2 = radius * radius
    mu = mod_order.bit_length() - 1
    # Python scalars in the hot loop; same IEEE ops as the numpy helpers.
    table = [complex(v) for v in subset_sums]
    y_vals = [complex(v) for v in y]
    # (distance, assignment, dimension masks), kept sorted by (dist, assignment)
    found: list[tuple[float, tuple[int, ...], tuple[int, ...]]] = []

    def search_r2() -> float:
        if tighten_radius and len(found) == num_list and found[-1][0] < r2:
            return found[-1][0]
        return r2

    def assignment_of(dim_masks: list[int]) -> tuple[int, ...]:
        assignment = [0] * num_sources
        for dim, mask in enumerate(dim_masks):
            while mask:
                low = mask & -mask
                assignment[low.bit_length() - 1] = dim
                mask ^= low
        return tuple(assignment)

    def visit_leaf(dim_masks: list[int]):
        # Fresh accumulation over all dimensions, first to last, matching
        # squared_distance; the running search total only steers pruning.
        dist = 0.0
        for dim in range(mod_order):
            z = table[dim_masks[dim]] - y_vals[dim]
            dist += z.real * z.real + z.imag * z.imag
        if dist > r2:
            return
        assignment = assignment_of(dim_masks)
        if len(found) == num_list:
            worst = found[-1]
            if (dist, assignment) >= (worst[0], worst[1]):
                return
        insort(found, (dist, assignment, tuple(dim_masks)))
        if len(found) > num_list:
            found.pop()

    def descend(dim: int, remaining: int, acc: float, dim_masks: list[int]):
        if dim == 0:
            # Partition constraint: the first dimension takes every source
            # not placed yet, so leaves are always complete assignments.
            dim_masks[0] = remaining
            visit_leaf(dim_masks)
            return
        target = y_vals[dim]
        budget = search_r2() - acc
        options: list[tuple[float, int]] = []
        sub = remaining
        while True:
            comp = table[sub]
            if component_in_radius(comp, target, budget):
                dr = comp.real - target.real
                di = comp.imag - target.imag
                options.append((dr * dr + di * di, sub))
            if sub == 0:
                break
            sub = (sub - 1) & remaining
        options.sort()  # nearest component first: good leaves early
        for step, sub in options:
            if tighten_radius and step > search_r2() - acc:
                break
            dim_masks[dim] = sub
            descend(dim - 1, remaining & ~sub, acc + step, dim_masks)

    descend(mod_order - 1, full_mask, 0.0, [0] * mod_order)

    entries = []
    for dist, assignment, dim_masks in found:
        vector = subset_sums[np.asarray(dim_masks, dtype=np.int64)]
        entries.append(
            (
                SuperSymbol(
                    assignment=assignment,
                    vector=vector,
                    nc_label=nc_label(assignment, mu),
                ),
                dist,
            )
        )
    return CandidateList(entries=entries, capacity=num_list, radius=radius)
