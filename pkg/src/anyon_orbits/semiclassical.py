"""Leading-order semiclassical levels built from orientation-class actions.

Each orientation class contributes an extra action ``2 pi alpha sum(eps_ij)``
on top of the oscillator action ``2 pi E / omega``. Quantising the total gives
linear level families ``E = n + alpha * slope + offset`` whose slopes range
over ``-M, -M + 2, ..., M`` with ``M = N(N-1)/2`` pairs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .observables import OrientationSignature

OFFSETS = ("maslov", "relative")


def action_alpha_term(signature: OrientationSignature, alpha_c: float) -> float:
    """Statistics-dependent action of one orientation class."""
    return 2 * math.pi * alpha_c * signature.slope


def oscillator_action(energy: float, omega: float = 1.0) -> float:
    if energy < 0:
        raise ValueError("energy must be non-negative")
    return 2 * math.pi * energy / omega


def n_pairs(n_particles: int) -> int:
    if n_particles < 2:
        raise ValueError("at least two particles are needed")
    return n_particles * (n_particles - 1) // 2


def slope_set(n_particles: int) -> list[int]:
    m = n_pairs(n_particles)
    return list(range(-m, m + 1, 2))


def slope_multiplicity(n_particles: int, slope: int) -> int:
    """Number of sign assignments on the pairs that sum to ``slope``."""
    m = n_pairs(n_particles)
    if abs(slope) > m or (slope + m) % 2:
        return 0
    return math.comb(m, (slope + m) // 2)


def slope_multiplicities_brute_force(n_particles: int) -> dict[int, int]:
    m = n_pairs(n_particles)
    counts: dict[int, int] = {}
    for signs in itertools.product((-1, 1), repeat=m):
        s = sum(signs)
        counts[s] = counts.get(s, 0) + 1
    return dict(sorted(counts.items()))


def energy_offset(n_particles: int, offset: str = "maslov") -> int:
    """Constant added to every level.

    ``"maslov"`` uses the full zero-point constant N(N-1); ``"relative"`` uses
    N(N-1)/2, the reading in which the constant belongs to relative motion only.
    """
    if offset == "maslov":
        return n_particles * (n_particles - 1)
    if offset == "relative":
        return n_pairs(n_particles)
    raise ValueError(f"offset must be one of {OFFSETS}")


@dataclass(frozen=True)
class SemiclassicalLine:
    n: int
    slope: int
    multiplicity: int
    offset: int

    def energy(self, alpha_q: float) -> float:
        return self.n + alpha_q * self.slope + self.offset


def semiclassical_levels(
    n_particles: int, alpha_q: float, n_max: int, offset: str = "maslov"
) -> list[SemiclassicalLine]:
    """All lines with ``0 <= n <= n_max``, sorted by energy at ``alpha_q``."""
    if not 0.0 <= alpha_q <= 1.0:
        raise ValueError("alpha_q must lie in [0, 1]")
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    c = energy_offset(n_particles, offset)
    lines = [
        SemiclassicalLine(n, s, slope_multiplicity(n_particles, s), c)
        for n in range(n_max + 1)
        for s in slope_set(n_particles)
    ]
    lines.sort(key=lambda ln: (ln.energy(alpha_q), ln.slope, ln.n))
    return lines


def collapsed_levels(lines: list[SemiclassicalLine], alpha_q: float, tol: float = 1e-12):
    """Merge coincident energies, summing multiplicities: list of (energy, multiplicity)."""
    out: list[list[float]] = []
    for ln in sorted(lines, key=lambda x: x.energy(alpha_q)):
        e = ln.energy(alpha_q)
        if out and abs(out[-1][0] - e) <= tol:
            out[-1][1] += ln.multiplicity
        else:
            out.append([e, ln.multiplicity])
    return [(e, int(m)) for e, m in out]


def spectrum_table(n_particles: int, alpha_grid, n_max: int, offset: str = "maslov"):
    """Rows (n, slope, multiplicity, alpha_q, energy) for every alpha on the grid."""
    rows = []
    for a in alpha_grid:
        for ln in semiclassical_levels(n_particles, float(a), n_max, offset):
            rows.append((ln.n, ln.slope, ln.multiplicity, float(a), ln.energy(float(a))))
    return rows


def two_particle_lines_match_exact(
    alpha_q: float, n_max: int, exact_levels, offset: str = "maslov", tol: float = 1e-12
) -> tuple[bool, list[float]]:
    """Check that every N = 2 semiclassical line sits on an exact level.

    ``exact_levels`` is an array of exact energies. Returns (ok, missing) where
    ``missing`` lists semiclassical energies below the exact spectrum's reach
    that have no exact partner.
    """
    exact = np.sort(np.asarray(exact_levels, dtype=float))
    top = exact[-1] if len(exact) else -np.inf
    missing = []
    for ln in semiclassical_levels(2, alpha_q, n_max, offset):
        e = ln.energy(alpha_q)
        if e > top:
            continue
        k = np.searchsorted(exact, e)
        near = [exact[i] for i in (k - 1, k) if 0 <= i < len(exact)]
        if not near or min(abs(x - e) for x in near) > tol:
            missing.append(e)
    return not missing, missing
