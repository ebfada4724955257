"""Conserved quantities, orientation signatures and angular-momentum flows."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np

from .config import DEFAULT_TOLERANCES
from .symplectic import (
    GeneratorMatrix,
    PhasePoint,
    build_basis_blocks,
    group_element,
    projector_of,
)

Selector = Union[int, tuple[int, int]]


def energy(omega: PhasePoint) -> float:
    """Oscillator energy ``sum(w**2) / 2`` in units of hbar*omega."""
    return 0.5 * float(omega.coords @ omega.coords)


def pair_energy(omega: PhasePoint, i: int, j: int) -> float:
    d = omega.difference(i, j)
    return 0.5 * float(d @ d)


@dataclass(frozen=True)
class AngularMomentumMatrices:
    n_particles: int
    L: np.ndarray
    L_i: tuple[np.ndarray, ...]
    L_ij: dict[tuple[int, int], np.ndarray]


@lru_cache(maxsize=None)
def angular_momentum_matrices(n_particles: int) -> AngularMomentumMatrices:
    lmat = build_basis_blocks().v(7)
    n = n_particles
    singles = []
    for i in range(n):
        m = np.zeros((4 * n, 4 * n))
        m[4 * i : 4 * i + 4, 4 * i : 4 * i + 4] = lmat
        singles.append(m)
    pairs = {}
    for i, j in itertools.combinations(range(n), 2):
        m = np.zeros((4 * n, 4 * n))
        si, sj = slice(4 * i, 4 * i + 4), slice(4 * j, 4 * j + 4)
        m[si, si] = lmat
        m[sj, sj] = lmat
        m[si, sj] = -lmat
        m[sj, si] = -lmat
        pairs[(i + 1, j + 1)] = m
    return AngularMomentumMatrices(n, lmat, tuple(singles), pairs)


def _l_half(w: np.ndarray) -> float:
    # w.L.w / 2 for a single 4-block, i.e. x*p_y - y*p_x
    return float(w[0] * w[3] - w[1] * w[2])


def angular_momentum(omega: PhasePoint, selector: Selector) -> float:
    """``J_i`` for an integer selector, ``J_ij`` (of ``w_i - w_j``) for a pair."""
    if isinstance(selector, tuple):
        i, j = selector
        if i == j:
            raise ValueError("pair selector needs distinct particles")
        d = omega.difference(i, j)
        lmat = build_basis_blocks().v(7)
        return 0.5 * float(d @ lmat @ d)
    w = omega.block(selector)
    lmat = build_basis_blocks().v(7)
    return 0.5 * float(w @ lmat @ w)


def angular_momentum_components(omega: PhasePoint, selector: Selector) -> float:
    """Same quantity as :func:`angular_momentum` from ``x p_y - y p_x`` arithmetic."""
    if isinstance(selector, tuple):
        i, j = selector
        if i == j:
            raise ValueError("pair selector needs distinct particles")
        return _l_half(omega.difference(i, j))
    return _l_half(omega.block(selector))


def pairs_of(n_particles: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(1, n_particles + 1), 2))


@dataclass(frozen=True)
class OrientationSignature:
    n_particles: int
    signs: dict[tuple[int, int], int]

    def __post_init__(self):
        expected = pairs_of(self.n_particles)
        if sorted(self.signs) != expected:
            raise ValueError("signature must list every pair i < j exactly once")
        if any(s not in (1, -1) for s in self.signs.values()):
            raise ValueError("signature entries must be +1 or -1")

    @classmethod
    def from_sequence(cls, n_particles: int, signs) -> "OrientationSignature":
        return cls(n_particles, dict(zip(pairs_of(n_particles), (int(s) for s in signs))))

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(self.signs[p] for p in pairs_of(self.n_particles))

    @property
    def slope(self) -> int:
        return sum(self.signs.values())


@dataclass(frozen=True)
class DegeneracyReport:
    in_delta: bool
    in_delta_prime: bool
    offending_pairs: list[tuple[int, int]] = field(default_factory=list)
    coincident_pairs: list[tuple[int, int]] = field(default_factory=list)


def is_zero_angular_momentum(
    omega: PhasePoint, i: int, j: int, tol: float = DEFAULT_TOLERANCES.degeneracy
) -> bool:
    return abs(angular_momentum(omega, (i, j))) <= tol * pair_energy(omega, i, j)


def is_coincident(
    omega: PhasePoint, i: int, j: int, tol: float = DEFAULT_TOLERANCES.degeneracy
) -> bool:
    r_i = np.linalg.norm(omega.position(i))
    r_j = np.linalg.norm(omega.position(j))
    r_ij = np.linalg.norm(omega.position(i) - omega.position(j))
    return bool(r_ij < tol * max(1.0, r_i, r_j))


def degeneracy_report(
    omega: PhasePoint, tol: float = DEFAULT_TOLERANCES.degeneracy
) -> DegeneracyReport:
    pairs = pairs_of(omega.n_particles)
    zero_j = [p for p in pairs if is_zero_angular_momentum(omega, *p, tol=tol)]
    coincident = [p for p in pairs if is_coincident(omega, *p, tol=tol)]
    return DegeneracyReport(bool(coincident), bool(zero_j), zero_j, coincident)


def orientation_signature(
    omega: PhasePoint, tol: float = DEFAULT_TOLERANCES.degeneracy
) -> OrientationSignature | DegeneracyReport:
    """Signs of all pairwise angular momenta, or a report when any of them vanishes.

    ``tol`` is relative to the pair energy ``|w_i - w_j|^2 / 2``, which bounds
    ``|J_ij|`` from above.
    """
    report = degeneracy_report(omega, tol)
    if report.in_delta_prime:
        return report
    signs = {
        p: int(np.sign(angular_momentum(omega, p))) for p in pairs_of(omega.n_particles)
    }
    return OrientationSignature(omega.n_particles, signs)


# ---------------------------------------------------------------------------
# flows of the angular momenta under one-parameter groups


def _selector_matrix(n_particles: int, selector: Selector) -> np.ndarray:
    mats = angular_momentum_matrices(n_particles)
    if isinstance(selector, tuple):
        i, j = selector
        if i == j:
            raise ValueError("pair selector needs distinct particles")
        key = (min(i, j), max(i, j))
        if key not in mats.L_ij:
            raise IndexError(f"pair {selector} out of range")
        return mats.L_ij[key]
    if not 1 <= selector <= n_particles:
        raise IndexError(f"particle {selector} out of range")
    return mats.L_i[selector - 1]


@dataclass(frozen=True)
class HarmonicFlow:
    """``q(sigma) = c0 + c1 cos s + s1 sin s + c2 cos 2s + s2 sin 2s``."""

    c0: float
    c1: float
    s1: float
    c2: float
    s2: float

    def __call__(self, sigma):
        sigma = np.asarray(sigma, dtype=float)
        return (
            self.c0
            + self.c1 * np.cos(sigma)
            + self.s1 * np.sin(sigma)
            + self.c2 * np.cos(2 * sigma)
            + self.s2 * np.sin(2 * sigma)
        )


def harmonic_flow(omega: PhasePoint, t: GeneratorMatrix, quad: np.ndarray) -> HarmonicFlow:
    """Trigonometric expansion of ``w(s).Q.w(s) / 2`` along ``exp(s T)``.

    Valid whenever ``T^2 = -P``; then ``w(s) = a + cos(s) c + sin(s) d`` with
    ``a = (1 - P) w``, ``c = P w`` and ``d = T w``.
    """
    p = projector_of(t)
    if p is None:
        raise ValueError("closed-form flow needs a generator with T^2 = -P")
    w = omega.coords
    a = w - p @ w
    c = p @ w
    d = t.matrix @ w
    q = 0.5 * (quad + quad.T)
    aa, ac, ad = a @ q @ a, a @ q @ c, a @ q @ d
    cc, dd, cd = c @ q @ c, d @ q @ d, c @ q @ d
    # cos^2 = (1 + cos2)/2, sin^2 = (1 - cos2)/2, sin cos = sin2 / 2
    return HarmonicFlow(
        c0=0.5 * aa + 0.25 * (cc + dd),
        c1=float(ac),
        s1=float(ad),
        c2=0.25 * (cc - dd),
        s2=0.5 * float(cd),
    )


def _flow_ti(omega: PhasePoint, t: GeneratorMatrix, m: int, sigma: float) -> float:
    lab = t.label
    j_m = angular_momentum(omega, m)
    if m != lab.i:
        return j_m
    u = build_basis_blocks().u(lab.index)
    lmat = build_basis_blocks().v(7)
    w = omega.block(m)
    s, c = np.sin(sigma), np.cos(sigma)
    two_j = 2 * j_m - s**2 * (2 * j_m - w @ (u.T @ lmat @ u) @ w) + s * c * (
        w @ (u.T @ lmat + lmat @ u) @ w
    )
    return 0.5 * float(two_j)


def _flow_tij(omega: PhasePoint, t: GeneratorMatrix, m: int, sigma: float) -> float:
    lab = t.label
    j_m = angular_momentum(omega, m)
    if m not in (lab.i, lab.j):
        return j_m
    v = build_basis_blocks().v(lab.index)
    lmat = build_basis_blocks().v(7)
    wi, wj = omega.block(lab.i), omega.block(lab.j)
    s, c = np.sin(sigma), np.cos(sigma)
    if m == lab.i:
        two_j = 2 * j_m - s**2 * (2 * j_m - wj @ (v.T @ lmat @ v) @ wj)
        two_j += 2 * s * c * (wi @ (lmat @ v) @ wj)
    else:
        two_j = 2 * j_m - s**2 * (2 * j_m - wi @ (v @ lmat @ v.T) @ wi)
        two_j -= 2 * s * c * (wi @ (v @ lmat) @ wj)
    return 0.5 * float(two_j)


def j_u(omega: PhasePoint, beta: float) -> float:
    """``J_u(beta) = w.L.u(beta).w / 2`` for a single 4-block phase point."""
    if omega.n_particles != 1:
        raise ValueError("J_u is defined for the single-block (relative) system")
    blocks = build_basis_blocks()
    u = np.cos(beta) * blocks.u(3) + np.sin(beta) * blocks.u(4)
    w = omega.coords
    return 0.5 * float(w @ blocks.v(7) @ u @ w)


def j_u_and_max(omega: PhasePoint, beta: float) -> tuple[float, float]:
    """``J_u(beta)`` and its maximum over beta, ``hypot(J_u(0), J_u'(0))``.

    ``J_u`` is harmonic in beta, so the derivative at zero equals ``J_u(pi/2)``.
    """
    ju0 = j_u(omega, 0.0)
    dju0 = j_u(omega, np.pi / 2)
    return j_u(omega, beta), float(np.hypot(ju0, dju0))


def best_mixing_angle(omega: PhasePoint) -> float:
    """The beta maximising ``J_u``."""
    return float(np.arctan2(j_u(omega, np.pi / 2), j_u(omega, 0.0)))


def mixed_flow_amplitude_phase(omega: PhasePoint, beta: float) -> tuple[float, float]:
    """``(A, delta)`` with ``J(sigma) = A cos(2 sigma - delta)`` under ``u(beta)``.

    ``delta = atan2(J_u, J)``; for ``J > 0`` it lies in ``(-pi/2, pi/2)`` and
    agrees with ``arctan(J_u / J)``. For ``J < 0`` the two-argument form shifts
    delta by pi, which keeps the amplitude non-negative.
    """
    big_j = angular_momentum(omega, 1)
    ju = j_u(omega, beta)
    return float(np.hypot(big_j, ju)), float(np.arctan2(ju, big_j))


def j_flow_closed_form(
    omega: PhasePoint,
    generator: GeneratorMatrix,
    sigma: float,
    selector: Selector = 1,
) -> float:
    """Angular momentum after ``exp(sigma T)`` without transporting the point.

    Basis generators with a particle selector use the explicit single-particle
    formulas; the mixed ``u(beta)`` generator uses the amplitude-phase form;
    pair selectors use the trigonometric expansion of the quadratic form.
    """
    if generator.n_particles != omega.n_particles:
        raise ValueError("generator and phase point have different particle counts")
    kind = generator.label.kind
    if kind == "mix":
        amp, delta = mixed_flow_amplitude_phase(omega, generator.label.beta)
        return amp * float(np.cos(2 * sigma - delta))
    if kind not in ("Ti", "Tij"):
        raise ValueError("closed-form flow supports Ti, Tij and mixed u(beta) generators")
    if isinstance(selector, tuple):
        quad = _selector_matrix(omega.n_particles, selector)
        return float(harmonic_flow(omega, generator, quad)(sigma))
    if not 1 <= selector <= omega.n_particles:
        raise IndexError(f"particle {selector} out of range")
    if kind == "Ti":
        return _flow_ti(omega, generator, selector, sigma)
    return _flow_tij(omega, generator, selector, sigma)


def transported_angular_momentum(
    omega: PhasePoint, generator: GeneratorMatrix, sigma: float, selector: Selector = 1
) -> float:
    moved = PhasePoint(omega.n_particles, group_element(generator, sigma) @ omega.coords)
    return angular_momentum(moved, selector)


def delta_J_mn(omega: PhasePoint, t: GeneratorMatrix, m: int, n: int) -> float:
    """First-order change of ``J_mn`` along ``T``: ``sum_j w_mn.L.(T_mj - T_nj).w_j``."""
    if m == n:
        raise ValueError("delta_J_mn needs m != n")
    lmat = build_basis_blocks().v(7)
    w_mn = omega.difference(m, n)
    total = 0.0
    for j in range(1, omega.n_particles + 1):
        total += w_mn @ lmat @ (t.block(m, j) - t.block(n, j)) @ omega.block(j)
    return float(total)
