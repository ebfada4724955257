"""Ortho-symplectic generators on the 4N-dimensional phase space.

Coordinates are particle-blocked: ``(x_1, y_1, p_1x, p_1y, ..., x_N, y_N, p_Nx, p_Ny)``.
Particle indices and the u/v block indices are 1-based throughout, to match
the usual labels ``T_i(u_k)`` and ``T_ij(v_k)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np
from scipy.linalg import expm

from .config import DEFAULT_TOLERANCES

I2 = np.eye(2)
Z2 = np.zeros((2, 2))
SIGMA1 = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA3 = np.array([[1.0, 0.0], [0.0, -1.0]])
# i*sigma_2 written as a real matrix
ISIGMA2 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def _diag(a: np.ndarray) -> np.ndarray:
    return np.block([[a, Z2], [Z2, a]])


def _offdiag(a: np.ndarray) -> np.ndarray:
    return np.block([[Z2, a], [-a, Z2]])


def _readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PhasePoint:
    n_particles: int
    coords: np.ndarray

    def __post_init__(self):
        coords = _readonly(self.coords).reshape(-1)
        if self.n_particles < 1:
            raise ValueError("n_particles must be positive")
        if coords.shape != (4 * self.n_particles,):
            raise ValueError(
                f"expected {4 * self.n_particles} coordinates, got {coords.size}"
            )
        if not np.all(np.isfinite(coords)):
            raise ValueError("phase point coordinates must be finite")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_array(cls, coords) -> "PhasePoint":
        coords = np.asarray(coords, dtype=float).reshape(-1)
        if coords.size % 4:
            raise ValueError("coordinate count must be a multiple of 4")
        return cls(coords.size // 4, coords)

    def block(self, i: int) -> np.ndarray:
        """The 4-vector ``(x_i, y_i, p_ix, p_iy)`` of particle ``i`` (1-based)."""
        _check_particle(i, self.n_particles)
        return self.coords[4 * (i - 1) : 4 * i]

    def difference(self, i: int, j: int) -> np.ndarray:
        return self.block(i) - self.block(j)

    def position(self, i: int) -> np.ndarray:
        return self.block(i)[:2]

    def momentum(self, i: int) -> np.ndarray:
        return self.block(i)[2:]


def _check_particle(i: int, n: int) -> None:
    if not 1 <= i <= n:
        raise IndexError(f"particle index {i} outside 1..{n}")


@dataclass(frozen=True)
class SymplecticForm:
    n_particles: int
    block: np.ndarray
    full: np.ndarray


@lru_cache(maxsize=None)
def symplectic_form(n_particles: int) -> SymplecticForm:
    lam = _offdiag(I2)
    full = np.kron(np.eye(n_particles), lam)
    return SymplecticForm(n_particles, _readonly(lam), _readonly(full))


@dataclass(frozen=True)
class BasisBlocks:
    u_blocks: tuple[np.ndarray, ...]
    v_blocks: tuple[np.ndarray, ...]

    def u(self, k: int) -> np.ndarray:
        return self.u_blocks[k - 1]

    def v(self, k: int) -> np.ndarray:
        return self.v_blocks[k - 1]


@lru_cache(maxsize=None)
def build_basis_blocks() -> BasisBlocks:
    """The four u blocks (generators of OSp(4,R)) and eight v blocks.

    u1 rotates positions and momenta together, u2 is the time-evolution
    generator, u3 and u4 mix x/y with the momenta through sigma_1 and sigma_3.
    The v blocks span all 4x4 matrices commuting with the single-particle
    symplectic block.
    """
    u = (_diag(ISIGMA2), _offdiag(I2), _offdiag(SIGMA1), _offdiag(SIGMA3))
    v = (
        _diag(I2),
        _diag(SIGMA1),
        _diag(ISIGMA2),
        _diag(SIGMA3),
        _offdiag(I2),
        _offdiag(SIGMA1),
        _offdiag(ISIGMA2),
        _offdiag(SIGMA3),
    )
    return BasisBlocks(tuple(map(_readonly, u)), tuple(map(_readonly, v)))


@dataclass(frozen=True)
class GeneratorLabel:
    """``kind`` is ``"Ti"``, ``"Tij"``, ``"mix"`` or ``"composite"``."""

    kind: str
    index: int = 0
    i: int = 0
    j: int = 0
    name: str = ""
    beta: float = 0.0

    def __str__(self) -> str:
        if self.kind == "Ti":
            return f"T_{self.i}(u{self.index})"
        if self.kind == "Tij":
            return f"T_{self.i}{self.j}(v{self.index})"
        if self.kind == "mix":
            return f"u(beta={self.beta:g})"
        return self.name or "composite"


def Ti(index: int, i: int) -> GeneratorLabel:
    return GeneratorLabel("Ti", index=index, i=i)


def Tij(index: int, i: int, j: int) -> GeneratorLabel:
    return GeneratorLabel("Tij", index=index, i=i, j=j)


@dataclass(frozen=True)
class GeneratorMatrix:
    n_particles: int
    matrix: np.ndarray
    label: GeneratorLabel = field(default_factory=lambda: GeneratorLabel("composite"))

    def __post_init__(self):
        m = _readonly(self.matrix)
        if m.shape != (4 * self.n_particles,) * 2:
            raise ValueError("generator shape does not match particle count")
        object.__setattr__(self, "matrix", m)

    def __add__(self, other: "GeneratorMatrix") -> "GeneratorMatrix":
        return composite(self.matrix + other.matrix, self.n_particles)

    def __mul__(self, c: float) -> "GeneratorMatrix":
        return composite(c * self.matrix, self.n_particles)

    __rmul__ = __mul__

    def block(self, m: int, n: int) -> np.ndarray:
        return self.matrix[4 * (m - 1) : 4 * m, 4 * (n - 1) : 4 * n]


def composite(matrix, n_particles: int, name: str = "") -> GeneratorMatrix:
    return GeneratorMatrix(n_particles, matrix, GeneratorLabel("composite", name=name))


def build_generator(label: GeneratorLabel, n_particles: int) -> GeneratorMatrix:
    """Embed a u or v block as a 4N x 4N basis generator."""
    blocks = build_basis_blocks()
    n = n_particles
    if n < 1:
        raise ValueError("n_particles must be positive")
    t = np.zeros((4 * n, 4 * n))
    if label.kind == "Ti":
        if not 1 <= label.index <= 4:
            raise ValueError(f"u index {label.index} outside 1..4")
        _check_particle(label.i, n)
        s = slice(4 * (label.i - 1), 4 * label.i)
        t[s, s] = blocks.u(label.index)
    elif label.kind == "Tij":
        if not 1 <= label.index <= 8:
            raise ValueError(f"v index {label.index} outside 1..8")
        if not 1 <= label.i < label.j <= n:
            raise ValueError(f"pair ({label.i}, {label.j}) needs 1 <= i < j <= {n}")
        v = blocks.v(label.index)
        si = slice(4 * (label.i - 1), 4 * label.i)
        sj = slice(4 * (label.j - 1), 4 * label.j)
        t[si, sj] = v
        t[sj, si] = -v.T
    else:
        raise ValueError(f"cannot build a basis generator from {label.kind!r}")
    return GeneratorMatrix(n, t, label)


def mixing_generator(beta: float) -> GeneratorMatrix:
    """Single-block generator ``cos(beta) u3 + sin(beta) u4``.

    It anticommutes with the angular-momentum block, so its one-parameter group
    rotates J into J_u at twice the group angle.
    """
    blocks = build_basis_blocks()
    m = np.cos(beta) * blocks.u(3) + np.sin(beta) * blocks.u(4)
    return GeneratorMatrix(1, m, GeneratorLabel("mix", beta=float(beta)))


def basis_labels(n_particles: int) -> Iterator[GeneratorLabel]:
    for i in range(1, n_particles + 1):
        for k in range(1, 5):
            yield Ti(k, i)
    for i, j in itertools.combinations(range(1, n_particles + 1), 2):
        for k in range(1, 9):
            yield Tij(k, i, j)


def basis_generators(n_particles: int) -> list[GeneratorMatrix]:
    return [build_generator(lab, n_particles) for lab in basis_labels(n_particles)]


def basis_rank(n_particles: int) -> int:
    """Rank of the flattened basis set; equals 4N^2 when the basis is independent."""
    flat = np.array([g.matrix.ravel() for g in basis_generators(n_particles)])
    return int(np.linalg.matrix_rank(flat))


@dataclass(frozen=True)
class OrthosymplecticCheck:
    ok: bool
    antisymmetry_residual: float
    symplectic_residual: float

    @property
    def residual(self) -> float:
        return max(self.antisymmetry_residual, self.symplectic_residual)

    def __bool__(self) -> bool:
        return self.ok


def _omega_matrix(omega, dim: int) -> np.ndarray:
    if omega is None:
        if dim % 4:
            raise ValueError("dimension must be a multiple of 4")
        return symplectic_form(dim // 4).full
    if isinstance(omega, SymplecticForm):
        return omega.full
    return np.asarray(omega, dtype=float)


def check_orthosymplectic(m, omega=None, tol: float = DEFAULT_TOLERANCES.orthosymplectic):
    """Test the Lie-algebra conditions ``M^T = -M`` and ``M^T Omega = -Omega M``.

    Residuals are max-abs norms. ``omega`` defaults to the block form matching
    the dimension of ``m``.
    """
    m = np.asarray(getattr(m, "matrix", m), dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    om = _omega_matrix(omega, m.shape[0])
    if om.shape != m.shape:
        raise ValueError(f"dimension mismatch: {m.shape} vs {om.shape}")
    anti = float(np.max(np.abs(m.T + m))) if m.size else 0.0
    symp = float(np.max(np.abs(m.T @ om + om @ m))) if m.size else 0.0
    return OrthosymplecticCheck(anti <= tol and symp <= tol, anti, symp)


def check_group_element(g, omega=None, tol: float = DEFAULT_TOLERANCES.orthosymplectic):
    """Group-level conditions ``g^T g = I`` and ``g^T Omega g = Omega``."""
    g = np.asarray(g, dtype=float)
    om = _omega_matrix(omega, g.shape[0])
    eye = np.eye(g.shape[0])
    orth = float(np.max(np.abs(g.T @ g - eye)))
    symp = float(np.max(np.abs(g.T @ om @ g - om)))
    return OrthosymplecticCheck(orth <= tol and symp <= tol, orth, symp)


def projector_of(t, tol: float = DEFAULT_TOLERANCES.projector) -> np.ndarray | None:
    """Return ``P = -T^2`` when it is a projector commuting with ``T``, else None."""
    t = np.asarray(getattr(t, "matrix", t), dtype=float)
    p = -t @ t
    if np.max(np.abs(p @ p - p)) > tol or np.max(np.abs(t @ p - p @ t)) > tol:
        return None
    return p


def group_element(t, sigma: float, method: str = "auto") -> np.ndarray:
    """``exp(sigma T)``.

    ``method`` is ``"closed"`` (requires ``T^2 = -P``), ``"expm"`` (Pade
    scaling-and-squaring) or ``"auto"`` which uses the closed form when the
    projector test passes.
    """
    t = np.asarray(getattr(t, "matrix", t), dtype=float)
    if method not in ("auto", "closed", "expm"):
        raise ValueError(f"unknown method {method!r}")
    if method != "expm":
        p = projector_of(t)
        if p is not None:
            eye = np.eye(t.shape[0])
            return eye - p + p @ (np.cos(sigma) * eye + np.sin(sigma) * t) @ p
        if method == "closed":
            raise ValueError("closed form needs T^2 = -P with P a commuting projector")
    return expm(sigma * t)


def one_parameter_action(
    t: GeneratorMatrix, sigma: float, omega0: PhasePoint, method: str = "auto"
) -> PhasePoint:
    if t.n_particles != omega0.n_particles:
        raise ValueError("generator and phase point have different particle counts")
    return PhasePoint(omega0.n_particles, group_element(t, sigma, method) @ omega0.coords)


def poisson_bracket_quadratic(a, b, omega=None, tol: float = 1e-12) -> np.ndarray:
    """Matrix of ``{F, G}`` for ``F = w.A.w/2`` and ``G = w.B.w/2``: ``A Om B - B Om A``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("A and B must be square matrices of equal size")
    for name, m in (("A", a), ("B", b)):
        if np.max(np.abs(m - m.T)) > tol * max(1.0, np.max(np.abs(m))):
            raise ValueError(f"{name} must be symmetric")
    om = _omega_matrix(omega, a.shape[0])
    return a @ om @ b - b @ om @ a


def quadratic_form_of(t) -> np.ndarray:
    """Symmetric ``B`` with ``T = Omega B``, i.e. the quadratic function generating T."""
    t = np.asarray(getattr(t, "matrix", t), dtype=float)
    om = _omega_matrix(None, t.shape[0])
    return -om @ t
