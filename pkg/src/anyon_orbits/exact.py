"""Exact two-anyon relative spectrum and its sum-over-orbits resummations.

Energies are in units of hbar*omega throughout. The propagator forms below
return ``F = (-1 / 2 pi i) G`` so that the oscillating part of the density of
states is ``2 Re F`` and the residue of ``G`` at a simple pole is ``-2 pi i``
times the residue of ``F``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq

from .config import DEFAULT_TOLERANCES

# ---------------------------------------------------------------------------
# spectrum


@dataclass(frozen=True)
class ExactLine:
    n: int
    j: int
    alpha_q: float

    @property
    def energy(self) -> float:
        return exact_energy(self.n, self.j, self.alpha_q)


def _check_alpha(alpha_q: float, closed: bool = False):
    hi_ok = alpha_q <= 1.0 if closed else alpha_q < 1.0
    if not (0.0 <= alpha_q and hi_ok):
        raise ValueError(f"alpha_q must lie in [0, 1{']' if closed else ')'}, got {alpha_q}")


def exact_energy(n: int, j: int, alpha_q: float) -> float:
    if n < 0:
        raise ValueError("n must be non-negative")
    return 2 * n + abs(j - alpha_q) + 1


def enumerate_spectrum(e_max: float, alpha_q: float, tol: float = 1e-12) -> list[tuple[float, int]]:
    """All levels up to ``e_max`` with degeneracies, by direct enumeration over (n, j)."""
    _check_alpha(alpha_q)
    if e_max < 1:
        raise ValueError("e_max must be at least 1")
    span = e_max - 1
    energies = []
    for j in range(math.floor(alpha_q - span) - 1, math.ceil(alpha_q + span) + 2):
        base = abs(j - alpha_q) + 1
        n = 0
        while base + 2 * n <= e_max + tol:
            energies.append(base + 2 * n)
            n += 1
    energies.sort()
    levels: list[list] = []
    for e in energies:
        if levels and abs(levels[-1][0] - e) <= tol:
            levels[-1][1] += 1
        else:
            levels.append([e, 1])
    return [(float(e), int(d)) for e, d in levels]


def degeneracy_formula(energy: float, alpha_q: float, tol: float = 1e-9) -> int:
    """Closed-form degeneracy: ``floor(m/2)`` on ``m - alpha`` and ``floor((m+1)/2)`` on ``m + alpha``."""
    total = 0
    m_plus = energy + alpha_q
    if abs(m_plus - round(m_plus)) <= tol and round(m_plus) >= 2:
        total += int(round(m_plus)) // 2
    m_minus = energy - alpha_q
    if abs(m_minus - round(m_minus)) <= tol and round(m_minus) >= 1:
        total += (int(round(m_minus)) + 1) // 2
    return total


def partition_function(beta_temp, alpha_q: float):
    beta = np.asarray(beta_temp, dtype=float)
    if np.any(beta <= 0):
        raise ValueError("inverse temperature must be positive")
    return (np.cosh(beta * (alpha_q - 1)) + np.cosh(beta * alpha_q)) / (2 * np.sinh(beta) ** 2)


def partition_function_brute_force(beta_temp: float, alpha_q: float, e_max: float) -> float:
    levels = enumerate_spectrum(e_max, alpha_q)
    e = np.array([lv[0] for lv in levels])
    d = np.array([lv[1] for lv in levels], dtype=float)
    # sum smallest terms first
    terms = d * np.exp(-beta_temp * e)
    return float(np.sum(terms[::-1]))


# ---------------------------------------------------------------------------
# density of states


@dataclass(frozen=True)
class DosSeriesConfig:
    energy_grid: np.ndarray = field(repr=False)
    k_max: int = 2000
    broadening: float = 0.01

    def __post_init__(self):
        grid = np.asarray(self.energy_grid, dtype=float)
        object.__setattr__(self, "energy_grid", grid)
        if self.k_max < 1:
            raise ValueError("k_max must be at least 1")
        if not self.broadening > 0:
            raise ValueError("broadening must be positive")
        if grid.ndim != 1 or grid.size == 0:
            raise ValueError("energy grid must be a non-empty 1-D array")
        if grid.min() < 1.0:
            raise ValueError("the series converges only for energies >= 1")

    @classmethod
    def uniform(cls, start: float, stop: float, step: float, **kw) -> "DosSeriesConfig":
        n = int(round((stop - start) / step))
        return cls(start + step * np.arange(n + 1), **kw)


def _partial_geometric(w, k_max: int):
    """``sum_{k=1}^{K} w^k`` in closed form."""
    w = np.asarray(w, dtype=complex)
    return w * (1 - w**k_max) / (1 - w)


@dataclass
class DosComponents:
    energy: np.ndarray
    thomas_fermi: np.ndarray
    full_period: np.ndarray
    half_period: np.ndarray
    tail_bound: float

    @property
    def total(self) -> np.ndarray:
        return self.thomas_fermi + self.full_period + self.half_period

    def columns(self) -> dict[str, np.ndarray]:
        return {
            "E": self.energy,
            "g_total": self.total,
            "g_thomas_fermi": self.thomas_fermi,
            "g_full_period": self.full_period,
            "g_half_period": self.half_period,
        }


def dos_series(config: DosSeriesConfig, alpha_q: float, thomas_fermi: bool = True) -> DosComponents:
    """Truncated traversal sums for g(E), smeared by a Lorentzian of half-width eta.

    Smearing is done by evaluating at ``E + i eta``; this damps the k-th full
    traversal by ``exp(-2 pi k eta)`` and the k-th half traversal by
    ``exp(-pi k eta)``, and shifts the linear amplitudes to ``E + i eta``.
    """
    _check_alpha(alpha_q, closed=True)
    e = config.energy_grid
    z = e + 1j * config.broadening
    k = config.k_max
    full = np.real(
        (z + alpha_q) * _partial_geometric(np.exp(2j * np.pi * (z + alpha_q)), k)
        + (z - alpha_q) * _partial_geometric(np.exp(2j * np.pi * (z - alpha_q)), k)
    )
    half = np.real(
        -0.5 * _partial_geometric(-np.exp(1j * np.pi * (z + alpha_q)), k)
        + 0.5 * _partial_geometric(-np.exp(1j * np.pi * (z - alpha_q)), k)
    )
    tf = e.copy() if thomas_fermi else np.zeros_like(e)
    damp = math.exp(-math.pi * config.broadening)
    amp = float(np.max(np.abs(z))) + 1.0
    tail = 2 * amp * damp ** (2 * (k + 1)) / (1 - damp**2) + damp ** (k + 1) / (1 - damp)
    return DosComponents(e, tf, full, half, tail)


def dos_series_direct(energy, alpha_q: float, k_max: int, eta: float) -> np.ndarray:
    """Same truncated series summed term by term (reference for small K)."""
    e = np.asarray(energy, dtype=float)
    g = e.copy()
    for k in range(1, k_max + 1):
        d_full = math.exp(-2 * math.pi * k * eta)
        d_half = math.exp(-math.pi * k * eta)
        for sgn in (1, -1):
            x = 2 * np.pi * k * (e + sgn * alpha_q)
            g += d_full * ((e + sgn * alpha_q) * np.cos(x) - eta * np.sin(x))
            g += -sgn * 0.5 * (-1) ** k * d_half * np.cos(np.pi * k * (e + sgn * alpha_q))
    return g


def broadened_spectrum(energy, alpha_q: float, eta: float, e_max: float | None = None) -> np.ndarray:
    """Brute-force spectrum with every level replaced by a Lorentzian of half-width eta."""
    e = np.asarray(energy, dtype=float)
    if e_max is None:
        e_max = float(e.max()) + 400.0
    levels = enumerate_spectrum(e_max, alpha_q)
    g = np.zeros_like(e)
    for lev, d in levels:
        g += d * (eta / np.pi) / ((e - lev) ** 2 + eta**2)
    return g


def relative_l2_error(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


# ---------------------------------------------------------------------------
# propagator resummations


@dataclass
class PropagatorValue:
    total: np.ndarray
    terms: dict[str, np.ndarray]


def _reduce(energy, shift: float, im_shift: float):
    """Split ``E + shift + i eta`` into an integer and a small complex remainder."""
    x = np.asarray(energy, dtype=float) + shift
    m = np.round(x)
    return (x - m) + 1j * im_shift, m.astype(np.int64)


def _geom(r):
    """``w / (1 - w)`` with ``w = e^{2 pi i r}``, written as ``-1/2 + (i/2) cot(pi r)``.

    Only the remainder ``r`` enters, which keeps the sum accurate near poles.
    """
    return -0.5 + 0.5j / np.tan(np.pi * r)


def _half_geom(r, m):
    """``w / (1 - w)`` with ``w = e^{i pi (r + m)}``."""
    c = np.where(m % 2 == 0, 1.0 / np.tan(0.5 * np.pi * r), -np.tan(0.5 * np.pi * r))
    return -0.5 + 0.5j * c


def _reject_on_pole(energy, im_shift: float, alpha_q: float):
    if im_shift < 0:
        raise ValueError("im_shift must be non-negative (the +i eta prescription)")
    if im_shift > 0:
        return
    for shift in (alpha_q, -alpha_q):
        r, _ = _reduce(energy, shift, 0.0)
        if np.any(np.abs(r) < 1e-13):
            raise ValueError("evaluation on a pole requires a positive im_shift")


def _form_a(energy, a: float, im_shift: float) -> PropagatorValue:
    z = np.asarray(energy, dtype=float) + 1j * im_shift
    rp, mp = _reduce(energy, a, im_shift)
    rm, mm = _reduce(energy, -a, im_shift)
    sign_p = np.where(mp % 2 == 0, 1.0, -1.0)
    sign_m = np.where(mm % 2 == 0, 1.0, -1.0)
    amp_p = 0.5 * (z + a - 0.5 * (1 - sign_p * np.exp(-1j * np.pi * rp)))
    amp_m = 0.5 * (z - a + 0.5 * (1 - sign_m * np.exp(-1j * np.pi * rm)))
    plus = amp_p * _geom(rp)
    minus = amp_m * _geom(rm)
    return PropagatorValue(plus + minus, {"plus": plus, "minus": minus})


def _form_b(energy, a: float, im_shift: float) -> PropagatorValue:
    z = np.asarray(energy, dtype=float) + 1j * im_shift
    rp, mp = _reduce(energy, a, im_shift)
    rm, mm = _reduce(energy, -a, im_shift)
    plus = 0.5 * (z + a) * _geom(rp)
    minus = 0.5 * (z - a) * _geom(rm)
    # E - 1 + alpha = rp + (mp - 1) and E + 1 - alpha = rm + (mm + 1)
    half_a = -0.25 * _half_geom(rp, mp - 1)
    half_b = 0.25 * _half_geom(rm, mm + 1)
    return PropagatorValue(
        plus + minus + half_a + half_b,
        {"plus": plus, "minus": minus, "half_a": half_a, "half_b": half_b},
    )


def propagator_form_A(energy, alpha_q: float, im_shift: float = 0.0) -> PropagatorValue:
    """Two full-period branches with corrected amplitudes; no half-period exponentials."""
    _check_alpha(alpha_q)
    _reject_on_pole(energy, im_shift, alpha_q)
    return _form_a(energy, alpha_q, im_shift)


def propagator_form_B(energy, alpha_q: float, im_shift: float = 0.0) -> PropagatorValue:
    """Full-period branches with plain amplitudes plus two half-period series."""
    _check_alpha(alpha_q)
    _reject_on_pole(energy, im_shift, alpha_q)
    return _form_b(energy, alpha_q, im_shift)


def propagator_half_combined(energy, alpha_q: float, im_shift: float, k_max: int) -> PropagatorValue:
    """Traversal sum with the two half-period series merged into one family.

    The k-th half traversal carries amplitude ``-(i/2) sin(pi k alpha)`` on
    ``e^{i pi k (E - 1)}``. Needs ``im_shift > 0`` for the truncation to converge.
    """
    _check_alpha(alpha_q)
    if not im_shift > 0:
        raise ValueError("the truncated traversal sum needs a positive im_shift")
    z = np.asarray(energy, dtype=float) + 1j * im_shift
    a = alpha_q
    k = np.arange(1, k_max + 1)
    shape = np.shape(z)
    zz = np.reshape(z, (-1, 1))
    plus = np.sum(0.5 * (zz + a) * np.exp(2j * np.pi * k * (zz + a)), axis=1)
    minus = np.sum(0.5 * (zz - a) * np.exp(2j * np.pi * k * (zz - a)), axis=1)
    half = np.sum(-0.5j * np.sin(np.pi * k * a) * np.exp(1j * np.pi * k * (zz - 1)), axis=1)
    return PropagatorValue(
        np.reshape(plus + minus + half, shape),
        {"plus": plus.reshape(shape), "minus": minus.reshape(shape), "half": half.reshape(shape)},
    )


FORMS = {"A": propagator_form_A, "B": propagator_form_B}
_RAW_FORMS = {"A": _form_a, "B": _form_b}


def green_function(energy, alpha_q: float, form: str = "A", im_shift: float = 0.0, check: bool = True):
    """``G`` itself, ``-2 pi i F``. ``check=False`` skips the on-pole guard (used by root finding)."""
    if form not in FORMS:
        raise ValueError("form must be 'A' or 'B'")
    if check:
        return -2j * np.pi * FORMS[form](energy, alpha_q, im_shift).total
    return -2j * np.pi * _RAW_FORMS[form](energy, alpha_q, im_shift).total


# ---------------------------------------------------------------------------
# poles and residues


@dataclass
class PoleReport:
    location: float
    branch: str  # plus | minus | both | half-series | unmatched
    residue: float
    brute_force_degeneracy: int
    amplitude_factor: float = 0.0
    converged: bool = True

    def to_dict(self) -> dict:
        return asdict(self)


def _branch_of(e0: float, alpha_q: float, tol: float) -> str:
    on_plus = abs((e0 + alpha_q) - round(e0 + alpha_q)) <= tol
    on_minus = abs((e0 - alpha_q) - round(e0 - alpha_q)) <= tol
    if on_plus and on_minus:
        return "both"
    if on_plus:
        return "plus"
    if on_minus:
        return "minus"
    x = (e0 - 1 + alpha_q) / 2
    if abs(x - round(x)) <= tol:
        return "half-series"
    return "unmatched"


def _residue(form: str, alpha_q: float, e0: float, h0: float = 1e-3) -> tuple[float, bool]:
    """``lim (E - E0) G`` by symmetric offsets and Richardson extrapolation in ``h^2``."""
    hs = [h0 / 2**m for m in range(4)]
    est = []
    for h in hs:
        gp = green_function(e0 + h, alpha_q, form)
        gm = green_function(e0 - h, alpha_q, form)
        est.append(0.5 * (h * gp - h * gm))
    table = [np.array(est)]
    for m in range(1, 4):
        prev = table[-1]
        f = 4.0**m
        table.append((f * prev[1:] - prev[:-1]) / (f - 1))
    value = table[-1][0]
    converged = abs(value - table[-2][-1]) <= 1e-7 * max(1.0, abs(value)) and abs(value.imag) < 1e-6
    return float(value.real), bool(converged)


def find_poles(
    alpha_q: float,
    e_max: float,
    form: str = "A",
    e_min: float = 0.25,
    step: float = 1e-3,
    xtol: float = 1e-13,
    accept: float = 1e-8,
) -> list[float]:
    """Real poles of G: sign changes of ``Re(1/G)`` on a grid, refined by bracketing.

    A sign change of ``Re(1/G)`` can also come from ``1/G`` crossing the
    imaginary axis; such roots keep ``|1/G|`` well above ``accept`` and are dropped.
    """
    n = int(math.ceil((e_max - e_min) / step))
    # offset the grid so no node lands on a rational pole location
    grid = e_min + step * (np.arange(n + 1) + 0.318309886)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / green_function(grid, alpha_q, form, check=False)
    re = inv.real
    idx = np.nonzero(np.sign(re[:-1]) * np.sign(re[1:]) < 0)[0]

    def f(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            val = 1.0 / green_function(x, alpha_q, form, check=False)
        return 0.0 if not np.isfinite(val) else float(np.real(val))

    poles = []
    for i in idx:
        a, b = grid[i], grid[i + 1]
        root = brentq(f, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps)
        with np.errstate(divide="ignore", invalid="ignore"):
            at_root = abs(1.0 / green_function(root, alpha_q, form, check=False))
        if not np.isfinite(at_root) or at_root < accept:
            poles.append(root)
    return poles


def poles_and_residues(
    alpha_q: float,
    e_max: float,
    form: str = "A",
    tol: float = DEFAULT_TOLERANCES.pole_location,
) -> list[PoleReport]:
    """Poles of G up to ``e_max`` with residues paired against brute-force degeneracies."""
    if not 0.0 < alpha_q < 1.0:
        if alpha_q in (0.0, 1.0):
            return _oscillator_poles(e_max)
        raise ValueError("alpha_q must lie in [0, 1]")
    levels = enumerate_spectrum(e_max + 1, alpha_q)
    lev_e = np.array([lv[0] for lv in levels])
    reports = []
    for e0 in find_poles(alpha_q, e_max, form):
        res, ok = _residue(form, alpha_q, e0)
        k = int(np.argmin(np.abs(lev_e - e0)))
        deg = levels[k][1] if abs(lev_e[k] - e0) <= tol else 0
        reports.append(PoleReport(e0, _branch_of(e0, alpha_q, 1e-7), res, deg, 2 * res, ok))
    return reports


def _oscillator_poles(e_max: float) -> list[PoleReport]:
    # both branches merge: E = m with degeneracy m
    return [PoleReport(float(m), "both", float(m), m, 2.0 * m) for m in range(1, int(e_max) + 1)]


def predicted_poles(alpha_q: float, e_max: float) -> list[float]:
    """Closed-form pole locations ``n - alpha`` (n >= 2) and ``n + alpha`` (n >= 1)."""
    out = {round(n - alpha_q, 12) for n in range(2, int(e_max + alpha_q) + 1) if n - alpha_q <= e_max}
    out |= {round(n + alpha_q, 12) for n in range(1, int(e_max - alpha_q) + 1) if n + alpha_q <= e_max}
    return sorted(out)


def match_sets(a, b, tol: float) -> tuple[list[float], list[float]]:
    """Elements of ``a`` with no partner in ``b`` and vice versa."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    miss_a = [float(x) for x in a if b.size == 0 or np.min(np.abs(b - x)) > tol]
    miss_b = [float(x) for x in b if a.size == 0 or np.min(np.abs(a - x)) > tol]
    return miss_a, miss_b


@dataclass
class FormComparison:
    alpha_q: float
    poles_a: list[float]
    poles_b: list[float]
    only_a: list[float]
    only_b: list[float]
    max_location_diff: float

    @property
    def agree(self) -> bool:
        return not self.only_a and not self.only_b


def compare_pole_sets(alpha_q: float, e_max: float, tol: float = DEFAULT_TOLERANCES.pole_location) -> FormComparison:
    pa = find_poles(alpha_q, e_max, "A")
    pb = find_poles(alpha_q, e_max, "B")
    only_a, only_b = match_sets(pa, pb, tol)
    diff = 0.0
    if pa and pb and len(pa) == len(pb):
        diff = float(np.max(np.abs(np.array(pa) - np.array(pb))))
    elif pa and pb:
        diff = math.inf
    return FormComparison(alpha_q, pa, pb, only_a, only_b, diff)


# ---------------------------------------------------------------------------
# Fourier analysis


@dataclass(frozen=True)
class SpectralPeak:
    t: float
    amplitude: float
    width: float


@dataclass
class FourierResult:
    t: np.ndarray
    magnitude: np.ndarray
    peaks: list[SpectralPeak]
    bin_width: float
    window: str
    noise_floor: float

    def amplitude_at(self, t0: float, search: float | None = None) -> float:
        """Largest magnitude within ``search`` (default two bins) of ``t0``."""
        search = 2 * self.bin_width if search is None else search
        sel = np.abs(self.t - t0) <= search
        return float(self.magnitude[sel].max()) if np.any(sel) else 0.0

    def peak_near(self, t0: float, search: float | None = None) -> SpectralPeak | None:
        search = 2 * self.bin_width if search is None else search
        near = [p for p in self.peaks if abs(p.t - t0) <= search]
        return max(near, key=lambda p: p.amplitude) if near else None


WINDOWS = {
    "hann": np.hanning,
    "hamming": np.hamming,
    "blackman": np.blackman,
    "rect": np.ones,
}


def fourier_grid(start: float = 1.0, span: float = 32.0, step: float = 0.01) -> np.ndarray:
    """Uniform grid of ``span / step`` points; a span of 32 puts pi and 2 pi on exact bins."""
    n = int(round(span / step))
    return start + step * np.arange(n)


def dos_fourier(
    alpha_q: float,
    config: DosSeriesConfig,
    window: str = "hann",
    pad_factor: int = 8,
    peak_threshold: float = 1e-3,
) -> FourierResult:
    """Windowed transform of the oscillating part of g(E).

    The conjugate variable is ``t = 2 pi f`` so full traversals appear at
    ``t = 2 pi k`` and half traversals at ``t = pi k``. Magnitudes are
    normalised by the window sum, so a component ``A cos(t0 E)`` gives a peak
    of height ``A / 2``.
    """
    grid = config.energy_grid
    if grid.size < 2:
        raise ValueError("grid needs at least two points")
    steps = np.diff(grid)
    de = float(steps.mean())
    if not np.allclose(steps, de, rtol=1e-9, atol=1e-12):
        raise ValueError("Fourier analysis needs a uniform grid")
    if np.pi / de <= np.pi:
        raise ValueError("grid too coarse: the half-period component would alias (spacing >= 1)")
    if de > 0.01 + 1e-12:
        raise ValueError("grid spacing must be at most 0.01")
    span = de * grid.size
    if span < 30 - 1e-9:
        raise ValueError("grid must span at least 30 in energy")
    if window not in WINDOWS:
        raise ValueError(f"window must be one of {sorted(WINDOWS)}")

    comp = dos_series(config, alpha_q)
    signal = comp.full_period + comp.half_period
    w = WINDOWS[window](grid.size)
    n_fft = pad_factor * grid.size
    ft = np.fft.rfft(signal * w, n=n_fft) / w.sum()
    mag = np.abs(ft)
    t = 2 * np.pi * np.fft.rfftfreq(n_fft, d=de)
    bin_width = 2 * np.pi / span

    floor = float(np.median(mag))
    cut = max(peak_threshold * float(mag[1:].max()), 10 * floor)
    peaks = []
    for i in range(1, mag.size - 1):
        if mag[i] >= mag[i - 1] and mag[i] > mag[i + 1] and mag[i] > cut:
            y0, y1, y2 = mag[i - 1], mag[i], mag[i + 1]
            denom = y0 - 2 * y1 + y2
            shift = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
            dt = t[1] - t[0]
            t_peak = t[i] + shift * dt
            amp = y1 - 0.25 * (y0 - y2) * shift
            half = amp / 2
            lo = i
            while lo > 0 and mag[lo] > half:
                lo -= 1
            hi = i
            while hi < mag.size - 1 and mag[hi] > half:
                hi += 1
            peaks.append(SpectralPeak(float(t_peak), float(amp), float((hi - lo) * dt)))
    return FourierResult(t, mag, peaks, bin_width, window, floor)


def half_period_k1_amplitude(alpha_q: float, eta: float = 0.0) -> float:
    """Expected height of the ``t = pi`` peak: ``|sin(pi alpha)| e^{-pi eta} / 2``."""
    return abs(math.sin(math.pi * alpha_q)) * math.exp(-math.pi * eta) / 2
